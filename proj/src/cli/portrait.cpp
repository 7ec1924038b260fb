#include "portrait.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

#include "bz/critical_geometry.hpp"
#include "bz/equilibrium.hpp"
#include "bz/error.hpp"

namespace bz::cli {

namespace {

constexpr const char* kForwardColor = "#2e8b57";
constexpr const char* kBackwardColor = "#ff8c00";
constexpr const char* kCurveColor = "#000000";
constexpr int kCurveSamples = 1200;
constexpr double kPixelsPerUnit = 800.0;

std::string num(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::fixed, 5);
  std::string s(buf, res.ptr);
  if (s == "-0.00000") s = "0.00000";
  return s;
}

double parse_number(std::string_view text) {
  double v = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
    throw InvalidArgument("bad number in orbit spec: '" + std::string(text) + "'");
  }
  return v;
}

// Splits a polyline wherever it leaves the viewport so that escaping orbits
// and the curve's pole do not draw long spurious segments.
std::vector<std::vector<State>> clip(const std::vector<State>& pts, double height) {
  std::vector<std::vector<State>> runs;
  std::vector<State> run;
  for (const State& s : pts) {
    const bool inside = std::isfinite(s.x) && std::isfinite(s.y) && s.x >= 0.0 && s.x <= 1.0 &&
                        s.y >= 0.0 && s.y <= height;
    if (inside) {
      run.push_back(s);
    } else if (!run.empty()) {
      runs.push_back(std::move(run));
      run.clear();
    }
  }
  if (!run.empty()) runs.push_back(std::move(run));
  return runs;
}

void polyline(std::ostringstream& svg, const std::vector<State>& pts, const char* color,
              bool dashed, double width) {
  if (pts.size() < 2) return;
  svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"" << num(width)
      << "\"";
  if (dashed) svg << " stroke-dasharray=\"" << num(4 * width) << ' ' << num(3 * width) << "\"";
  svg << " points=\"";
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (i) svg << ' ';
    svg << num(pts[i].x) << ',' << num(pts[i].y);
  }
  svg << "\"/>\n";
}

}  // namespace

std::vector<OrbitSpec> parse_orbit_spec(const std::string& spec) {
  std::vector<OrbitSpec> out;
  std::string_view rest(spec);
  while (!rest.empty()) {
    const auto end = rest.find(';');
    std::string_view item = rest.substr(0, end);
    rest = end == std::string_view::npos ? std::string_view() : rest.substr(end + 1);
    if (item.empty()) continue;
    const auto colon = item.find(':');
    const auto comma = item.find(',');
    if (colon == std::string_view::npos || comma == std::string_view::npos || comma < colon) {
      throw InvalidArgument("orbit spec items look like f:X,Y or b:X,Y");
    }
    const std::string_view dir = item.substr(0, colon);
    OrbitSpec o;
    if (dir == "f") {
      o.direction = Direction::Forward;
    } else if (dir == "b") {
      o.direction = Direction::Backward;
    } else {
      throw InvalidArgument("orbit direction must be f or b");
    }
    o.start = {parse_number(item.substr(colon + 1, comma - colon - 1)),
               parse_number(item.substr(comma + 1))};
    out.push_back(o);
  }
  if (out.empty()) throw InvalidArgument("empty orbit spec");
  return out;
}

std::vector<OrbitSpec> default_orbits(const Params& p) {
  const double xs = equilibrium(p);
  return {{Direction::Forward, {0.4, 0.35 / p.f()}}, {Direction::Backward, {xs + 1e-3, xs}}};
}

std::string render_portrait(const Params& p, const std::vector<OrbitSpec>& orbits,
                            const PortraitOptions& opts) {
  IntegratorOptions io = opts.integrator;
  io.max_time = opts.horizon > 0.0 ? opts.horizon : 50.0 / p.eps();

  struct Drawn {
    std::vector<State> pts;
    bool backward;
  };
  std::vector<Drawn> drawn;
  double y_top = 1.1;
  for (const OrbitSpec& o : orbits) {
    const Trajectory t = integrate(p, o.start, o.direction, io);
    const std::size_t stride = std::max<std::size_t>(1, t.samples.size() / opts.max_points + 1);
    Drawn d{{}, o.direction == Direction::Backward};
    for (std::size_t i = 0; i < t.samples.size(); i += stride) {
      d.pts.push_back({t.samples[i].x, t.samples[i].y});
    }
    if (!t.samples.empty()) d.pts.push_back({t.samples.back().x, t.samples.back().y});
    for (const State& s : d.pts) {
      if (s.x >= 0.0 && s.x <= 1.0 && std::isfinite(s.y) && s.y < 10.0) {
        y_top = std::max(y_top, s.y);
      }
    }
    drawn.push_back(std::move(d));
  }
  const double height = std::ceil(y_top * 100.0) / 100.0;

  std::vector<State> curve;
  const double q = p.q();
  for (int i = 0; i <= kCurveSamples; ++i) {
    const double x = static_cast<double>(i) / kCurveSamples;
    if (std::abs(x - q) < 1e-9) {
      curve.push_back({x, std::numeric_limits<double>::infinity()});
      continue;
    }
    curve.push_back({x, curve_value(q, x, p.f())});
  }

  const double stroke = 0.003;
  std::ostringstream svg;
  svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\""
      << num(kPixelsPerUnit) << "\" height=\"" << num(kPixelsPerUnit * height)
      << "\" viewBox=\"0 0 1 " << num(height) << "\">\n"
      << "<title>f=" << num(p.f()) << " q=" << num(q) << " eps=" << p.eps() << "</title>\n"
      << "<rect x=\"0\" y=\"0\" width=\"1\" height=\"" << num(height) << "\" fill=\"#ffffff\"/>\n"
      << "<g transform=\"matrix(1 0 0 -1 0 " << num(height) << ")\">\n";
  svg << "<polyline fill=\"none\" stroke=\"#888888\" stroke-width=\"" << num(stroke / 2)
      << "\" points=\"0,0 1,0\"/>\n";
  svg << "<polyline fill=\"none\" stroke=\"#888888\" stroke-width=\"" << num(stroke / 2)
      << "\" points=\"0,0 0," << num(height) << "\"/>\n";
  for (const auto& run : clip(curve, height)) {
    polyline(svg, run, kCurveColor, false, stroke);
  }
  for (const Drawn& d : drawn) {
    for (const auto& run : clip(d.pts, height)) {
      polyline(svg, run, d.backward ? kBackwardColor : kForwardColor, d.backward, stroke);
    }
  }
  const FoldReport folds = fold_points(q);
  for (const auto& [x, y] : {std::pair{folds.x1, folds.y1}, std::pair{folds.x2, folds.y2}}) {
    if (x && y) {
      svg << "<circle cx=\"" << num(*x) << "\" cy=\"" << num(*y / p.f())
          << "\" r=\"0.008\" fill=\"#d62728\"/>\n";
    }
  }
  const double xs = equilibrium(p);
  svg << "<circle cx=\"" << num(xs) << "\" cy=\"" << num(xs)
      << "\" r=\"0.008\" fill=\"#1f77b4\"/>\n";
  svg << "</g>\n</svg>\n";
  return svg.str();
}

}  // namespace bz::cli
