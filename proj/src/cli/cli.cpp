#include "bz/cli.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_sinks.h>
#include <spdlog/spdlog.h>

#include "bz/canard.hpp"
#include "bz/critical_geometry.hpp"
#include "bz/cycles.hpp"
#include "bz/equilibrium.hpp"
#include "bz/error.hpp"
#include "bz/integrator.hpp"
#include "documents.hpp"
#include "portrait.hpp"

namespace bz::cli {

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

namespace {

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error("IoError", what) {}
};

std::shared_ptr<spdlog::logger> make_logger() {
  auto logger = spdlog::get("bz");
  if (!logger) {
    logger = spdlog::stderr_logger_st("bz");
    logger->set_pattern("[%l] %v");
  }
  spdlog::level::level_enum level = spdlog::level::warn;
  if (const char* env = std::getenv("BZ_LOG")) {
    const std::string v(env);
    if (v == "error") level = spdlog::level::err;
    else if (v == "warn") level = spdlog::level::warn;
    else if (v == "info") level = spdlog::level::info;
    else if (v == "debug") level = spdlog::level::debug;
  }
  logger->set_level(level);
  return logger;
}

// Writes to the file at path, or to out when path is "-".
template <class Fn>
void emit(const std::string& path, std::ostream& out, Fn&& write) {
  if (path == "-") {
    write(out);
    return;
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw IoError("cannot open " + path + " for writing");
  write(file);
  if (!file) throw IoError("write to " + path + " failed");
}

struct PointArgs {
  double f = 0.0;
  double q = 0.0;
  double eps = 0.0;

  void add(CLI::App* app, bool with_f = true) {
    if (with_f) app->add_option("--f", f, "stoichiometric parameter f > 0")->required();
    app->add_option("--q", q, "kinetic parameter q > 0")->required();
    app->add_option("--eps", eps, "time-scale ratio eps > 0")->required();
  }
  Params params() const { return Params(f, q, eps); }
};

struct TolArgs {
  double rtol = 0.0;
  double atol = 0.0;
  std::string formulation = "polynomial";

  void add(CLI::App* app, double default_rtol, double default_atol) {
    rtol = default_rtol;
    atol = default_atol;
    app->add_option("--rtol", rtol, "relative tolerance")->capture_default_str();
    app->add_option("--atol", atol, "absolute tolerance")->capture_default_str();
    app->add_option("--formulation", formulation, "integrated field")
        ->check(CLI::IsMember({"polynomial", "fast"}))
        ->capture_default_str();
  }
  void apply(IntegratorOptions& o) const {
    o.rel_tol = rtol;
    o.abs_tol = atol;
    o.formulation = formulation == "fast" ? Formulation::FastTime : Formulation::PolynomialTime;
  }
};

void write_csv_rows(std::ostream& os, const std::vector<Sample>& samples) {
  os << "t,x,y\n";
  for (const Sample& s : samples) {
    os << format_double(s.t) << ',' << format_double(s.x) << ',' << format_double(s.y) << '\n';
  }
}

std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> v;
  if (n == 1) return {a};
  for (int i = 0; i < n; ++i) {
    v.push_back(i == n - 1 ? b : a + (b - a) * i / (n - 1));
  }
  return v;
}

}  // namespace

int run(const std::vector<std::string>& argv_in, std::ostream& out, std::ostream& err) {
  auto log = make_logger();

  CLI::App app{"Slow-fast BZ analysis: critical curve, equilibrium, canards, simulation.",
               "bzcanard"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "show help for every subcommand");

  PointArgs analyze_args;
  bool analyze_json = false;
  auto* analyze = app.add_subcommand("analyze", "full analysis report for one parameter point");
  analyze_args.add(analyze);
  analyze->add_flag("--json", analyze_json, "emit JSON instead of text");

  double folds_q = 0.0;
  auto* folds_cmd = app.add_subcommand("folds", "fold points of the critical curve (JSON)");
  folds_cmd->add_option("--q", folds_q, "kinetic parameter q > 0")->required();

  auto* qstar_cmd = app.add_subcommand("qstar", "shape threshold q* of the critical curve");

  double qss_tol = 1e-10;
  auto* qss_cmd = app.add_subcommand("qstarstar", "q** where A at the maximum fold changes sign");
  qss_cmd->add_option("--tol", qss_tol, "|A| tolerance")->capture_default_str()->check(
      CLI::PositiveNumber);

  PointArgs hopf_args;
  auto* hopf_cmd = app.add_subcommand("hopf", "singular Hopf points (JSON)");
  hopf_args.add(hopf_cmd, false);

  PointArgs sim_args;
  TolArgs sim_tol;
  double sim_x0 = 0.0, sim_y0 = 0.0, sim_t = 0.0;
  bool sim_backward = false;
  int sim_dense = 0;
  std::string sim_out = "-";
  auto* sim = app.add_subcommand("simulate", "trajectory CSV (t,x,y)");
  sim_args.add(sim);
  sim->add_option("--x0", sim_x0, "initial x")->required();
  sim->add_option("--y0", sim_y0, "initial y")->required();
  sim->add_option("--t", sim_t, "horizon in the integration variable")->required()->check(
      CLI::PositiveNumber);
  sim->add_flag("--backward", sim_backward, "integrate the time-reversed field");
  sim->add_option("--dense", sim_dense, "interpolated samples between steps")
      ->capture_default_str()
      ->check(CLI::NonNegativeNumber);
  sim->add_option("--out", sim_out, "output path, - for stdout")->capture_default_str();
  sim_tol.add(sim, 1e-9, 1e-12);

  PointArgs cyc_args;
  TolArgs cyc_tol;
  bool cyc_both = false, cyc_backward = false;
  double cyc_c = 0.35;
  std::optional<double> cyc_x0, cyc_y0;
  auto* cyc = app.add_subcommand("cycle", "limit cycle estimate(s) as JSON");
  cyc_args.add(cyc);
  cyc->add_flag("--both", cyc_both, "outer stable and inner unstable cycle");
  cyc->add_flag("--backward", cyc_backward, "search in backward time (unstable cycles)");
  cyc->add_option("--seed-c", cyc_c, "seed (0.4, c/f)")->capture_default_str();
  cyc->add_option("--x0", cyc_x0, "explicit seed x");
  cyc->add_option("--y0", cyc_y0, "explicit seed y");
  cyc_tol.add(cyc, CycleOptions().integrator.rel_tol, CycleOptions().integrator.abs_tol);

  PointArgs sw_args;
  TolArgs sw_tol;
  double sw_min = 0.0, sw_max = 0.0;
  int sw_steps = 0;
  unsigned sw_threads = 0;
  bool sw_refine = false, sw_no_cont = false;
  double sw_c = 0.35;
  std::string sw_out = "-";
  auto* sw = app.add_subcommand("sweep", "amplitude sweep CSV (f,amplitude_x,period,shape,converged)");
  sw_args.add(sw, false);
  sw->add_option("--f-min", sw_min, "smallest f")->required();
  sw->add_option("--f-max", sw_max, "largest f")->required();
  sw->add_option("--steps", sw_steps, "number of f values")->required()->check(
      CLI::PositiveNumber);
  sw->add_flag("--refine-explosion", sw_refine, "bisect amplitude jumps, bracket on stderr");
  sw->add_flag("--no-continuation", sw_no_cont, "cold-start every row (parallel)");
  sw->add_option("--threads", sw_threads, "workers without continuation, 0 = all cores")
      ->capture_default_str();
  sw->add_option("--seed-c", sw_c, "cold-start seed (0.4, c/f)")->capture_default_str();
  sw->add_option("--out", sw_out, "output path, - for stdout")->capture_default_str();
  sw_tol.add(sw, CycleOptions().integrator.rel_tol, CycleOptions().integrator.abs_tol);

  PointArgs pt_args;
  TolArgs pt_tol;
  std::string pt_out;
  std::string pt_orbits;
  double pt_t = 0.0;
  auto* pt = app.add_subcommand("portrait", "SVG phase portrait");
  pt_args.add(pt);
  pt->add_option("--out", pt_out, "output path, - for stdout")->required();
  pt->add_option("--orbits", pt_orbits,
                 "orbits as f:X,Y;b:X,Y (default: forward from (0.4, 0.35/f), backward from "
                 "E*+(1e-3,0))");
  pt->add_option("--t", pt_t, "horizon per orbit, 0 = 50/eps")->capture_default_str();
  pt_tol.add(pt, 1e-9, 1e-12);

  std::vector<const char*> argv;
  for (const auto& a : argv_in) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n";
    const CLI::App* target = &app;
    for (const CLI::App* sub : app.get_subcommands()) target = sub;
    err << target->help();
    return kExitUsage;
  }

  try {
    if (*analyze) {
      const Params p = analyze_args.params();
      const auto doc = analysis_document(p);
      if (analyze_json) {
        out << doc.dump(2) << "\n";
      } else {
        out << analysis_text(doc);
      }
    } else if (*folds_cmd) {
      out << fold_json(fold_points(folds_q)).dump(2) << "\n";
    } else if (*qstar_cmd) {
      out << format_double(q_star()) << "\n";
    } else if (*qss_cmd) {
      out << format_double(q_double_star(qss_tol)) << "\n";
    } else if (*hopf_cmd) {
      if (!(hopf_args.q > 0.0) || !(hopf_args.eps > 0.0)) {
        throw InvalidArgument("q and eps must be positive");
      }
      const FoldReport folds = fold_points(hopf_args.q);
      json doc = {{"q", hopf_args.q}, {"eps", hopf_args.eps}};
      if (folds.x1) doc["x1"] = *folds.x1;
      if (folds.x2) doc["x2"] = *folds.x2;
      const HopfData h = hopf_points(hopf_args.q, hopf_args.eps);
      const json fields = hopf_json(h);
      for (const auto& [k, v] : fields.items()) doc[k] = v;
      doc["settings"] = {{"root_bisections", 100}};
      out << doc.dump(2) << "\n";
    } else if (*sim) {
      const Params p = sim_args.params();
      IntegratorOptions o;
      sim_tol.apply(o);
      o.max_time = sim_t;
      o.dense_samples_per_step = sim_dense;
      const Trajectory t = integrate(
          p, {sim_x0, sim_y0}, sim_backward ? Direction::Backward : Direction::Forward, o);
      log->info("simulate: {} samples, {} steps, termination {}, rtol {}, atol {}, {}",
                t.samples.size(), t.steps, to_string(t.termination), o.rel_tol, o.abs_tol,
                to_string(o.formulation));
      if (t.termination != Termination::TimeReached) {
        log->warn("integration stopped early: {}", to_string(t.termination));
      }
      emit(sim_out, out, [&](std::ostream& os) { write_csv_rows(os, t.samples); });
    } else if (*cyc) {
      const Params p = cyc_args.params();
      CycleOptions o;
      cyc_tol.apply(o.integrator);
      json doc = {{"params", params_json(p)}, {"settings", cycle_settings_json(o)}};
      json cycles = json::array();
      if (cyc_both) {
        const NestedCyclesResult r = nested_cycles(p, o);
        json outer = cycle_json(r.outer);
        outer["role"] = "outer";
        cycles.push_back(outer);
        if (r.inner) {
          json inner = cycle_json(*r.inner);
          inner["role"] = "inner";
          cycles.push_back(inner);
        }
        doc["cycles"] = cycles;
        doc["gap"] = r.gap;
      } else {
        State seed = campaign_seed(p, cyc_c);
        if (cyc_x0) seed.x = *cyc_x0;
        if (cyc_y0) seed.y = *cyc_y0;
        const LimitCycleEstimate c = find_limit_cycle(
            p, cyc_backward ? Direction::Backward : Direction::Forward, seed, o);
        json single = cycle_json(c);
        single["role"] = "single";
        cycles.push_back(single);
        doc["cycles"] = cycles;
        doc["settings"]["seed"] = {seed.x, seed.y};
      }
      out << doc.dump(2) << "\n";
    } else if (*sw) {
      if (!(sw_min <= sw_max)) throw InvalidArgument("--f-min must not exceed --f-max");
      SweepOptions o;
      sw_tol.apply(o.cycle.integrator);
      o.continuation = !sw_no_cont;
      o.threads = sw_threads;
      o.seed_constant = sw_c;
      const auto fs = linspace(sw_min, sw_max, sw_steps);
      // Continuation follows the cycle in the order the campaign visits it:
      // from the oscillatory side towards the Hopf point is not known a
      // priori, so rows are computed in ascending f.
      const auto rows = amplitude_sweep(sw_args.q, sw_args.eps, fs, o);
      emit(sw_out, out, [&](std::ostream& os) {
        os << "f,amplitude_x,period,shape,converged\n";
        for (const SweepRow& r : rows) {
          os << format_double(r.f) << ',' << format_double(r.amplitude_x) << ','
             << format_double(r.period) << ',' << to_string(r.shape) << ','
             << (r.converged ? "true" : "false") << '\n';
        }
      });
      if (sw_refine) {
        const FoldReport folds = fold_points(sw_args.q);
        const double floor = folds.shape_class == ShapeClass::SShaped
                                 ? kHopfSmallFraction * (*folds.x2 - *folds.x1)
                                 : 1e-12;
        double lo_amp = INFINITY, hi_amp = 0.0;
        for (const SweepRow& r : rows) {
          if (!r.converged) continue;
          lo_amp = std::min(lo_amp, std::max(r.amplitude_x, floor));
          hi_amp = std::max(hi_amp, std::max(r.amplitude_x, floor));
        }
        const double thr = std::sqrt(lo_amp * hi_amp);
        int found = 0;
        for (std::size_t i = 0; i + 1 < rows.size(); ++i) {
          if (!rows[i].converged || !rows[i + 1].converged) continue;
          if ((rows[i].amplitude_x >= thr) == (rows[i + 1].amplitude_x >= thr)) continue;
          ExplosionOptions eo;
          eo.cycle = o.cycle;
          eo.amplitude_threshold = thr;
          eo.seed_constant = sw_c;
          const ParameterBracket b =
              locate_explosion(sw_args.q, sw_args.eps, {rows[i].f, rows[i + 1].f}, eo);
          err << "explosion bracket: [" << format_double(b.lo) << ", " << format_double(b.hi)
              << "] threshold " << format_double(b.threshold) << " after " << b.iterations
              << " bisections\n";
          ++found;
        }
        if (!found) err << "explosion bracket: none (no amplitude jump across the sweep)\n";
      }
    } else if (*pt) {
      const Params p = pt_args.params();
      PortraitOptions o;
      pt_tol.apply(o.integrator);
      o.horizon = pt_t;
      const auto orbits = pt_orbits.empty() ? default_orbits(p) : parse_orbit_spec(pt_orbits);
      const std::string svg = render_portrait(p, orbits, o);
      emit(pt_out, out, [&](std::ostream& os) { os << svg; });
    }
  } catch (const InvalidArgument& e) {
    err << e.name() << ": " << e.what() << "\n\n";
    const auto selected = app.get_subcommands();
    err << (selected.empty() ? app.help() : selected.front()->help());
    return kExitUsage;
  } catch (const Error& e) {
    err << e.name() << ": " << e.what() << "\n";
    return kExitNumeric;
  }
  return kExitOk;
}

}  // namespace bz::cli
