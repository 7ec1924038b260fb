#include "bz/cycles.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <future>
#include <limits>
#include <sstream>
#include <thread>

#include "bz/equilibrium.hpp"
#include "bz/error.hpp"

namespace bz {

namespace {

constexpr int kMaxRestarts = 40;
constexpr int kRatioWindow = 5;
constexpr double kInnerSeedOffset = 1e-3;

// Golden-section search for the extremum of one coordinate of the step's
// interpolant, parameterised by theta in [0, 1].
double refine_extremum(const StepView& step, Axis axis, bool maximum) {
  auto value = [&](double theta) {
    const State s = step.at(step.t0 + theta * (step.t1 - step.t0));
    const double v = axis == Axis::X ? s.x : s.y;
    return maximum ? v : -v;
  };
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = 0.0;
  double b = 1.0;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = value(c);
  double fd = value(d);
  for (int i = 0; i < 60; ++i) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = value(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = value(d);
    }
  }
  const double v = value(0.5 * (a + b));
  return maximum ? v : -v;
}

class LoopTracker {
 public:
  explicit LoopTracker(int dense) : dense_(dense) {}

  void reset(const State& s, double t) {
    extent_ = {s.x, s.x, s.y, s.y};
    samples_.clear();
    samples_.push_back({t, s.x, s.y});
  }

  void add_step(const StepView& step) {
    include(step.end);
    const double span = step.t1 - step.t0;
    const double sx0 = step.rate_start.x * span;
    const double sx1 = step.rate_end.x * span;
    if (sx0 > 0.0 && sx1 < 0.0) {
      extent_.x_max = std::max(extent_.x_max, refine_extremum(step, Axis::X, true));
    } else if (sx0 < 0.0 && sx1 > 0.0) {
      extent_.x_min = std::min(extent_.x_min, refine_extremum(step, Axis::X, false));
    }
    const double sy0 = step.rate_start.y * span;
    const double sy1 = step.rate_end.y * span;
    if (sy0 > 0.0 && sy1 < 0.0) {
      extent_.y_max = std::max(extent_.y_max, refine_extremum(step, Axis::Y, true));
    } else if (sy0 < 0.0 && sy1 > 0.0) {
      extent_.y_min = std::min(extent_.y_min, refine_extremum(step, Axis::Y, false));
    }
    for (int i = 1; i <= dense_; ++i) {
      const double t = step.t0 + span * i / (dense_ + 1);
      const State s = step.at(t);
      samples_.push_back({t, s.x, s.y});
    }
    samples_.push_back({step.t1, step.end.x, step.end.y});
  }

  const CycleExtent& extent() const { return extent_; }
  const std::vector<Sample>& samples() const { return samples_; }

 private:
  void include(const State& s) {
    extent_.x_min = std::min(extent_.x_min, s.x);
    extent_.x_max = std::max(extent_.x_max, s.x);
    extent_.y_min = std::min(extent_.y_min, s.y);
    extent_.y_max = std::max(extent_.y_max, s.y);
  }

  int dense_;
  CycleExtent extent_{};
  std::vector<Sample> samples_;
};

enum class SearchStatus { Converged, Collapsed, NoConvergence, Escaped };

struct SearchResult {
  SearchStatus status = SearchStatus::NoConvergence;
  std::string detail;
  LimitCycleEstimate estimate;  // complete only when Converged
  bool has_loop = false;        // at least one full loop measured
};

double segment_time(const Params& p, const CycleOptions& opts) {
  return opts.segment_time > 0.0 ? opts.segment_time : 200.0 / p.eps();
}

void validate(const CycleOptions& opts) {
  opts.integrator.validate();
  if (opts.max_returns < 2) {
    throw InvalidArgument("max_returns must be at least 2");
  }
  if (!(opts.convergence_tol > 0.0) || !(opts.equilibrium_tol > 0.0)) {
    throw InvalidArgument("cycle tolerances must be positive");
  }
}

// One return from (x*, y) on the section; used for the contraction probe.
std::optional<double> single_return(const Params& p, Direction dir, double x_star, double y,
                                    const CycleOptions& opts) {
  Section section{Axis::X, x_star, 0, std::nullopt, x_star};
  IntegratorOptions io = opts.integrator;
  io.max_time = segment_time(p, opts);
  try {
    const auto events = integrate_to_section(p, {x_star, y}, section, 1, io, dir);
    return events.front().state.y;
  } catch (const NoCrossing&) {
    return std::nullopt;
  }
}

SearchResult search_cycle(const Params& p, Direction dir, const State& seed,
                          const CycleOptions& opts) {
  validate(opts);
  const double x_star = equilibrium(p);
  const FoldReport folds = fold_points(p.q());
  const Section section{Axis::X, x_star, 0, std::nullopt, x_star};
  const double seg_time = segment_time(p, opts);
  const double collapse_gap = opts.equilibrium_tol * std::max(1.0, x_star);
  const double noise = 10.0 * (opts.integrator.rel_tol * x_star + opts.integrator.abs_tol);

  IntegratorOptions io = opts.integrator;
  io.max_time = seg_time * (opts.max_returns + 2);

  SearchResult result;
  std::vector<double> ratios;  // |d_k / d_{k-1}| measured above the noise floor
  int total_returns = 0;
  State start = seed;

  for (int restart = 0; restart <= kMaxRestarts; ++restart) {
    enum class Outcome { Running, Converged, Collapsed, Timeout, Restart, MaxReturns };
    Outcome outcome = Outcome::Running;
    std::vector<SectionEvent> crossings;
    std::vector<double> diffs;
    LoopTracker current(opts.loop_dense_samples);
    LoopTracker completed(opts.loop_dense_samples);
    current.reset(start, 0.0);
    double last_event_time = 0.0;
    State restart_point;

    const RunSummary run = drive(p, start, dir, io, [&](const StepView& step) {
      current.add_step(step);
      if (auto e = find_crossing(step, section)) {
        ++total_returns;
        crossings.push_back(*e);
        last_event_time = e->t;
        completed = current;
        current.reset(e->state, e->t);
        const double y = e->state.y;
        if (x_star - y < collapse_gap) {
          outcome = Outcome::Collapsed;
          return false;
        }
        if (crossings.size() >= 2) {
          const double d = y - crossings[crossings.size() - 2].state.y;
          if (!diffs.empty() && std::abs(diffs.back()) > 100.0 * noise) {
            ratios.push_back(std::abs(d / diffs.back()));
          }
          diffs.push_back(d);
          if (std::abs(d) <= opts.convergence_tol * std::abs(y)) {
            outcome = Outcome::Converged;
            return false;
          }
          if (opts.accelerate && diffs.size() >= 3 && std::abs(d) > 100.0 * noise) {
            const double r1 = d / diffs[diffs.size() - 2];
            const double r0 = diffs[diffs.size() - 2] / diffs[diffs.size() - 3];
            if (r1 > 0.3 && r1 < 1.0 && std::abs(r1 - r0) < 0.1 * (1.0 - r1)) {
              const double limit = y + d * r1 / (1.0 - r1);
              if (limit >= x_star - collapse_gap) {
                outcome = Outcome::Collapsed;
                return false;
              }
              if (limit > 0.0) {
                restart_point = {x_star, limit};
                outcome = Outcome::Restart;
                return false;
              }
            }
          }
        }
        if (total_returns >= opts.max_returns) {
          outcome = Outcome::MaxReturns;
          return false;
        }
      }
      if (std::abs(step.t1 - last_event_time) > seg_time) {
        outcome = Outcome::Timeout;
        return false;
      }
      return true;
    });

    if (crossings.size() >= 2) {
      result.has_loop = true;
      const CycleExtent& ext = completed.extent();
      result.estimate.x_min = ext.x_min;
      result.estimate.x_max = ext.x_max;
      result.estimate.y_min = ext.y_min;
      result.estimate.y_max = ext.y_max;
      result.estimate.amplitude_x = ext.x_max - ext.x_min;
    }

    switch (outcome) {
      case Outcome::Restart:
        start = restart_point;
        continue;
      case Outcome::Collapsed:
        result.status = SearchStatus::Collapsed;
        result.detail = "section crossings collapse onto the equilibrium";
        return result;
      case Outcome::MaxReturns:
        result.status = SearchStatus::NoConvergence;
        result.detail = "no contraction after " + std::to_string(total_returns) + " returns";
        return result;
      case Outcome::Running:
      case Outcome::Timeout: {
        if (run.termination == Termination::Blowup) {
          result.status = SearchStatus::Escaped;
          result.detail = "orbit escaped to infinity";
          return result;
        }
        const double dist = std::hypot(run.state.x - x_star, run.state.y - x_star);
        if (dist < 1e-6) {
          result.status = SearchStatus::Collapsed;
          result.detail = "orbit settled on the equilibrium without crossing the section";
        } else {
          result.status = SearchStatus::NoConvergence;
          result.detail = "no section crossing within the segment horizon";
        }
        return result;
      }
      case Outcome::Converged:
        break;
    }

    // Converged: assemble the estimate from the last complete loop.
    LimitCycleEstimate& est = result.estimate;
    const SectionEvent& a = crossings[crossings.size() - 2];
    const SectionEvent& b = crossings.back();
    est.section_fixed_point = b.state.y;
    est.x_star = x_star;
    est.period = std::abs(b.t - a.t);
    est.period_fast_time = std::abs(b.fast_time - a.fast_time);
    est.time_variable = opts.integrator.formulation;
    est.stability = dir == Direction::Forward ? CycleStability::Stable : CycleStability::Unstable;
    est.returns = total_returns;
    est.loop = completed.samples();
    const double t_shift = est.loop.empty() ? 0.0 : est.loop.front().t;
    for (Sample& s : est.loop) {
      s.t -= t_shift;
    }

    if (!ratios.empty()) {
      const std::size_t n = std::min<std::size_t>(kRatioWindow, ratios.size());
      double log_sum = 0.0;
      for (std::size_t i = ratios.size() - n; i < ratios.size(); ++i) {
        log_sum += std::log(std::max(ratios[i], 1e-300));
      }
      est.contraction_ratio = std::exp(log_sum / static_cast<double>(n));
    } else {
      // Too few clean differences: probe the return map derivative directly.
      const double y = est.section_fixed_point;
      const double delta = std::min(1e-6 * std::max(1.0, std::abs(y)), 0.25 * (x_star - y));
      const auto plus = single_return(p, dir, x_star, y + delta, opts);
      const auto base = single_return(p, dir, x_star, y, opts);
      est.contraction_ratio = (plus && base) ? std::abs(*plus - *base) / delta : 0.0;
    }

    est.shape = folds.shape_class == ShapeClass::SShaped ? classify_cycle_shape(est.extent(), folds)
                                                          : CycleShape::None;
    result.status = SearchStatus::Converged;
    return result;
  }
  result.status = SearchStatus::NoConvergence;
  result.detail = "return-map extrapolation did not settle";
  return result;
}

constexpr double kMinAmplitudeJump = 4.0;

ParameterBracket bisect_parameter(std::pair<double, double> bracket,
                                  const std::function<double(double)>& measure,
                                  std::optional<double> threshold, double floor,
                                  const ExplosionOptions& opts) {
  ParameterBracket out;
  double lo = bracket.first;
  double hi = bracket.second;
  if (!(lo < hi)) {
    std::swap(lo, hi);
  }
  double v_lo = measure(lo);
  double v_hi = measure(hi);
  const double thr = threshold ? *threshold
                               : std::sqrt(std::max(v_lo, floor) * std::max(v_hi, floor));
  const bool side_lo = v_lo >= thr;
  // Without an explicit threshold the ends must differ by more than
  // kMinAmplitudeJump, otherwise both lie in the same regime.
  const double jump = std::max(v_lo, floor) / std::max(v_hi, floor);
  const bool no_jump = !threshold && jump < kMinAmplitudeJump && jump > 1.0 / kMinAmplitudeJump;
  if (no_jump || side_lo == (v_hi >= thr)) {
    std::ostringstream msg;
    msg.precision(12);
    msg << "both ends on the same side of threshold " << thr << " (values " << v_lo << ", "
        << v_hi << ")";
    throw BracketInvalid(msg.str());
  }
  int it = 0;
  for (; it < opts.max_iterations; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (hi - lo <= opts.resolution * std::max(1.0, std::abs(mid)) || mid <= lo || mid >= hi) {
      break;
    }
    const double v = measure(mid);
    if ((v >= thr) == side_lo) {
      lo = mid;
      v_lo = v;
    } else {
      hi = mid;
      v_hi = v;
    }
  }
  out.lo = lo;
  out.hi = hi;
  out.value_lo = v_lo;
  out.value_hi = v_hi;
  out.threshold = thr;
  out.iterations = it;
  return out;
}

}  // namespace

CycleOptions::CycleOptions() {
  integrator.rel_tol = 1e-10;
  integrator.abs_tol = 1e-13;
}

std::string_view to_string(CycleShape s) noexcept {
  switch (s) {
    case CycleShape::HopfSmall:
      return "HOPF_SMALL";
    case CycleShape::CanardNoHead:
      return "CANARD_NO_HEAD";
    case CycleShape::CanardWithHead:
      return "CANARD_WITH_HEAD";
    case CycleShape::Relaxation:
      return "RELAXATION";
    case CycleShape::None:
      return "NONE";
  }
  return "UNKNOWN";
}

std::string_view to_string(CycleStability s) noexcept {
  return s == CycleStability::Stable ? "STABLE" : "UNSTABLE";
}

State campaign_seed(const Params& p, double c) { return {0.4, c / p.f()}; }

State outer_seed(const Params& p) { return {0.99, 0.5 * equilibrium(p)}; }

LimitCycleEstimate find_limit_cycle(const Params& p, Direction time_direction, const State& seed,
                                    const CycleOptions& opts) {
  SearchResult r = search_cycle(p, time_direction, seed, opts);
  switch (r.status) {
    case SearchStatus::Converged:
      return std::move(r.estimate);
    case SearchStatus::Collapsed:
      throw ConvergedToEquilibrium(r.detail);
    case SearchStatus::Escaped:
    case SearchStatus::NoConvergence:
      throw NoConvergence(r.detail);
  }
  throw NoConvergence(r.detail);
}

NestedCyclesResult nested_cycles(const Params& p, const CycleOptions& opts) {
  NestedCyclesResult result;
  result.outer = find_limit_cycle(p, Direction::Forward, outer_seed(p), opts);
  const double x_star = equilibrium(p);
  try {
    LimitCycleEstimate inner =
        find_limit_cycle(p, Direction::Backward, {x_star + kInnerSeedOffset, x_star}, opts);
    if (inner.amplitude_x < result.outer.amplitude_x) {
      result.gap = result.outer.amplitude_x - inner.amplitude_x;
      result.inner = std::move(inner);
    }
  } catch (const ConvergedToEquilibrium&) {
  } catch (const NoConvergence&) {
  }
  return result;
}

std::vector<SweepRow> amplitude_sweep(double q, double eps, std::span<const double> f_values,
                                      const SweepOptions& opts) {
  auto evaluate = [&](double f, std::optional<double> seed_y) {
    const Params p(f, q, eps);
    SweepRow row;
    row.f = f;
    const double x_star = equilibrium(p);
    State seed = campaign_seed(p, opts.seed_constant);
    if (seed_y && *seed_y < x_star) {
      seed = {x_star, *seed_y};
    }
    SearchResult r = search_cycle(p, Direction::Forward, seed, opts.cycle);
    switch (r.status) {
      case SearchStatus::Converged:
        row.amplitude_x = r.estimate.amplitude_x;
        row.period = r.estimate.period;
        row.shape = r.estimate.shape;
        row.converged = true;
        return std::make_pair(row, std::optional<double>(r.estimate.section_fixed_point));
      case SearchStatus::Collapsed:
        row.converged = true;
        break;
      default:
        row.converged = false;
        break;
    }
    return std::make_pair(row, std::optional<double>());
  };

  std::vector<SweepRow> rows;
  rows.reserve(f_values.size());
  if (opts.continuation) {
    std::optional<double> seed_y;
    for (double f : f_values) {
      auto [row, next] = evaluate(f, seed_y);
      rows.push_back(row);
      seed_y = next;
    }
  } else {
    unsigned workers = opts.threads ? opts.threads : std::max(1u, std::thread::hardware_concurrency());
    std::vector<std::future<SweepRow>> pending;
    std::size_t next = 0;
    while (next < f_values.size() || !pending.empty()) {
      while (next < f_values.size() && pending.size() < workers) {
        const double f = f_values[next++];
        pending.push_back(std::async(std::launch::async, [&evaluate, f] {
          return evaluate(f, std::nullopt).first;
        }));
      }
      rows.push_back(pending.front().get());
      pending.erase(pending.begin());
    }
  }
  std::stable_sort(rows.begin(), rows.end(),
                   [](const SweepRow& a, const SweepRow& b) { return a.f < b.f; });
  return rows;
}

ParameterBracket locate_explosion(double q, double eps, std::pair<double, double> bracket,
                                  const ExplosionOptions& opts) {
  auto amplitude = [&](double f) {
    const Params p(f, q, eps);
    const SearchResult r =
        search_cycle(p, Direction::Forward, campaign_seed(p, opts.seed_constant), opts.cycle);
    if (r.status == SearchStatus::Collapsed || r.status == SearchStatus::Escaped) {
      return 0.0;
    }
    if (!r.has_loop) {
      throw NoConvergence("no loop measured at f=" + std::to_string(f));
    }
    return r.estimate.amplitude_x;
  };
  // Absent and Hopf-small cycles count as one regime for the log midpoint.
  const FoldReport folds = fold_points(q);
  const double floor = folds.shape_class == ShapeClass::SShaped
                           ? kHopfSmallFraction * (*folds.x2 - *folds.x1)
                           : 1e-12;
  return bisect_parameter(bracket, amplitude, opts.amplitude_threshold, floor, opts);
}

ParameterBracket locate_cycle_merge(double q, double eps, std::pair<double, double> bracket,
                                    const ExplosionOptions& opts) {
  auto outer_amplitude = [&](double f) {
    const Params p(f, q, eps);
    const SearchResult r = search_cycle(p, Direction::Forward, outer_seed(p), opts.cycle);
    if (r.status == SearchStatus::Collapsed || r.status == SearchStatus::Escaped) {
      return 0.0;
    }
    // Lingering near the merge still means the cycle (or its ghost) is there.
    return r.has_loop ? r.estimate.amplitude_x : 1.0;
  };
  std::optional<double> thr = opts.amplitude_threshold;
  if (!thr) {
    thr = 1e-3;
  }
  return bisect_parameter(bracket, outer_amplitude, thr, 1e-12, opts);
}

CycleShape classify_cycle_shape(const CycleExtent& e, const FoldReport& folds) {
  if (folds.shape_class != ShapeClass::SShaped) {
    throw InvalidArgument("shape classification requires an S-shaped critical curve");
  }
  const double x1 = *folds.x1;
  const double x2 = *folds.x2;
  const double width = x2 - x1;
  if (e.x_max - e.x_min < kHopfSmallFraction * width) {
    return CycleShape::HopfSmall;
  }
  if (e.x_max <= x2 + kRightBranchFraction * width) {
    return CycleShape::CanardNoHead;
  }
  // The right-most point is where the jump onto the right branch lands; its
  // height tells how far the orbit followed the middle branch first.
  const double landing = e.x_max < 1.0 ? curve_value(folds.q, e.x_max) : 0.0;
  const double head = (landing - *folds.y1) / (*folds.y2 - *folds.y1);
  if (e.x_min < x1 && head <= kRelaxationLandingFraction) {
    return CycleShape::Relaxation;
  }
  return CycleShape::CanardWithHead;
}

CycleShape classify_cycle_shape(std::span<const Sample> samples, const FoldReport& folds) {
  if (samples.empty()) {
    throw InvalidArgument("no samples to classify");
  }
  CycleExtent e{samples.front().x, samples.front().x, samples.front().y, samples.front().y};
  for (const Sample& s : samples) {
    e.x_min = std::min(e.x_min, s.x);
    e.x_max = std::max(e.x_max, s.x);
    e.y_min = std::min(e.y_min, s.y);
    e.y_max = std::max(e.y_max, s.y);
  }
  return classify_cycle_shape(e, folds);
}

}  // namespace bz
