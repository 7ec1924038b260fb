#pragma once

#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "bz/critical_geometry.hpp"
#include "bz/integrator.hpp"
#include "bz/model.hpp"

namespace bz {

enum class CycleShape { HopfSmall, CanardNoHead, CanardWithHead, Relaxation, None };
enum class CycleStability { Stable, Unstable };

std::string_view to_string(CycleShape s) noexcept;
std::string_view to_string(CycleStability s) noexcept;

/// Documented shape thresholds, as fractions of the fold separation x2 - x1
/// (or of the fold height difference y2 - y1 for the landing test).
inline constexpr double kHopfSmallFraction = 0.1;
inline constexpr double kRightBranchFraction = 0.1;
inline constexpr double kRelaxationLandingFraction = 0.5;

struct CycleOptions {
  CycleOptions();

  IntegratorOptions integrator;
  int max_returns = 200;
  /// Successive section crossings closer than this (relative) end the search.
  double convergence_tol = 1e-9;
  /// Crossings within this distance of the equilibrium signal a collapse.
  double equilibrium_tol = 1e-8;
  /// Longest integration allowed between two crossings, in the integration
  /// variable. 0 picks 200/eps.
  double segment_time = 0.0;
  /// Aitken extrapolation of slowly converging return sequences.
  bool accelerate = true;
  /// Samples kept for the final loop (dense points per step).
  int loop_dense_samples = 2;
};

struct CycleExtent {
  double x_min = 0.0;
  double x_max = 0.0;
  double y_min = 0.0;
  double y_max = 0.0;
};

struct LimitCycleEstimate {
  /// y-coordinate of the cycle on the section {x = x*, y < x*}.
  double section_fixed_point = 0.0;
  double x_star = 0.0;
  /// Period in the integration time variable (see time_variable).
  double period = 0.0;
  Formulation time_variable = Formulation::PolynomialTime;
  /// Period in fast time tau.
  double period_fast_time = 0.0;
  double x_min = 0.0;
  double x_max = 0.0;
  double y_min = 0.0;
  double y_max = 0.0;
  double amplitude_x = 0.0;
  CycleStability stability = CycleStability::Stable;
  CycleShape shape = CycleShape::None;
  double contraction_ratio = 0.0;
  int returns = 0;
  /// One loop of the cycle, starting on the section.
  std::vector<Sample> loop;

  CycleExtent extent() const { return {x_min, x_max, y_min, y_max}; }
};

/// Limit cycle reached from seed in the given time direction by iterating the
/// return map of the section {x = x*, y < x*}. Unstable cycles are found in
/// backward time. Throws ConvergedToEquilibrium or NoConvergence.
LimitCycleEstimate find_limit_cycle(const Params& p, Direction time_direction, const State& seed,
                                    const CycleOptions& opts = {});

/// Seed (0.4, c/f) used by the simulation campaigns.
State campaign_seed(const Params& p, double c = 0.35);

/// Seed outside every cycle: near the right edge of the strip q < x < 1.
State outer_seed(const Params& p);

struct NestedCyclesResult {
  LimitCycleEstimate outer;
  std::optional<LimitCycleEstimate> inner;
  double gap = 0.0;  // outer.amplitude_x - inner.amplitude_x, 0 without inner
};

/// Stable outer cycle (forward, from outer_seed) and, when it exists, the
/// unstable inner cycle (backward, from E* + (1e-3, 0)).
NestedCyclesResult nested_cycles(const Params& p, const CycleOptions& opts = {});

struct SweepRow {
  double f = 0.0;
  double amplitude_x = 0.0;
  double period = 0.0;
  CycleShape shape = CycleShape::None;
  bool converged = false;
};

struct SweepOptions {
  CycleOptions cycle;
  /// Seed the next f with the previous cycle's section point.
  bool continuation = true;
  /// Constant c of the cold-start seed (0.4, c/f).
  double seed_constant = 0.35;
  /// Worker threads when continuation is off (0 = hardware concurrency).
  unsigned threads = 0;
};

/// One row per f, in ascending f. Rows without a cycle report amplitude 0 and
/// shape None; rows that fail to converge have converged = false.
std::vector<SweepRow> amplitude_sweep(double q, double eps, std::span<const double> f_values,
                                      const SweepOptions& opts = {});

/// Final bisection bracket of a parameter transition.
struct ParameterBracket {
  double lo = 0.0;
  double hi = 0.0;
  double value_lo = 0.0;  // measured quantity at lo
  double value_hi = 0.0;  // measured quantity at hi
  double threshold = 0.0;
  int iterations = 0;

  double width() const { return hi - lo; }
  bool contains(double f) const { return lo <= f && f <= hi; }
  double midpoint() const { return 0.5 * (lo + hi); }
};

struct ExplosionOptions {
  CycleOptions cycle;
  /// Amplitude separating the two regimes; empty picks the geometric mean of
  /// the end amplitudes.
  std::optional<double> amplitude_threshold;
  double seed_constant = 0.35;
  /// Stop once the bracket is this narrow (relative to |f|).
  double resolution = 1e-12;
  int max_iterations = 80;
};

/// Bisection in f on "stable-cycle amplitude_x >= threshold". Orientation of
/// the bracket is detected from its ends. Throws BracketInvalid if both ends
/// fall on the same side, or, with the default threshold, if their floored
/// amplitudes differ by less than a factor of 4.
ParameterBracket locate_explosion(double q, double eps, std::pair<double, double> bracket,
                                  const ExplosionOptions& opts = {});

/// Bisection in f on the existence of the stable outer cycle: brackets the
/// merge of the nested cycles (multiplicity-two cycle).
ParameterBracket locate_cycle_merge(double q, double eps, std::pair<double, double> bracket,
                                    const ExplosionOptions& opts = {});

/// Shape of a closed orbit relative to the folds of an S-shaped curve.
CycleShape classify_cycle_shape(const CycleExtent& extent, const FoldReport& folds);
CycleShape classify_cycle_shape(std::span<const Sample> samples, const FoldReport& folds);

}  // namespace bz
