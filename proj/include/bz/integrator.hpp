#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string_view>
#include <vector>

#include "bz/model.hpp"

namespace bz {

/// Which of the two equivalent vector fields is integrated. FastTime is the
/// rational field in tau; PolynomialTime is the polynomial field in s with
/// dtau = (q + x) ds.
enum class Formulation { FastTime, PolynomialTime };
enum class Direction { Forward, Backward };
enum class Termination { TimeReached, Event, StepLimit, Blowup };

std::string_view to_string(Formulation f) noexcept;
std::string_view to_string(Termination t) noexcept;

/// |x| or |y| above this ends the run with Termination::Blowup.
inline constexpr double kBlowupThreshold = 1e6;

struct IntegratorOptions {
  double rel_tol = 1e-9;
  double abs_tol = 1e-12;
  double max_step = std::numeric_limits<double>::infinity();
  /// Length of the integration interval in the integration variable.
  double max_time = 1e4;
  std::int64_t max_steps = 50'000'000;
  Formulation formulation = Formulation::PolynomialTime;
  /// 0 selects the starting step automatically.
  double initial_step = 0.0;
  /// Extra interpolated samples stored between step endpoints by integrate().
  int dense_samples_per_step = 0;

  /// Throws InvalidArgument unless 0 < rel_tol < 1e-3, abs_tol > 0,
  /// max_time > 0, max_step > 0 and max_steps > 0.
  void validate() const;
};

struct Sample {
  double t = 0.0;
  double x = 0.0;
  double y = 0.0;
};

/// Samples ordered by integration progress. Timestamps increase for forward
/// runs and decrease for backward runs.
struct Trajectory {
  std::vector<Sample> samples;
  Termination termination = Termination::TimeReached;
  Formulation formulation = Formulation::PolynomialTime;
  /// Fast time elapsed between first and last sample (signed like t).
  double fast_time = 0.0;
  std::int64_t steps = 0;
};

/// One accepted step together with its continuous extension. Times are in the
/// reported (signed) time variable.
class StepView {
 public:
  double t0 = 0.0;
  double t1 = 0.0;
  State start;
  State end;
  /// Field at the endpoints, differentiated with respect to the reported time.
  Rate rate_start;
  Rate rate_end;
  double fast_time0 = 0.0;
  double fast_time1 = 0.0;

  /// Dense output at t in [t0, t1] (fourth order).
  State at(double t) const noexcept;
  /// Fast time at t in [t0, t1] (cubic Hermite on the clock rate).
  double fast_time_at(double t) const noexcept;

  // Interpolation coefficients, filled by the stepper.
  std::array<State, 5> coeff{};
  double clock0 = 1.0;
  double clock1 = 1.0;
};

/// Called after every accepted step; returning false stops the run with
/// Termination::Event.
using StepObserver = std::function<bool(const StepView&)>;

struct RunSummary {
  Termination termination = Termination::TimeReached;
  double t = 0.0;
  State state;
  double fast_time = 0.0;
  std::int64_t steps = 0;
};

/// Low-level adaptive driver (Dormand-Prince 5(4) with PI step control and
/// embedded error estimation). Requires p.eps() <= 0.1.
RunSummary drive(const Params& p, const State& s0, Direction direction,
                 const IntegratorOptions& opts, const StepObserver& observer);

/// Full trajectory from s0 over opts.max_time.
Trajectory integrate(const Params& p, const State& s0, Direction direction,
                     const IntegratorOptions& opts);

enum class Axis { X, Y };

/// A line {axis = level}, optionally restricted to a half-line through bounds
/// on the other coordinate. Direction +1 / -1 selects crossings where the
/// coordinate increases / decreases along the orbit as integrated; 0 accepts
/// both.
struct Section {
  Axis axis = Axis::X;
  double level = 0.0;
  int direction = 0;
  std::optional<double> other_min;
  std::optional<double> other_max;
};

struct SectionEvent {
  double t = 0.0;
  State state;
  double fast_time = 0.0;
  int direction = 0;
};

/// Refined crossing of the section inside one step, if any. A start point that
/// lies exactly on the section does not count.
std::optional<SectionEvent> find_crossing(const StepView& step, const Section& section);

/// First n crossings of the section. Throws NoCrossing when the run ends first.
std::vector<SectionEvent> integrate_to_section(const Params& p, const State& s0,
                                               const Section& section, int n_crossings,
                                               const IntegratorOptions& opts,
                                               Direction direction = Direction::Forward);

}  // namespace bz
