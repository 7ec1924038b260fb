#include "bz/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "bz/error.hpp"

namespace bz {

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5.0, c3 = 3.0 / 10.0, c4 = 4.0 / 5.0, c5 = 8.0 / 9.0;
constexpr double a21 = 1.0 / 5.0;
constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0, a53 = 64448.0 / 6561.0,
                 a54 = -212.0 / 729.0;
constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0,
                 a64 = 49.0 / 176.0, a65 = -5103.0 / 18656.0;
constexpr double b1 = 35.0 / 384.0, b3 = 500.0 / 1113.0, b4 = 125.0 / 192.0,
                 b5 = -2187.0 / 6784.0, b6 = 11.0 / 84.0;
constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                 e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;
// Continuous extension.
constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                 d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                 d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;

// PI controller constants.
constexpr double kSafety = 0.9;
constexpr double kBeta = 0.04;
constexpr double kExpo = 0.2 - kBeta * 0.75;
constexpr double kMinFactor = 0.2;   // hnew >= 0.2 h
constexpr double kMaxFactor = 10.0;  // hnew <= 10 h

constexpr int kEventBisections = 60;

struct Vec {
  double x, y;
};

inline Vec operator+(Vec a, Vec b) { return {a.x + b.x, a.y + b.y}; }
inline Vec operator*(double s, Vec a) { return {s * a.x, s * a.y}; }

// Field in the integration variable sigma, already carrying the time sign.
class Field {
 public:
  Field(const Params& p, Formulation f, double sign) : p_(p), formulation_(f), sign_(sign) {}

  Vec operator()(Vec u) const {
    const Rate r = formulation_ == Formulation::FastTime ? fast_field(p_, {u.x, u.y})
                                                         : polynomial_field(p_, {u.x, u.y});
    return {sign_ * r.x, sign_ * r.y};
  }

  // d(tau)/d(sigma), unsigned.
  double clock(double x) const {
    return formulation_ == Formulation::FastTime ? 1.0 : p_.q() + x;
  }

 private:
  const Params& p_;
  Formulation formulation_;
  double sign_;
};

double error_norm(Vec err, Vec y0, Vec y1, const IntegratorOptions& o) {
  const double sx = o.abs_tol + o.rel_tol * std::max(std::abs(y0.x), std::abs(y1.x));
  const double sy = o.abs_tol + o.rel_tol * std::max(std::abs(y0.y), std::abs(y1.y));
  const double ex = err.x / sx;
  const double ey = err.y / sy;
  return std::sqrt(0.5 * (ex * ex + ey * ey));
}

double rms_scaled(Vec v, Vec y, const IntegratorOptions& o) {
  const double sx = o.abs_tol + o.rel_tol * std::abs(y.x);
  const double sy = o.abs_tol + o.rel_tol * std::abs(y.y);
  return std::sqrt(0.5 * ((v.x / sx) * (v.x / sx) + (v.y / sy) * (v.y / sy)));
}

// Starting step heuristic (Hairer, Norsett & Wanner).
double initial_step(const Field& field, Vec y0, Vec f0, const IntegratorOptions& o, double hmax) {
  const double dnf = rms_scaled(f0, y0, o);
  const double dny = rms_scaled(y0, y0, o);
  double h = (dnf <= 1e-10 || dny <= 1e-10) ? 1e-6 : 0.01 * dny / dnf;
  h = std::min(h, hmax);
  const Vec f1 = field(y0 + h * f0);
  const double der2 = rms_scaled(Vec{f1.x - f0.x, f1.y - f0.y}, y0, o) / h;
  const double der = std::max(std::abs(der2), dnf);
  const double h1 = der <= 1e-15 ? std::max(1e-6, h * 1e-3) : std::pow(0.01 / der, 0.2);
  return std::min({100.0 * h, h1, hmax});
}

bool blown_up(Vec y) {
  return !std::isfinite(y.x) || !std::isfinite(y.y) || std::abs(y.x) > kBlowupThreshold ||
         std::abs(y.y) > kBlowupThreshold;
}

double coordinate(const State& s, Axis axis) { return axis == Axis::X ? s.x : s.y; }
double other_coordinate(const State& s, Axis axis) { return axis == Axis::X ? s.y : s.x; }

}  // namespace

std::string_view to_string(Formulation f) noexcept {
  return f == Formulation::FastTime ? "FAST_TIME" : "POLYNOMIAL_TIME";
}

std::string_view to_string(Termination t) noexcept {
  switch (t) {
    case Termination::TimeReached:
      return "TIME_REACHED";
    case Termination::Event:
      return "EVENT";
    case Termination::StepLimit:
      return "STEP_LIMIT";
    case Termination::Blowup:
      return "BLOWUP";
  }
  return "UNKNOWN";
}

void IntegratorOptions::validate() const {
  std::ostringstream msg;
  if (!(rel_tol > 0.0 && rel_tol < 1e-3)) {
    msg << "rel_tol must lie in (0, 1e-3), got " << rel_tol;
  } else if (!(abs_tol > 0.0)) {
    msg << "abs_tol must be positive, got " << abs_tol;
  } else if (!(max_time > 0.0)) {
    msg << "max_time must be positive, got " << max_time;
  } else if (!(max_step > 0.0)) {
    msg << "max_step must be positive, got " << max_step;
  } else if (max_steps <= 0) {
    msg << "max_steps must be positive, got " << max_steps;
  } else if (dense_samples_per_step < 0) {
    msg << "dense_samples_per_step must be non-negative";
  } else if (initial_step < 0.0) {
    msg << "initial_step must be non-negative";
  } else {
    return;
  }
  throw InvalidArgument(msg.str());
}

State StepView::at(double t) const noexcept {
  const double span = t1 - t0;
  const double theta = span == 0.0 ? 0.0 : (t - t0) / span;
  const double theta1 = 1.0 - theta;
  auto eval = [&](double r1, double r2, double r3, double r4, double r5) {
    return r1 + theta * (r2 + theta1 * (r3 + theta * (r4 + theta1 * r5)));
  };
  return {eval(coeff[0].x, coeff[1].x, coeff[2].x, coeff[3].x, coeff[4].x),
          eval(coeff[0].y, coeff[1].y, coeff[2].y, coeff[3].y, coeff[4].y)};
}

double StepView::fast_time_at(double t) const noexcept {
  const double span = t1 - t0;
  if (span == 0.0) {
    return fast_time0;
  }
  const double s = (t - t0) / span;
  const double h00 = 2 * s * s * s - 3 * s * s + 1;
  const double h10 = s * s * s - 2 * s * s + s;
  const double h01 = -2 * s * s * s + 3 * s * s;
  const double h11 = s * s * s - s * s;
  // The clock is d(tau)/d(t) in magnitude; t and tau share a sign.
  return h00 * fast_time0 + h10 * span * clock0 + h01 * fast_time1 + h11 * span * clock1;
}

RunSummary drive(const Params& p, const State& s0, Direction direction,
                 const IntegratorOptions& opts, const StepObserver& observer) {
  opts.validate();
  if (p.eps() > kMaxSimulationEps) {
    std::ostringstream msg;
    msg << "simulation requires eps <= " << kMaxSimulationEps << ", got " << p.eps();
    throw InvalidArgument(msg.str());
  }
  if (!std::isfinite(s0.x) || !std::isfinite(s0.y)) {
    throw InvalidArgument("initial state must be finite");
  }

  const double sign = direction == Direction::Forward ? 1.0 : -1.0;
  const Field field(p, opts.formulation, sign);
  const double horizon = opts.max_time;
  const double hmax = std::min(opts.max_step, horizon);

  RunSummary run;
  Vec y{s0.x, s0.y};
  Vec k1 = field(y);
  double sigma = 0.0;
  double tau = 0.0;
  double h = opts.initial_step > 0.0 ? std::min(opts.initial_step, hmax)
                                     : initial_step(field, y, k1, opts, hmax);
  double facold = 1e-4;
  bool last_rejected = false;
  StepView view;

  auto finish = [&](Termination t) {
    run.termination = t;
    run.t = sign * sigma;
    run.state = {y.x, y.y};
    run.fast_time = sign * tau;
    return run;
  };

  if (blown_up(y)) {
    return finish(Termination::Blowup);
  }

  bool trial_blew_up = false;
  while (sigma < horizon) {
    if (run.steps >= opts.max_steps) {
      return finish(Termination::StepLimit);
    }
    bool final_step = false;
    if (sigma + h >= horizon) {
      h = horizon - sigma;
      final_step = true;
    }
    if (h <= std::abs(sigma) * 1e-15 || h <= 0.0) {
      // Step collapse while trials overshoot the threshold is a finite-time
      // singularity, not stiffness.
      return finish(trial_blew_up ? Termination::Blowup : Termination::StepLimit);
    }

    const Vec k2 = field(y + (h * a21) * k1);
    const Vec k3 = field(y + h * (a31 * k1 + a32 * k2));
    const Vec k4 = field(y + h * (a41 * k1 + a42 * k2 + a43 * k3));
    const Vec k5 = field(y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
    const Vec k6 = field(y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
    const Vec y1 = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    const Vec k7 = field(y1);
    const Vec err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
    trial_blew_up = blown_up(y1);
    const double en = trial_blew_up ? 2.0 : error_norm(err, y, y1, opts);
    ++run.steps;

    const double fac11 = std::pow(std::max(en, 1e-300), kExpo);
    if (en <= 1.0) {
      // Fast-time increment by the step's own quadrature weights on the stage
      // values of x (b2 = 0).
      double dtau = h;
      if (opts.formulation == Formulation::PolynomialTime) {
        const double x3 = y.x + h * (a31 * k1.x + a32 * k2.x);
        const double x4 = y.x + h * (a41 * k1.x + a42 * k2.x + a43 * k3.x);
        const double x5 = y.x + h * (a51 * k1.x + a52 * k2.x + a53 * k3.x + a54 * k4.x);
        const double x6 =
            y.x + h * (a61 * k1.x + a62 * k2.x + a63 * k3.x + a64 * k4.x + a65 * k5.x);
        dtau = h * (b1 * field.clock(y.x) + b3 * field.clock(x3) + b4 * field.clock(x4) +
                    b5 * field.clock(x5) + b6 * field.clock(x6));
      }

      view.t0 = sign * sigma;
      view.t1 = sign * (sigma + h);
      view.start = {y.x, y.y};
      view.end = {y1.x, y1.y};
      view.rate_start = {sign * k1.x, sign * k1.y};
      view.rate_end = {sign * k7.x, sign * k7.y};
      view.fast_time0 = sign * tau;
      view.fast_time1 = sign * (tau + dtau);
      view.clock0 = field.clock(y.x);
      view.clock1 = field.clock(y1.x);
      const Vec ydiff{y1.x - y.x, y1.y - y.y};
      const Vec bspl{h * k1.x - ydiff.x, h * k1.y - ydiff.y};
      const Vec r5 = h * (d1 * k1 + d3 * k3 + d4 * k4 + d5 * k5 + d6 * k6 + d7 * k7);
      view.coeff[0] = {y.x, y.y};
      view.coeff[1] = {ydiff.x, ydiff.y};
      view.coeff[2] = {bspl.x, bspl.y};
      view.coeff[3] = {ydiff.x - h * k7.x - bspl.x, ydiff.y - h * k7.y - bspl.y};
      view.coeff[4] = {r5.x, r5.y};

      sigma = final_step ? horizon : sigma + h;
      tau += dtau;
      y = y1;
      k1 = k7;

      if (blown_up(y)) {
        if (observer) {
          observer(view);
        }
        return finish(Termination::Blowup);
      }
      if (observer && !observer(view)) {
        return finish(Termination::Event);
      }

      double fac = fac11 / std::pow(facold, kBeta);
      fac = std::clamp(fac / kSafety, 1.0 / kMaxFactor, 1.0 / kMinFactor);
      double hnew = h / fac;
      facold = std::max(en, 1e-4);
      if (last_rejected) {
        hnew = std::min(hnew, h);
      }
      last_rejected = false;
      h = std::min(hnew, hmax);
    } else {
      h = h / std::min(1.0 / kMinFactor, fac11 / kSafety);
      last_rejected = true;
    }
  }
  return finish(Termination::TimeReached);
}

Trajectory integrate(const Params& p, const State& s0, Direction direction,
                     const IntegratorOptions& opts) {
  Trajectory traj;
  traj.formulation = opts.formulation;
  traj.samples.push_back({0.0, s0.x, s0.y});
  const int extra = opts.dense_samples_per_step;
  const RunSummary run = drive(p, s0, direction, opts, [&](const StepView& step) {
    for (int i = 1; i <= extra; ++i) {
      const double t = step.t0 + (step.t1 - step.t0) * i / (extra + 1);
      const State s = step.at(t);
      traj.samples.push_back({t, s.x, s.y});
    }
    traj.samples.push_back({step.t1, step.end.x, step.end.y});
    return true;
  });
  traj.termination = run.termination;
  traj.fast_time = run.fast_time;
  traj.steps = run.steps;
  return traj;
}

std::optional<SectionEvent> find_crossing(const StepView& step, const Section& section) {
  const double g0 = coordinate(step.start, section.axis) - section.level;
  const double g1 = coordinate(step.end, section.axis) - section.level;
  int dir = 0;
  if (g0 < 0.0 && g1 >= 0.0) {
    dir = 1;
  } else if (g0 > 0.0 && g1 <= 0.0) {
    dir = -1;
  } else {
    return std::nullopt;
  }
  if (section.direction != 0 && section.direction != dir) {
    return std::nullopt;
  }

  double a = step.t0;
  double b = step.t1;
  if (g1 != 0.0) {
    for (int i = 0; i < kEventBisections; ++i) {
      const double m = 0.5 * (a + b);
      const double gm = coordinate(step.at(m), section.axis) - section.level;
      if ((gm < 0.0) == (g0 < 0.0) && gm != 0.0) {
        a = m;
      } else {
        b = m;
      }
    }
  }
  SectionEvent event;
  event.t = b;
  event.state = step.at(b);
  if (section.axis == Axis::X) {
    event.state.x = section.level;
  } else {
    event.state.y = section.level;
  }
  event.fast_time = step.fast_time_at(b);
  event.direction = dir;

  const double other = other_coordinate(event.state, section.axis);
  if ((section.other_min && !(other > *section.other_min)) ||
      (section.other_max && !(other < *section.other_max))) {
    return std::nullopt;
  }
  return event;
}

std::vector<SectionEvent> integrate_to_section(const Params& p, const State& s0,
                                               const Section& section, int n_crossings,
                                               const IntegratorOptions& opts,
                                               Direction direction) {
  if (n_crossings < 1) {
    throw InvalidArgument("n_crossings must be at least 1");
  }
  if (!std::isfinite(section.level)) {
    throw InvalidArgument("section level must be finite");
  }
  std::vector<SectionEvent> events;
  const RunSummary run = drive(p, s0, direction, opts, [&](const StepView& step) {
    if (auto e = find_crossing(step, section)) {
      events.push_back(*e);
    }
    return static_cast<int>(events.size()) < n_crossings;
  });
  if (static_cast<int>(events.size()) < n_crossings) {
    std::ostringstream msg;
    msg << "run ended (" << to_string(run.termination) << ") after " << events.size() << " of "
        << n_crossings << " crossings";
    throw NoCrossing(msg.str());
  }
  return events;
}

}  // namespace bz
