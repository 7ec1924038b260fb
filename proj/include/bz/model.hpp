#pragma once

#include <array>

namespace bz {

/// Parameter triple of the reduced two-variable BZ system.
///
/// f is the stoichiometric parameter, q the kinetic parameter and eps the
/// time-scale ratio. All three must be positive; integration additionally
/// requires eps <= 0.1 (checked by the integrator, not here).
class Params {
 public:
  Params(double f, double q, double eps);

  double f() const noexcept { return f_; }
  double q() const noexcept { return q_; }
  double eps() const noexcept { return eps_; }

  Params with_f(double f) const { return Params(f, q_, eps_); }

 private:
  double f_;
  double q_;
  double eps_;
};

/// Largest eps admitted by the simulation routines.
inline constexpr double kMaxSimulationEps = 0.1;

/// A point of the phase plane. x is the fast variable, y the slow one.
struct State {
  double x = 0.0;
  double y = 0.0;
};

/// Right-hand side of a planar field, (dx, dy).
struct Rate {
  double x = 0.0;
  double y = 0.0;
};

using Matrix2 = std::array<std::array<double, 2>, 2>;

/// h(x) = f (q - x) / (q + x). Throws DomainError at x = -q.
double h_factor(const Params& p, double x);

/// dh/dx = -2 f q / (q + x)^2.
double h_factor_derivative(const Params& p, double x);

/// Fast-time field: dx/dtau = x(1-x) + h(x) y, dy/dtau = eps (x - y).
Rate fast_field(const Params& p, const State& s);

/// Polynomial field obtained with dtau = (q + x) ds:
/// x' = x(1-x)(q+x) + f(q-x) y, y' = eps (x - y)(q + x). Defined everywhere.
Rate polynomial_field(const Params& p, const State& s) noexcept;

/// Partial derivatives of fast_field.
Matrix2 jacobian(const Params& p, const State& s);

}  // namespace bz
