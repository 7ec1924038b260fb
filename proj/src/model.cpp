#include "bz/model.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "bz/error.hpp"

namespace bz {

namespace {

double guarded_denominator(double q, double x) {
  const double d = q + x;
  if (!(std::abs(d) >= std::numeric_limits<double>::min())) {
    throw DomainError("q + x vanishes at x = " + std::to_string(x));
  }
  return d;
}

}  // namespace

Params::Params(double f, double q, double eps) : f_(f), q_(q), eps_(eps) {
  if (!(f > 0.0) || !(q > 0.0) || !(eps > 0.0) || !std::isfinite(f) ||
      !std::isfinite(q) || !std::isfinite(eps)) {
    throw InvalidArgument("parameters must be finite and positive (f=" + std::to_string(f) +
                          ", q=" + std::to_string(q) + ", eps=" + std::to_string(eps) + ")");
  }
}

double h_factor(const Params& p, double x) {
  return p.f() * (p.q() - x) / guarded_denominator(p.q(), x);
}

double h_factor_derivative(const Params& p, double x) {
  const double d = guarded_denominator(p.q(), x);
  return -2.0 * p.f() * p.q() / (d * d);
}

Rate fast_field(const Params& p, const State& s) {
  return {s.x * (1.0 - s.x) + h_factor(p, s.x) * s.y, p.eps() * (s.x - s.y)};
}

Rate polynomial_field(const Params& p, const State& s) noexcept {
  const double qx = p.q() + s.x;
  return {s.x * (1.0 - s.x) * qx + p.f() * (p.q() - s.x) * s.y, p.eps() * (s.x - s.y) * qx};
}

Matrix2 jacobian(const Params& p, const State& s) {
  const double h = h_factor(p, s.x);
  const double dh = h_factor_derivative(p, s.x);
  return Matrix2{{{1.0 - 2.0 * s.x + dh * s.y, h}, {p.eps(), -p.eps()}}};
}

}  // namespace bz
