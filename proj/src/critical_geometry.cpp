#include "bz/critical_geometry.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "bz/error.hpp"

namespace bz {

namespace {

constexpr int kScanPoints = 512;
constexpr double kScanMargin = 1e-9;
constexpr int kBisectionIterations = 80;

double pole_offset(double q, double x) {
  const double d = x - q;
  if (d == 0.0) {
    throw DomainError("critical curve has a pole at x = q = " + std::to_string(q));
  }
  return d;
}

// Bisection of a function with a sign change on [a, b], then one Newton step
// that is kept only if it lowers the residual.
double bracketed_root(const FoldCubic& n, double a, double b) {
  double fa = n(a);
  for (int i = 0; i < kBisectionIterations; ++i) {
    const double m = 0.5 * (a + b);
    const double fm = n(m);
    if (fm == 0.0) {
      return m;
    }
    if ((fm < 0.0) == (fa < 0.0)) {
      a = m;
      fa = fm;
    } else {
      b = m;
    }
  }
  const double x = 0.5 * (a + b);
  const double d = n.derivative(x);
  if (d != 0.0) {
    const double polished = x - n(x) / d;
    if (std::abs(n(polished)) < std::abs(n(x))) {
      return polished;
    }
  }
  return x;
}

// Minimiser of |N| on [a, b] by golden-section search.
double golden_min_abs(const FoldCubic& n, double a, double b) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = std::abs(n(c));
  double fd = std::abs(n(d));
  for (int i = 0; i < 200 && (b - a) > 1e-15; ++i) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = std::abs(n(c));
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = std::abs(n(d));
    }
  }
  return 0.5 * (a + b);
}

}  // namespace

std::string_view to_string(ShapeClass c) noexcept {
  switch (c) {
    case ShapeClass::SShaped:
      return "S_SHAPED";
    case ShapeClass::Degenerate:
      return "DEGENERATE";
    case ShapeClass::MonotoneDecreasing:
      return "MONOTONE_DECREASING";
    case ShapeClass::LinePlusParabola:
      return "LINE_PLUS_PARABOLA";
    case ShapeClass::MonotoneIncreasing:
      return "MONOTONE_INCREASING";
  }
  return "UNKNOWN";
}

double FoldCubic::operator()(double x) const noexcept {
  return ((-2.0 * x + (1.0 + 2.0 * q_)) * x + 2.0 * q_ * (q_ - 1.0)) * x - q_ * q_;
}

double FoldCubic::derivative(double x) const noexcept {
  return (-6.0 * x + 2.0 * (1.0 + 2.0 * q_)) * x + 2.0 * q_ * (q_ - 1.0);
}

std::array<double, 4> FoldCubic::coefficients() const noexcept {
  return {-2.0, 1.0 + 2.0 * q_, 2.0 * q_ * (q_ - 1.0), -q_ * q_};
}

int FoldReport::fold_count() const noexcept {
  if (x0) {
    return 1;
  }
  return (x1 ? 1 : 0) + (x2 ? 1 : 0);
}

Branch FoldReport::branch_of(double x) const {
  if (shape_class != ShapeClass::SShaped) {
    throw InvalidArgument("branch_of requires an S-shaped critical curve");
  }
  if (x < *x1) {
    return Branch::Left;
  }
  if (x > *x2) {
    return Branch::Right;
  }
  if (x == *x1 || x == *x2) {
    return Branch::Fold;
  }
  return Branch::Middle;
}

// The curve is written as a polynomial part plus a simple pole:
//   x(1-x)(q+x)/(x-q) = -x^2 + (1-2q) x + 2q(1-q) + R/(x-q),  R = 2q^2(1-q),
// which gives short exact derivatives.
double curve_value(double q, double x, std::optional<double> f) {
  const double d = pole_offset(q, x);
  const double value = x * (1.0 - x) * (q + x) / d;
  return f ? value / *f : value;
}

double curve_derivatives(double q, double x, int order, std::optional<double> f) {
  const double d = pole_offset(q, x);
  const double r = 2.0 * q * q * (1.0 - q);
  double value = 0.0;
  switch (order) {
    case 1:
      value = -2.0 * x + (1.0 - 2.0 * q) - r / (d * d);
      break;
    case 2:
      value = -2.0 + 2.0 * r / (d * d * d);
      break;
    case 3:
      value = -6.0 * r / (d * d * d * d);
      break;
    default:
      throw InvalidArgument("derivative order must be 1, 2 or 3");
  }
  return f ? value / *f : value;
}

double q_star() noexcept {
  return -0.2 + 0.6 * std::cbrt(2.0) - 0.3 * std::cbrt(4.0);
}

ShapeClass classify_shape(double q) {
  if (!(q > 0.0)) {
    throw InvalidArgument("q must be positive");
  }
  const double qs = q_star();
  if (std::abs(q - qs) <= kShapeTieTolerance) {
    return ShapeClass::Degenerate;
  }
  if (q < qs) {
    return ShapeClass::SShaped;
  }
  if (std::abs(q - 1.0) <= kShapeTieTolerance) {
    return ShapeClass::LinePlusParabola;
  }
  return q < 1.0 ? ShapeClass::MonotoneDecreasing : ShapeClass::MonotoneIncreasing;
}

FoldReport fold_points(double q) {
  FoldReport report;
  report.q = q;
  report.shape_class = classify_shape(q);
  const FoldCubic n(q);

  if (report.shape_class == ShapeClass::Degenerate) {
    // |N| is flat to second order at a double root, so the golden-section
    // minimiser is only good to ~1e-8; polish it as the simple root of N'.
    double x0 = golden_min_abs(n, q + kScanMargin, 1.0 - kScanMargin);
    for (int i = 0; i < 4; ++i) {
      const double second = -12.0 * x0 + 2.0 * (1.0 + 2.0 * q);
      if (second == 0.0) break;
      x0 -= n.derivative(x0) / second;
    }
    report.x0 = x0;
    return report;
  }
  if (report.shape_class != ShapeClass::SShaped) {
    return report;
  }

  // Uniform grid plus the interior maximum of N, so that the two roots are
  // bracketed even when they nearly coincide (q close to q*).
  const double lo = q + kScanMargin;
  const double hi = 1.0 - kScanMargin;
  std::vector<double> grid;
  grid.reserve(kScanPoints + 1);
  for (int i = 0; i < kScanPoints; ++i) {
    grid.push_back(lo + (hi - lo) * i / (kScanPoints - 1));
  }
  const double peak = n.local_max_point();
  if (peak > lo && peak < hi) {
    auto it = std::lower_bound(grid.begin(), grid.end(), peak);
    grid.insert(it, peak);
  }

  std::vector<double> roots;
  for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
    const double a = grid[i];
    const double b = grid[i + 1];
    const double na = n(a);
    const double nb = n(b);
    if (na == 0.0) {
      roots.push_back(a);
    } else if ((na < 0.0) != (nb < 0.0) && nb != 0.0) {
      roots.push_back(bracketed_root(n, a, b));
    }
  }
  if (roots.size() == 2) {
    report.x1 = roots[0];
    report.x2 = roots[1];
    report.y1 = curve_value(q, roots[0]);
    report.y2 = curve_value(q, roots[1]);
  } else if (roots.size() == 1) {
    // Tangency resolved below the tie tolerance: treat as degenerate.
    report.shape_class = ShapeClass::Degenerate;
    report.x0 = roots[0];
  } else if (roots.empty()) {
    report.shape_class = ShapeClass::MonotoneDecreasing;
  }
  return report;
}

double right_branch_point(const FoldReport& folds, double y) {
  if (folds.shape_class != ShapeClass::SShaped) {
    throw InvalidArgument("right_branch_point requires an S-shaped critical curve");
  }
  const double q = folds.q;
  // The f-free curve decreases from y2 at x2 to 0 at x = 1.
  double a = *folds.x2;
  double b = 1.0;
  if (y >= *folds.y2) {
    return a;
  }
  if (y <= 0.0) {
    return b;
  }
  for (int i = 0; i < 200 && b - a > 1e-15; ++i) {
    const double m = 0.5 * (a + b);
    if (curve_value(q, m) > y) {
      a = m;
    } else {
      b = m;
    }
  }
  return 0.5 * (a + b);
}

}  // namespace bz
