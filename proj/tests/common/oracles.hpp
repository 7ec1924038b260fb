#pragma once

// Independent reference computations for the tests. Everything here works from
// the raw vector field or the raw curve formula with finite differences,
// grid scans and plain bisection, never through the library's closed forms.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <optional>
#include <vector>

#include <Eigen/Eigenvalues>

namespace oracle {

inline double curve(double q, double x) { return x * (1.0 - x) * (q + x) / (x - q); }

// Central differences of order 6 in h.
inline double d1(const std::function<double(double)>& g, double x, double h = 1e-4) {
  return (-g(x - 3 * h) + 9 * g(x - 2 * h) - 45 * g(x - h) + 45 * g(x + h) - 9 * g(x + 2 * h) +
          g(x + 3 * h)) /
         (60 * h);
}
inline double d2(const std::function<double(double)>& g, double x, double h = 1e-3) {
  return (2 * g(x - 3 * h) - 27 * g(x - 2 * h) + 270 * g(x - h) - 490 * g(x) + 270 * g(x + h) -
          27 * g(x + 2 * h) + 2 * g(x + 3 * h)) /
         (180 * h * h);
}
inline double d3(const std::function<double(double)>& g, double x, double h = 2e-3) {
  return (g(x - 3 * h) - 8 * g(x - 2 * h) + 13 * g(x - h) - 13 * g(x + h) + 8 * g(x + 2 * h) -
          g(x + 3 * h)) /
         (8 * h * h * h);
}

inline double bisect(const std::function<double(double)>& g, double a, double b, int iters = 200) {
  double ga = g(a);
  for (int i = 0; i < iters; ++i) {
    const double m = 0.5 * (a + b);
    if (m <= a || m >= b) break;
    const double gm = g(m);
    if ((gm < 0) == (ga < 0)) {
      a = m;
      ga = gm;
    } else {
      b = m;
    }
  }
  return 0.5 * (a + b);
}

// All sign changes of g on a uniform grid over (a, b), refined by bisection.
inline std::vector<double> roots_by_scan(const std::function<double(double)>& g, double a,
                                         double b, int n) {
  std::vector<double> roots;
  double x0 = a;
  double g0 = g(a);
  for (int i = 1; i <= n; ++i) {
    const double x1 = a + (b - a) * i / n;
    const double g1 = g(x1);
    if ((g0 < 0) != (g1 < 0)) roots.push_back(bisect(g, x0, x1));
    x0 = x1;
    g0 = g1;
  }
  return roots;
}

// Zeros of the curve slope on (q, 1), from finite differences of the raw curve.
inline std::vector<double> folds(double q, int n = 4000) {
  auto c = [q](double x) { return curve(q, x); };
  auto slope = [&](double x) { return d1(c, x, 1e-5 * std::min(1.0, x - q)); };
  const double lo = q + 1e-3 * q;
  return roots_by_scan(slope, lo, 1.0 - 1e-6, n);
}

// Largest slope of the curve on (q, 1), found by golden section on a bracket
// from a grid scan.
inline double max_slope(double q) {
  auto c = [q](double x) { return curve(q, x); };
  auto slope = [&](double x) { return d1(c, x, 1e-5); };
  double best_x = 0.0, best = -1e300;
  for (int i = 1; i < 2000; ++i) {
    const double x = q + (1.0 - q) * i / 2000.0;
    if (x - q < 1e-3) continue;
    const double s = slope(x);
    if (s > best) best = s, best_x = x;
  }
  double a = best_x - (1.0 - q) / 2000.0, b = best_x + (1.0 - q) / 2000.0;
  const double r = (std::sqrt(5.0) - 1) / 2;
  for (int i = 0; i < 100; ++i) {
    const double c1 = b - r * (b - a), c2 = a + r * (b - a);
    if (slope(c1) > slope(c2)) b = c2; else a = c1;
  }
  return slope(0.5 * (a + b));
}

// Raw polynomial-time field.
inline std::array<double, 2> poly_field(double f, double q, double eps, double x, double y) {
  return {x * (1 - x) * (q + x) + f * (q - x) * y, eps * (x - y) * (q + x)};
}

// Raw fast-time field.
inline std::array<double, 2> fast_field(double f, double q, double eps, double x, double y) {
  return {x * (1 - x) + f * (q - x) / (q + x) * y, eps * (x - y)};
}

// Finite-difference Jacobian of the fast-time field.
inline Eigen::Matrix2d jacobian_fd(double f, double q, double eps, double x, double y) {
  Eigen::Matrix2d j;
  const double h = 1e-6;
  auto fx = [&](double xx) { return fast_field(f, q, eps, xx, y); };
  auto fy = [&](double yy) { return fast_field(f, q, eps, x, yy); };
  for (int r = 0; r < 2; ++r) {
    j(r, 0) = (fx(x + h)[r] - fx(x - h)[r]) / (2 * h);
    j(r, 1) = (fy(y + h)[r] - fy(y - h)[r]) / (2 * h);
  }
  return j;
}

// Analytic Jacobian written out by hand (test-side), for 1e-12 comparisons.
inline Eigen::Matrix2d jacobian_exact(double f, double q, double eps, double x, double y) {
  Eigen::Matrix2d j;
  j << 1 - 2 * x - 2 * f * q / ((q + x) * (q + x)) * y, f * (q - x) / (q + x), eps, -eps;
  return j;
}

inline std::array<std::complex<double>, 2> eigenvalues(const Eigen::Matrix2d& m) {
  Eigen::EigenSolver<Eigen::Matrix2d> es(m, false);
  return {es.eigenvalues()[0], es.eigenvalues()[1]};
}

// Positive equilibrium by bisection on the x-nullcline restricted to y = x.
inline double equilibrium(double f, double q) {
  auto g = [&](double x) { return x * (1 - x) + f * (q - x) / (q + x) * x; };
  // Root lies between min(q,1) and max(q,1); g changes sign there.
  const double a = std::min(q, 1.0), b = std::max(q, 1.0);
  if (std::abs(a - b) < 1e-15) return a;
  return bisect(g, a, b, 300);
}

// Trace of the hand-written Jacobian at the bisected equilibrium.
inline double trace_at_equilibrium(double f, double q, double eps) {
  const double x = equilibrium(f, q);
  return jacobian_exact(f, q, eps, x, x).trace();
}

// Hopf values of f: sign changes of the trace scanned in f.
inline std::vector<double> hopf_f_values(double q, double eps, double f_lo, double f_hi,
                                         int n = 2000) {
  auto g = [&](double f) { return trace_at_equilibrium(f, q, eps); };
  return roots_by_scan(g, f_lo, f_hi, n);
}

// Canard quantity from finite-difference curve derivatives.
inline double quantity_A(double q, double x) {
  auto c = [q](double xx) { return curve(q, xx); };
  const double c2 = d2(c, x, 1e-2 * (x - q));
  const double c3 = d3(c, x, 1e-2 * (x - q));
  const double fs = c(x) / x;
  const double s = std::sqrt((x * x - q * q) * fs);
  const double alpha = 2 * s / (c2 * (x - q));
  const double xi = 1 / s;
  const double a2 = alpha / (x - q);
  const double a3 = (1 / (x - q) + c3 / (3 * c2)) * alpha;
  const double a4 = alpha / (q + x);
  const double a5 = -(q + x) * xi;
  return -a2 + 3 * a3 - 2 * a4 - 2 * a5;
}

// Classical RK4 with a fixed step on the polynomial field.
inline std::array<double, 2> rk4(double f, double q, double eps, std::array<double, 2> s, double T,
                                 int n) {
  const double h = T / n;
  auto F = [&](const std::array<double, 2>& u) { return poly_field(f, q, eps, u[0], u[1]); };
  for (int i = 0; i < n; ++i) {
    const auto k1 = F(s);
    const auto k2 = F({s[0] + h / 2 * k1[0], s[1] + h / 2 * k1[1]});
    const auto k3 = F({s[0] + h / 2 * k2[0], s[1] + h / 2 * k2[1]});
    const auto k4 = F({s[0] + h * k3[0], s[1] + h * k3[1]});
    s[0] += h / 6 * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0]);
    s[1] += h / 6 * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1]);
  }
  return s;
}

struct Pt {
  double x, y;
};

inline double point_segment(const Pt& p, const Pt& a, const Pt& b) {
  const double dx = b.x - a.x, dy = b.y - a.y;
  const double len2 = dx * dx + dy * dy;
  double t = len2 > 0 ? ((p.x - a.x) * dx + (p.y - a.y) * dy) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return std::hypot(p.x - a.x - t * dx, p.y - a.y - t * dy);
}

// Directed distance from the points of a to the polyline b (brute force).
inline double directed_hausdorff(const std::vector<Pt>& a, const std::vector<Pt>& b) {
  double worst = 0.0;
  for (const Pt& p : a) {
    double best = 1e300;
    for (std::size_t j = 0; j + 1 < b.size(); ++j) best = std::min(best, point_segment(p, b[j], b[j + 1]));
    worst = std::max(worst, best);
  }
  return worst;
}

inline double hausdorff(const std::vector<Pt>& a, const std::vector<Pt>& b) {
  return std::max(directed_hausdorff(a, b), directed_hausdorff(b, a));
}

}  // namespace oracle
