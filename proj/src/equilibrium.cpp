#include "bz/equilibrium.hpp"

#include <cmath>
#include <sstream>

#include "bz/critical_geometry.hpp"
#include "bz/error.hpp"

namespace bz {

namespace {

constexpr int kHopfBisectionIterations = 100;

// Minimiser of w on [a, b]. w - eps = -N/((q+x)(x-q)) is unimodal between the
// folds.
double argmin_w(double q, double eps, double a, double b) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = trace_w(q, eps, c);
  double fd = trace_w(q, eps, d);
  for (int i = 0; i < 200 && (b - a) > 1e-14; ++i) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = trace_w(q, eps, c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = trace_w(q, eps, d);
    }
  }
  return 0.5 * (a + b);
}

double bisect_w(double q, double eps, double a, double b) {
  double wa = trace_w(q, eps, a);
  for (int i = 0; i < kHopfBisectionIterations; ++i) {
    const double m = 0.5 * (a + b);
    const double wm = trace_w(q, eps, m);
    if (wm == 0.0) {
      return m;
    }
    if ((wm < 0.0) == (wa < 0.0)) {
      a = m;
      wa = wm;
    } else {
      b = m;
    }
  }
  return 0.5 * (a + b);
}

}  // namespace

std::string_view to_string(Strip s) noexcept {
  switch (s) {
    case Strip::BelowOne:
      return "(q,1)";
    case Strip::AboveOne:
      return "(1,q)";
    case Strip::OnLineOne:
      return "x=1";
  }
  return "UNKNOWN";
}

std::string_view to_string(Stability s) noexcept {
  switch (s) {
    case Stability::StableNode:
      return "STABLE_NODE";
    case Stability::StableFocus:
      return "STABLE_FOCUS";
    case Stability::UnstableNode:
      return "UNSTABLE_NODE";
    case Stability::UnstableFocus:
      return "UNSTABLE_FOCUS";
    case Stability::WeakFocus:
      return "WEAK_FOCUS";
  }
  return "UNKNOWN";
}

std::string_view to_string(Regime r) noexcept {
  switch (r) {
    case Regime::GloballyStable:
      return "GLOBALLY_STABLE";
    case Regime::Oscillatory:
      return "OSCILLATORY";
    case Regime::HopfCritical:
      return "HOPF_CRITICAL";
  }
  return "UNKNOWN";
}

double equilibrium(const Params& p) {
  const double b = 1.0 - p.q() - p.f();
  const double c = p.q() * (1.0 + p.f());
  const double root = std::sqrt(b * b + 4.0 * c);
  // Avoid cancellation when b is negative.
  return b >= 0.0 ? 0.5 * (b + root) : 2.0 * c / (root - b);
}

double f_for_equilibrium(double q, double x) {
  if (!(x > q) || !(x < 1.0)) {
    std::ostringstream msg;
    msg << "f_for_equilibrium requires q < x < 1 (q=" << q << ", x=" << x << ")";
    throw DomainError(msg.str());
  }
  return (1.0 - x) * (q + x) / (x - q);
}

double trace_w(double q, double eps, double x) {
  const double denom = (q + x) * (x - q);
  if (denom == 0.0) {
    std::ostringstream msg;
    msg << "trace_w has a pole at x=" << x << " (q=" << q << ")";
    throw DomainError(msg.str());
  }
  return eps - FoldCubic(q)(x) / denom;
}

HopfData hopf_points(double q, double eps) {
  const FoldReport folds = fold_points(q);
  if (folds.shape_class != ShapeClass::SShaped) {
    throw InvalidArgument("hopf_points requires 0 < q < q*");
  }
  const double x1 = *folds.x1;
  const double x2 = *folds.x2;
  const double split = argmin_w(q, eps, x1, x2);
  const double w_min = trace_w(q, eps, split);
  if (!(w_min < 0.0)) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "w has no sign change on (x1, x2); eps must be below " << (eps - w_min);
    throw NoHopfRoots(msg.str());
  }
  HopfData data;
  data.x1_eps = bisect_w(q, eps, x1, split);
  data.x2_eps = bisect_w(q, eps, split, x2);
  data.d1 = data.x1_eps - x1;
  data.d2 = x2 - data.x2_eps;
  data.f_hm = f_for_equilibrium(q, data.x1_eps);
  data.f_hM = f_for_equilibrium(q, data.x2_eps);
  return data;
}

EquilibriumReport classify(const Params& p) {
  EquilibriumReport report;
  const double x = equilibrium(p);
  report.x_star = x;
  if (std::abs(p.q() - 1.0) <= kShapeTieTolerance) {
    report.strip = Strip::OnLineOne;
  } else {
    report.strip = p.q() < 1.0 ? Strip::BelowOne : Strip::AboveOne;
  }

  const Matrix2 j = jacobian(p, {x, x});
  const double trace = j[0][0] + j[1][1];
  const double det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
  report.w_value = -trace;
  report.determinant = det;
  const double disc = trace * trace - 4.0 * det;
  if (disc >= -kDiscriminantTolerance) {
    const double root = std::sqrt(std::max(disc, 0.0));
    // Larger-magnitude root first, the other from the product to avoid
    // cancellation.
    const double big = trace >= 0.0 ? 0.5 * (trace + root) : 0.5 * (trace - root);
    const double small = big != 0.0 ? det / big : 0.0;
    report.eigenvalues = {std::complex<double>(big, 0.0), std::complex<double>(small, 0.0)};
  } else {
    const double im = 0.5 * std::sqrt(-disc);
    report.eigenvalues = {std::complex<double>(0.5 * trace, im),
                          std::complex<double>(0.5 * trace, -im)};
  }

  const bool focus = disc < -kDiscriminantTolerance;
  if (focus && std::abs(report.w_value) < kWeakFocusTolerance) {
    report.stability = Stability::WeakFocus;
  } else if (report.w_value > 0.0) {
    report.stability = focus ? Stability::StableFocus : Stability::StableNode;
  } else {
    report.stability = focus ? Stability::UnstableFocus : Stability::UnstableNode;
  }

  report.regime = Regime::GloballyStable;
  if (classify_shape(p.q()) == ShapeClass::SShaped) {
    try {
      const HopfData hopf = hopf_points(p.q(), p.eps());
      report.hopf = hopf;
      const bool at_hopf = std::abs(x - hopf.x1_eps) <= kHopfLocationTolerance ||
                           std::abs(x - hopf.x2_eps) <= kHopfLocationTolerance ||
                           report.stability == Stability::WeakFocus;
      if (at_hopf) {
        report.regime = Regime::HopfCritical;
      } else if (x > hopf.x1_eps && x < hopf.x2_eps) {
        report.regime = Regime::Oscillatory;
      }
    } catch (const NoHopfRoots&) {
      // w > 0 everywhere: the equilibrium is stable wherever it sits.
    }
  }
  return report;
}

}  // namespace bz
