#include "bz/canard.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "bz/critical_geometry.hpp"
#include "bz/error.hpp"

namespace bz {

namespace {

constexpr double kBracketLo = 0.01;
constexpr double kBracketHiOffset = 1e-4;
constexpr int kPreScanPoints = 200;

struct FoldLocalData {
  double c = 0.0;   // C(x*)
  double c2 = 0.0;  // C''(x*)
  double c3 = 0.0;  // C'''(x*)
  double f_star = 0.0;
  double root = 0.0;  // sqrt((x*^2 - q^2) f*)
};

FoldLocalData local_data(double q, double x) {
  if (!(x > q) || !(x < 1.0)) {
    std::ostringstream msg;
    msg << "normal form requires q < x_star < 1 (q=" << q << ", x_star=" << x << ")";
    throw DomainError(msg.str());
  }
  FoldLocalData d;
  d.c = curve_value(q, x);
  d.c2 = curve_derivatives(q, x, 2);
  d.c3 = curve_derivatives(q, x, 3);
  if (std::abs(d.c2) < kDegenerateCurvature) {
    std::ostringstream msg;
    msg << "C''(x_star) = " << d.c2 << " vanishes (q=" << q << ")";
    throw DegenerateFold(msg.str());
  }
  d.f_star = d.c / x;
  const double radicand = (x * x - q * q) * d.f_star;
  if (!(radicand > 0.0)) {
    throw DomainError("(x_star^2 - q^2) f_star must be positive");
  }
  d.root = std::sqrt(radicand);
  return d;
}

double a_at_max_fold(double q) {
  const FoldReport folds = fold_points(q);
  if (!folds.x2) {
    std::ostringstream msg;
    msg << "no maximum fold at q=" << q;
    throw InvalidArgument(msg.str());
  }
  return quantity_A(q, *folds.x2);
}

}  // namespace

std::string_view to_string(Criticality c) noexcept {
  switch (c) {
    case Criticality::Supercritical:
      return "SUPERCRITICAL";
    case Criticality::Subcritical:
      return "SUBCRITICAL";
    case Criticality::Degenerate:
      return "DEGENERATE";
  }
  return "UNKNOWN";
}

std::string_view to_string(FoldKind k) noexcept {
  return k == FoldKind::Min ? "MIN" : "MAX";
}

RescaleFactors rescale_factors(double q, double x) {
  const FoldLocalData d = local_data(q, x);
  const double scale = d.c2 * (x - q);
  RescaleFactors r;
  r.alpha = 2.0 * d.root / scale;
  r.beta = 2.0 * d.f_star * (q + x) / scale;
  r.eta = 2.0 * d.f_star * d.root / (scale * x);
  r.xi = 1.0 / d.root;
  return r;
}

double quantity_A(double q, double x) {
  const FoldLocalData d = local_data(q, x);
  const double bracket = 2.0 / (x - q) + d.c3 / d.c2 - 2.0 / (x + q) + x * d.c2 / d.c;
  return bracket * 2.0 * d.root / (d.c2 * (x - q));
}

CanardReport canard_report(double q, double x) {
  const FoldLocalData d = local_data(q, x);
  CanardReport report;
  report.q = q;
  report.x_star = x;
  report.f_star = d.f_star;
  report.factors = rescale_factors(q, x);
  const double alpha = report.factors.alpha;
  report.a2 = alpha / (x - q);
  report.a3 = (1.0 / (x - q) + d.c3 / (3.0 * d.c2)) * alpha;
  report.a4 = alpha / (q + x);
  report.a5 = -(q + x) * report.factors.xi;
  report.A_coefficients = -report.a2 + 3.0 * report.a3 - 2.0 * report.a4 - 2.0 * report.a5;
  report.A = quantity_A(q, x);
  if (std::abs(report.A) < kDegenerateA) {
    report.criticality = Criticality::Degenerate;
  } else {
    report.criticality = report.A < 0.0 ? Criticality::Supercritical : Criticality::Subcritical;
  }
  return report;
}

double quantity_A_from_coefficients(double q, double x) {
  return canard_report(q, x).A_coefficients;
}

double q_double_star(double tol) {
  if (!(tol > 0.0)) {
    throw InvalidArgument("tol must be positive");
  }
  double lo = kBracketLo;
  const double hi_limit = q_star() - kBracketHiOffset;

  // Pre-scan for the (single) sign change.
  double a_prev = a_at_max_fold(lo);
  double prev = lo;
  bool found = false;
  double hi = hi_limit;
  for (int i = 1; i <= kPreScanPoints; ++i) {
    const double qi = kBracketLo + (hi_limit - kBracketLo) * i / kPreScanPoints;
    const double ai = a_at_max_fold(qi);
    if ((ai < 0.0) != (a_prev < 0.0)) {
      lo = prev;
      hi = qi;
      found = true;
      break;
    }
    prev = qi;
    a_prev = ai;
  }
  if (!found) {
    throw SignChangeNotFound("A at the maximum fold keeps its sign on the scan interval");
  }

  double a_lo = a_at_max_fold(lo);
  double mid = 0.5 * (lo + hi);
  for (int i = 0; i < 200; ++i) {
    mid = 0.5 * (lo + hi);
    const double a_mid = a_at_max_fold(mid);
    if (std::abs(a_mid) < tol || hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * mid) {
      break;
    }
    if ((a_mid < 0.0) == (a_lo < 0.0)) {
      lo = mid;
      a_lo = a_mid;
    } else {
      hi = mid;
    }
  }
  return mid;
}

Criticality hopf_criticality(double q, FoldKind fold) {
  const FoldReport folds = fold_points(q);
  if (folds.shape_class != ShapeClass::SShaped) {
    throw InvalidArgument("hopf_criticality requires 0 < q < q*");
  }
  const double x = fold == FoldKind::Min ? *folds.x1 : *folds.x2;
  return canard_report(q, x).criticality;
}

}  // namespace bz
