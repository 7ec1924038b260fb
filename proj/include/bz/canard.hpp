#pragma once

#include <string_view>

namespace bz {

enum class Criticality { Supercritical, Subcritical, Degenerate };
enum class FoldKind { Min, Max };

std::string_view to_string(Criticality c) noexcept;
std::string_view to_string(FoldKind k) noexcept;

/// Rescaling that brings the constant terms of the canard normal form to one.
struct RescaleFactors {
  double alpha = 0.0;  // u -> alpha u
  double beta = 0.0;   // v -> beta v
  double eta = 0.0;    // lambda -> eta lambda
  double xi = 0.0;     // t -> xi t
};

/// Normal-form data at a fold-adjacent equilibrium (all curve quantities are
/// f-free; f_star = C(x_star)/x_star).
struct CanardReport {
  double q = 0.0;
  double x_star = 0.0;
  double f_star = 0.0;
  RescaleFactors factors;
  double a2 = 0.0;
  double a3 = 0.0;
  double a4 = 0.0;
  double a5 = 0.0;
  double A = 0.0;               // closed form
  double A_coefficients = 0.0;  // -a2 + 3 a3 - 2 a4 - 2 a5
  Criticality criticality = Criticality::Degenerate;
};

/// |C''| below this raises DegenerateFold.
inline constexpr double kDegenerateCurvature = 1e-10;
/// |A| below this is labelled DEGENERATE.
inline constexpr double kDegenerateA = 1e-8;

RescaleFactors rescale_factors(double q, double x_star);

/// A from the closed-form expression.
double quantity_A(double q, double x_star);

/// A assembled from the normal-form coefficients a2..a5.
double quantity_A_from_coefficients(double q, double x_star);

CanardReport canard_report(double q, double x_star);

/// q in (0.01, q* - 1e-4) where A at the maximum fold changes sign.
double q_double_star(double tol = 1e-10);

/// Hopf criticality at the minimum or maximum fold for 0 < q < q*.
Criticality hopf_criticality(double q, FoldKind fold);

}  // namespace bz
