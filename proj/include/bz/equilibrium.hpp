#pragma once

#include <array>
#include <complex>
#include <optional>
#include <string_view>

#include "bz/model.hpp"

namespace bz {

enum class Strip { BelowOne, AboveOne, OnLineOne };  // (q,1), (1,q), x = 1
enum class Stability { StableNode, StableFocus, UnstableNode, UnstableFocus, WeakFocus };
enum class Regime { GloballyStable, Oscillatory, HopfCritical };

std::string_view to_string(Strip s) noexcept;
std::string_view to_string(Stability s) noexcept;
std::string_view to_string(Regime r) noexcept;

/// Singular-Hopf locations near the two folds.
struct HopfData {
  double x1_eps = 0.0;  // w = 0 root above the minimum fold
  double x2_eps = 0.0;  // w = 0 root below the maximum fold
  double d1 = 0.0;      // x1_eps - x1
  double d2 = 0.0;      // x2 - x2_eps
  double f_hm = 0.0;    // f placing the equilibrium at x1_eps
  double f_hM = 0.0;    // f placing the equilibrium at x2_eps
};

struct EquilibriumReport {
  double x_star = 0.0;
  Strip strip = Strip::BelowOne;
  std::array<std::complex<double>, 2> eigenvalues{};
  double w_value = 0.0;
  double determinant = 0.0;
  Stability stability = Stability::StableNode;
  Regime regime = Regime::GloballyStable;
  std::optional<HopfData> hopf;  // present when q < q* and the roots exist
};

/// |w| below this labels the equilibrium a weak focus (HOPF_CRITICAL).
inline constexpr double kWeakFocusTolerance = 1e-10;
/// Distance from x1_eps / x2_eps that still counts as the Hopf point.
inline constexpr double kHopfLocationTolerance = 1e-10;
/// Discriminant tolerance for the node/focus split.
inline constexpr double kDiscriminantTolerance = 1e-12;

/// Positive root of x^2 - (1 - q - f) x - q (1 + f) = 0.
double equilibrium(const Params& p);

/// f = (1 - x)(q + x)/(x - q): the f for which x is the equilibrium. q < x < 1.
double f_for_equilibrium(double q, double x);

/// Trace function w = eps - N(x) / ((q + x)(x - q)); the Jacobian trace at the
/// equilibrium is -w. Independent of f.
double trace_w(double q, double eps, double x);

/// Roots of w on (x1, x2). Throws InvalidArgument if q >= q*, NoHopfRoots if
/// eps is too large for w to change sign.
HopfData hopf_points(double q, double eps);

/// Spectrum, stability and regime of the positive equilibrium.
EquilibriumReport classify(const Params& p);

}  // namespace bz
