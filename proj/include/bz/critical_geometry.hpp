#pragma once

#include <array>
#include <optional>
#include <string_view>

namespace bz {

/// Shape of the critical curve as a function of q.
enum class ShapeClass {
  SShaped,             // 0 < q < q*
  Degenerate,          // q = q*
  MonotoneDecreasing,  // q* < q < 1
  LinePlusParabola,    // q = 1
  MonotoneIncreasing,  // q > 1
};

std::string_view to_string(ShapeClass c) noexcept;

/// Branch of the S-shaped curve a point belongs to (left attracting, middle
/// repelling, right attracting). The right branch is x > x2.
enum class Branch { Left, Middle, Right, Fold };

/// Numerator N(x) = -2x^3 + (1+2q)x^2 + 2q(q-1)x - q^2 of C'(x) (x - q)^2.
class FoldCubic {
 public:
  explicit FoldCubic(double q) : q_(q) {}

  double q() const noexcept { return q_; }
  double operator()(double x) const noexcept;
  double derivative(double x) const noexcept;
  /// Coefficients of x^3, x^2, x, 1.
  std::array<double, 4> coefficients() const noexcept;
  /// Interior local maximum of N, at x = (1 - q) / 3. N'(q) = 0 is the other
  /// critical point.
  double local_max_point() const noexcept { return (1.0 - q_) / 3.0; }

 private:
  double q_;
};

struct FoldReport {
  double q = 0.0;
  ShapeClass shape_class = ShapeClass::MonotoneDecreasing;
  std::optional<double> x1;  // minimum fold m
  std::optional<double> x2;  // maximum fold M
  std::optional<double> x0;  // double root at q = q*
  std::optional<double> y1;  // f-free curve value at x1
  std::optional<double> y2;  // f-free curve value at x2

  int fold_count() const noexcept;
  /// Valid only for S-shaped reports.
  Branch branch_of(double x) const;
};

/// Tie tolerance used when comparing q against q* and 1.
inline constexpr double kShapeTieTolerance = 1e-12;

/// y = x(1-x)(q+x)/(x-q), divided by f when f is given. Throws DomainError at
/// x = q.
double curve_value(double q, double x, std::optional<double> f = std::nullopt);

/// Closed-form derivative of order 1, 2 or 3 of the curve (f-free unless f is
/// given).
double curve_derivatives(double q, double x, int order, std::optional<double> f = std::nullopt);

/// -0.2 + 0.6 * 2^(1/3) - 0.3 * 2^(2/3).
double q_star() noexcept;

ShapeClass classify_shape(double q);

/// Fold points of the critical curve on (q, 1).
FoldReport fold_points(double q);

/// Point x on the right branch (x2, 1) with f-free curve value y. Requires an
/// S-shaped report and y1 <= y <= y2 (the right branch is monotone there).
double right_branch_point(const FoldReport& folds, double y);

}  // namespace bz
