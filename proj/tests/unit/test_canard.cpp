#include <doctest.h>

#include <cmath>
#include <random>

#include "../common/oracles.hpp"
#include "bz/canard.hpp"
#include "bz/critical_geometry.hpp"
#include "bz/error.hpp"

using namespace bz;

TEST_CASE("rescale factor signs") {
  const FoldReport r = fold_points(0.07);
  const RescaleFactors m = rescale_factors(0.07, *r.x1);
  CHECK(m.alpha > 0.0);
  CHECK(m.beta > 0.0);
  CHECK(m.xi > 0.0);
  CHECK(std::isfinite(m.eta));
  const RescaleFactors M = rescale_factors(0.07, *r.x2);
  CHECK(M.alpha < 0.0);
  CHECK(M.beta < 0.0);
  CHECK(M.xi > 0.0);
  const double x = *r.x1;
  const double fs = oracle::curve(0.07, x) / x;
  CHECK(m.xi == doctest::Approx(1.0 / std::sqrt((x * x - 0.07 * 0.07) * fs)).epsilon(1e-12));
}

TEST_CASE("degenerate fold at q star") {
  const FoldReport r = fold_points(q_star());
  CHECK_THROWS_AS(rescale_factors(q_star(), *r.x0), DegenerateFold);
  CHECK_THROWS_AS(quantity_A(q_star(), *r.x0), DegenerateFold);
}

TEST_CASE("A at the folds") {
  const FoldReport r07 = fold_points(0.07);
  const double a1 = quantity_A(0.07, *r07.x1), a2 = quantity_A(0.07, *r07.x2);
  CHECK(a1 == doctest::Approx(-19.69).epsilon(0.02 / 19.69));
  CHECK(a2 == doctest::Approx(-7.08).epsilon(0.02 / 7.08));
  CHECK(a1 == doctest::Approx(oracle::quantity_A(0.07, *r07.x1)).epsilon(1e-6));
  CHECK(a2 == doctest::Approx(oracle::quantity_A(0.07, *r07.x2)).epsilon(1e-6));

  const FoldReport r02 = fold_points(0.02);
  const double b1 = quantity_A(0.02, *r02.x1), b2 = quantity_A(0.02, *r02.x2);
  CHECK(b2 == doctest::Approx(2.45).epsilon(0.02 / 2.45));
  CHECK(b2 == doctest::Approx(oracle::quantity_A(0.02, *r02.x2)).epsilon(1e-6));
  CHECK(b1 == doctest::Approx(oracle::quantity_A(0.02, *r02.x1)).epsilon(1e-5));
  // The quoted -3.32 is 0.0076 away from the computed -3.3276; see README.
  CHECK(b1 == doctest::Approx(-3.3276).epsilon(1e-4));
}

TEST_CASE("closed form and coefficient route agree") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 200; ++i) {
    const double q = 0.005 + (q_star() - 0.006) * u(rng);
    const FoldReport r = fold_points(q);
    const double x = u(rng) < 0.5 ? *r.x1 : *r.x2;
    const double a = quantity_A(q, x);
    CHECK(quantity_A_from_coefficients(q, x) == doctest::Approx(a).epsilon(1e-10));
    const CanardReport rep = canard_report(q, x);
    CHECK(rep.A == doctest::Approx(-rep.a2 + 3 * rep.a3 - 2 * rep.a4 - 2 * rep.a5).epsilon(1e-12));
  }
}

TEST_CASE("A at the minimum fold is negative") {
  for (int i = 0; i < 50; ++i) {
    const double q = 0.005 + (q_star() - 1e-4 - 0.005) * i / 49.0;
    const FoldReport r = fold_points(q);
    CHECK(quantity_A(q, *r.x1) < 0.0);
  }
}

TEST_CASE("q double star") {
  const double qss = q_double_star(1e-10);
  CHECK(std::abs(qss - 0.05551) < 5e-4);
  auto a_max = [](double q) { return quantity_A(q, *fold_points(q).x2); };
  CHECK(std::abs(a_max(qss)) < 1e-10);
  CHECK(a_max(qss + 0.005) < 0.0);
  CHECK(a_max(qss - 0.005) > 0.0);
  // Oracle: bisection on the finite-difference A with folds from the scan.
  auto a_fd = [](double q) { return oracle::quantity_A(q, oracle::folds(q, 4000)[1]); };
  const double q_ref = oracle::bisect(a_fd, 0.04, 0.07, 40);
  CHECK(qss == doctest::Approx(q_ref).epsilon(1e-6));

  int changes = 0;
  double prev = a_max(0.01);
  for (double q = 0.01 + 1e-4; q < q_star() - 1e-4; q += 1e-4) {
    const double v = a_max(q);
    if ((v < 0) != (prev < 0)) ++changes;
    prev = v;
  }
  CHECK(changes == 1);
}

TEST_CASE("hopf criticality labels") {
  CHECK(hopf_criticality(0.07, FoldKind::Max) == Criticality::Supercritical);
  CHECK(hopf_criticality(0.02, FoldKind::Max) == Criticality::Subcritical);
  CHECK(hopf_criticality(0.02, FoldKind::Min) == Criticality::Supercritical);
  CHECK(hopf_criticality(q_double_star(), FoldKind::Max) == Criticality::Degenerate);
  CHECK(to_string(Criticality::Subcritical) == "SUBCRITICAL");
  CHECK_THROWS_AS(hopf_criticality(0.5, FoldKind::Min), InvalidArgument);
}
