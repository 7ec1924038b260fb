#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "../common/oracles.hpp"
#include "bz/equilibrium.hpp"
#include "bz/error.hpp"
#include "bz/model.hpp"

using namespace bz;

TEST_CASE("params reject non-positive and non-finite values") {
  CHECK_THROWS_AS(Params(0.0, 0.1, 0.01), InvalidArgument);
  CHECK_THROWS_AS(Params(1.0, -0.1, 0.01), InvalidArgument);
  CHECK_THROWS_AS(Params(1.0, 0.1, 0.0), InvalidArgument);
  CHECK_THROWS_AS(Params(std::nan(""), 0.1, 0.01), InvalidArgument);
  CHECK_THROWS_AS(Params(1.0, std::numeric_limits<double>::infinity(), 0.01), InvalidArgument);
  // Large eps is fine for analysis.
  CHECK_NOTHROW(Params(1.0, 0.1, 5.0));
  CHECK(Params(1.0, 0.1, 0.01).with_f(2.0).f() == 2.0);
}

TEST_CASE("fast field matches direct evaluation") {
  const Params p(1.0, 0.07, 1e-4);
  const Rate r = fast_field(p, {0.5, 0.5});
  CHECK(r.x == doctest::Approx(0.25 - 0.43 / 0.57 * 0.5).epsilon(1e-15));
  CHECK(r.x == doctest::Approx(-0.127193).epsilon(1e-5));
  CHECK(r.y == 0.0);

  const Rate one = fast_field(Params(1.0, 1.0, 0.01), {1.0, 1.0});
  CHECK(one.x == 0.0);
  CHECK(one.y == 0.0);
}

TEST_CASE("polynomial field matches direct evaluation") {
  const Params p(1.0, 0.07, 1e-4);
  const Rate r = polynomial_field(p, {0.5, 0.5});
  CHECK(r.x == doctest::Approx(0.5 * 0.5 * 0.57 - 0.43 * 0.5).epsilon(1e-15));
  CHECK(r.x == doctest::Approx(-0.0725).epsilon(1e-12));
  CHECK(r.y == 0.0);
  const Rate origin = polynomial_field(p, {0.0, 0.0});
  CHECK(origin.x == 0.0);
  CHECK(origin.y == 0.0);
}

TEST_CASE("polynomial field is the fast field scaled by q + x") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_real_distribution<double> fq(0.01, 3.0);
  for (int i = 0; i < 200; ++i) {
    const Params p(fq(rng), fq(rng), 0.05 * u(rng) + 1e-5);
    const State s{u(rng), u(rng)};
    const Rate a = fast_field(p, s);
    const Rate b = polynomial_field(p, s);
    const double k = p.q() + s.x;
    CHECK(b.x == doctest::Approx(k * a.x).epsilon(1e-12).scale(1e-300));
    CHECK(b.y == doctest::Approx(k * a.y).epsilon(1e-12).scale(1e-300));
  }
}

TEST_CASE("jacobian agrees with central differences") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 100; ++i) {
    const double f = 0.2 + 2.0 * u(rng), q = 0.01 + u(rng), eps = 0.01;
    const Params p(f, q, eps);
    const State s{u(rng), u(rng)};
    const Matrix2 j = jacobian(p, s);
    const auto fd = oracle::jacobian_fd(f, q, eps, s.x, s.y);
    for (int r = 0; r < 2; ++r) {
      for (int c = 0; c < 2; ++c) {
        CHECK(std::abs(j[r][c] - fd(r, c)) < 1e-6);
      }
    }
  }
  const Matrix2 j = jacobian(Params(1.0, 0.07, 0.01), {0.3, 0.4});
  const auto fd = oracle::jacobian_fd(1.0, 0.07, 0.01, 0.3, 0.4);
  CHECK(std::abs(j[0][0] - fd(0, 0)) < 1e-6);
  CHECK(std::abs(j[0][1] - fd(0, 1)) < 1e-6);
}

TEST_CASE("jacobian at q = 1 has eigenvalues -(1 + f/2) and -eps") {
  for (double f : {0.5, 1.0, 2.0, 7.0}) {
    const Matrix2 j = jacobian(Params(f, 1.0, 0.01), {1.0, 1.0});
    Eigen::Matrix2d m;
    m << j[0][0], j[0][1], j[1][0], j[1][1];
    auto ev = oracle::eigenvalues(m);
    double a = ev[0].real(), b = ev[1].real();
    if (a > b) std::swap(a, b);
    CHECK(a == doctest::Approx(-(1.0 + f / 2.0)).epsilon(1e-13));
    CHECK(b == doctest::Approx(-0.01).epsilon(1e-13));
  }
}

TEST_CASE("jacobian determinant at the equilibrium") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.05, 2.5);
  for (int i = 0; i < 50; ++i) {
    const Params p(u(rng), u(rng), 0.01);
    const double x = equilibrium(p);
    const Matrix2 j = jacobian(p, {x, x});
    const double det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
    // Product identity written with h(x*) replaced by 1 - x*; with the signed
    // h(x*) = x* - 1 the last term enters with a plus sign.
    const double hp = h_factor_derivative(p, x);
    const double expected = -p.eps() * (1 - 2 * x + hp * x - (1 - x));
    CHECK(det == doctest::Approx(expected).epsilon(1e-12).scale(1e-14));
    CHECK(det == doctest::Approx(-p.eps() * (1 - 2 * x + hp * x + h_factor(p, x)))
                     .epsilon(1e-12)
                     .scale(1e-14));
    CHECK(h_factor(p, x) == doctest::Approx(x - 1).epsilon(1e-12).scale(1e-14));
    CHECK(det > 0.0);
  }
}

TEST_CASE("h factor values and pole") {
  CHECK(h_factor(Params(1.0, 0.3, 0.01), 0.3) == 0.0);
  CHECK(h_factor(Params(2.0, 0.5, 0.01), 1.5) == doctest::Approx(-1.0).epsilon(1e-15));
  const double tiny = h_factor(Params(1.0, 0.07, 0.01), 0.07 + 1e-12);
  CHECK(tiny < 0.0);
  CHECK(tiny == doctest::Approx(-1e-12 / 0.14).epsilon(1e-3));
  CHECK_THROWS_AS(h_factor(Params(1.0, 0.07, 0.01), -0.07), DomainError);
  CHECK_THROWS_AS(fast_field(Params(1.0, 0.07, 0.01), {-0.07, 0.1}), DomainError);
  CHECK(h_factor_derivative(Params(1.0, 0.5, 0.01), 0.5) == doctest::Approx(-1.0));
}

TEST_CASE("field vanishes at the equilibrium for random parameters") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.01, 3.0);
  for (int i = 0; i < 100; ++i) {
    const Params p(u(rng), u(rng), 0.01);
    const double x = equilibrium(p);
    const Rate r = fast_field(p, {x, x});
    CHECK(std::abs(r.x) < 1e-13);
    CHECK(std::abs(r.y) < 1e-13);
  }
}
