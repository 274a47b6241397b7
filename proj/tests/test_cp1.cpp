#include "doctest.h"

#include <cmath>
#include <random>

#include "btq/cp1.hpp"
#include "btq/oracles.hpp"
#include "test_util.hpp"

using namespace btq;
using namespace btq::testutil;

namespace {
SphereSymbol x1() { return SphereSymbol::coordinate(1); }
SphereSymbol x2() { return SphereSymbol::coordinate(2); }
SphereSymbol x3() { return SphereSymbol::coordinate(3); }

std::array<double, 3> random_point(std::mt19937& rng) {
  double z = 2 * random_unit(rng) - 1;
  double th = 2 * M_PI * random_unit(rng);
  double rho = std::sqrt(1 - z * z);
  return {rho * std::cos(th), rho * std::sin(th), z};
}
}  // namespace

TEST_CASE("section norms") {
  auto b1 = section_norms(1);
  REQUIRE(b1.norms.size() == 2);
  CHECK(b1.norms[0] == Rational(1, 2));
  CHECK(b1.norms[1] == Rational(1, 2));

  auto b5 = section_norms(5);
  for (long k = 0; k <= 5; ++k) CHECK(b5.norms[k] == b5.norms[5 - k]);
  // Bergman diagonal consistency: sum_k C(p,k) norms[k] (p+1) = p+1
  Rational acc(0);
  for (long k = 0; k <= 5; ++k) acc += Rational(binomial_int(5, k)) * b5.norms[k] * 6;
  CHECK(acc == Rational(6));

  CHECK_THROWS_AS(section_norms(0), std::invalid_argument);

  // quadrature oracle for the norms at p = 4
  auto b4 = section_norms(4);
  for (long k = 0; k <= 4; ++k)
    CHECK(oracle::section_norm_quadrature(4, k) ==
          doctest::Approx(to_double(b4.norms[k])).epsilon(1e-12));
}

TEST_CASE("bergman diagonal is constant p+1") {
  std::mt19937 rng(8);
  CHECK(bergman_diag(5, {0.0, 0.0, 1.0}) == doctest::Approx(6.0).epsilon(1e-13));
  for (long p : {4L, 16L, 64L}) {
    for (int t = 0; t < 20; ++t) {
      auto x = random_point(rng);
      CHECK(std::abs(bergman_diag(p, x) - (p + 1)) <= 1e-10 * (p + 1));
    }
    // poles included
    CHECK(bergman_diag(p, {0, 0, 1}) == doctest::Approx(p + 1.0));
    CHECK(bergman_diag(p, {0, 0, -1}) == doctest::Approx(p + 1.0));
  }
  // leading order matches the expected power of p
  CHECK(bergman_diag(1024, {0.3, -0.4, std::sqrt(1 - 0.25)}) / 1024.0 ==
        doctest::Approx(1.0).epsilon(2e-3));
}

TEST_CASE("sphere Toeplitz matrices, closed forms") {
  SUBCASE("f = 1 is the identity") {
    auto t = toeplitz_sphere(SphereSymbol(Rational(1)), 7);
    CHECK((t.mat - Eigen::MatrixXcd::Identity(8, 8)).cwiseAbs().maxCoeff() <= 1e-15);
  }

  SUBCASE("f = x3 is diagonal with entries (p-2k)/(p+2)") {
    for (long p : {1L, 4L, 9L}) {
      auto t = toeplitz_sphere(x3(), p);
      for (long k = 0; k <= p; ++k) {
        CHECK(toeplitz_sphere_diagonal_exact(x3(), p, k) ==
              Rational(p - 2 * k) / Rational(p + 2));
        CHECK(t.mat(k, k).real() ==
              doctest::Approx(static_cast<double>(p - 2 * k) / (p + 2)).epsilon(1e-14));
      }
      CHECK(t.mat.cwiseAbs().sum() ==
            doctest::Approx(t.mat.diagonal().cwiseAbs().sum()));  // off-diagonals vanish
    }
  }

  SUBCASE("f = x1 at p = 1") {
    auto t = toeplitz_sphere(x1(), 1);
    CHECK(t.mat(0, 1).real() == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
    CHECK(t.mat(1, 0).real() == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
    CHECK(std::abs(t.mat(0, 0)) <= 1e-16);
    CHECK(std::abs(t.mat(1, 1)) <= 1e-16);
  }

  SUBCASE("entries match chart quadrature at p = 4") {
    std::mt19937 rng(19);
    SphereSymbol f = x3() + x1() * x2() * Rational(2, 3);
    auto t = toeplitz_sphere(f, 4);
    auto norms = section_norms(4);
    for (long j = 0; j <= 4; ++j)
      for (long k = 0; k <= 4; ++k) {
        auto q = oracle::sphere_moment_quadrature(f, 4, j, k) /
                 std::sqrt(to_double(norms.norms[j]) * to_double(norms.norms[k]));
        CHECK(std::abs(t.mat(j, k) - q) <= 1e-12);
      }
  }

  SUBCASE("hermiticity and degree guard") {
    auto t = toeplitz_sphere(x1() * x3() - x2() * Rational(1, 3), 12);
    CHECK(t.hermiticity_defect() <= 1e-15);
    CHECK_THROWS_AS(toeplitz_sphere(SphereSymbol::monomial(5, 0, 0), 4),
                    std::invalid_argument);
    CHECK_THROWS_AS(toeplitz_sphere(x1(), 0), std::invalid_argument);
  }
}

TEST_CASE("operator norm") {
  Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(7, 7);
  CHECK(operator_norm(id) == doctest::Approx(1.0));
  for (long p : {4L, 9L, 16L}) {
    auto t = toeplitz_sphere(x3(), p);
    CHECK(operator_norm(t) == doctest::Approx(static_cast<double>(p) / (p + 2)).epsilon(1e-13));
    // conjugating by the flip k -> p-k gives T_{-x3}
    Eigen::MatrixXcd flip = Eigen::MatrixXcd::Zero(p + 1, p + 1);
    for (long k = 0; k <= p; ++k) flip(k, p - k) = 1;
    auto tneg = toeplitz_sphere(-x3(), p);
    CHECK(((flip * t.mat * flip) - tneg.mat).cwiseAbs().maxCoeff() <= 1e-14);
    CHECK(operator_norm(Eigen::MatrixXcd(flip * t.mat * flip)) ==
          doctest::Approx(operator_norm(t)).epsilon(1e-13));
  }
}

TEST_CASE("projection contractivity: |T_f| <= sup|f|") {
  std::mt19937 rng(29);
  for (int t = 0; t < 6; ++t) {
    SphereSymbol f;
    for (int m = 0; m < 3; ++m)
      f += SphereSymbol::monomial(static_cast<int>(rng() % 2), static_cast<int>(rng() % 2),
                                  static_cast<int>(rng() % 2), random_rational(rng));
    for (long p : {3L, 8L, 17L})
      CHECK(operator_norm(toeplitz_sphere(f, p)) <= sup_norm(f) + 1e-10);
  }
}

TEST_CASE("commutator residual") {
  CHECK(commutator_residual(x1(), x1(), 8) <= 1e-14);
  // constant symbols commute with everything
  CHECK(commutator_residual(SphereSymbol(Rational(2)), x3(), 8) <= 1e-14);
  // closed form for the coordinate pair: residual = 4/(p+2)^2
  for (long p : {8L, 16L, 32L}) {
    double r = commutator_residual(x1(), x2(), p);
    CHECK(r == doctest::Approx(4.0 / ((p + 2.0) * (p + 2.0))).epsilon(1e-10));
  }
  // p^2-scaled residual stays bounded for degree <= 2 pairs
  SphereSymbol re2 = x1() * x1() - x2() * x2();
  std::vector<std::pair<SphereSymbol, SphereSymbol>> deg2_pairs{
      {x3(), re2},
      {x1() * x2(), x3()},
      {x1(), x1() * x2()},
      {re2, x1() * x2()},
      {x3() * x3(), x1()},
  };
  for (const auto& [f, g] : deg2_pairs)
    for (long p : {8L, 16L, 32L, 64L, 128L}) {
      double r = commutator_residual(f, g, p);
      CHECK(r * p * p <= 60.0);
    }
}

TEST_CASE("product residual") {
  CHECK(product_residual(SphereSymbol(Rational(1)), x3(), 9) <= 1e-15);
  // closed form for (x3, x3): max_k |T_{x3}^2 - T_{x3^2}| = 1/(p+3) at even p
  for (long p : {8L, 16L}) {
    double r = product_residual(x3(), x3(), p);
    CHECK(r == doctest::Approx(1.0 / (p + 3.0)).epsilon(1e-12));
  }
  double r16 = product_residual(x1(), x2(), 16);
  double r8 = product_residual(x1(), x2(), 8);
  CHECK(r16 > 0.0);
  CHECK(r16 < r8);
  CHECK_THROWS_AS(product_residual(SphereSymbol::monomial(2, 1, 0),
                                   SphereSymbol::monomial(0, 2, 0), 8),
                  std::invalid_argument);
}

TEST_CASE("norm defect") {
  // exact closed form for x3
  for (long p : {4L, 32L, 128L})
    CHECK(std::abs(norm_defect(x3(), p) - 2.0 / (p + 2)) <= 1e-12);
  // f = 1 has zero defect
  CHECK(std::abs(norm_defect(SphereSymbol(Rational(1)), 6)) <= 1e-12);
  // defect is nonnegative up to rounding
  std::mt19937 rng(31);
  for (int t = 0; t < 4; ++t) {
    SphereSymbol f;
    for (int m = 0; m < 3; ++m)
      f += SphereSymbol::monomial(static_cast<int>(rng() % 2), static_cast<int>(rng() % 2),
                                  static_cast<int>(rng() % 2), random_rational(rng));
    CHECK(norm_defect(f, 16) >= -1e-12);
  }
}
