#include "doctest.h"

#include <cmath>

#include "btq/oracles.hpp"
#include "btq/orbifold.hpp"

using namespace btq;

namespace {
SphereSymbol x1() { return SphereSymbol::coordinate(1); }
SphereSymbol x2() { return SphereSymbol::coordinate(2); }
SphereSymbol x3() { return SphereSymbol::coordinate(3); }

// Re((x1 + i x2)^k) as a polynomial with rational coefficients
SphereSymbol re_power(int k) {
  SphereSymbol re(Rational(1)), im;
  for (int t = 0; t < k; ++t) {
    SphereSymbol re2 = re * x1() - im * x2();
    SphereSymbol im2 = re * x2() + im * x1();
    re = re2;
    im = im2;
  }
  return re;
}
}  // namespace

TEST_CASE("invariant section indices") {
  auto d = invariant_basis(2, 4);
  CHECK(d.invariant == std::vector<long>{0, 2, 4});
  auto d3 = invariant_basis(3, 6);
  CHECK(d3.invariant == std::vector<long>{0, 3, 6});
  // counting: |I| = floor((p - r0)/k) + 1
  for (int k = 2; k <= 5; ++k)
    for (long p = k; p <= 20; ++p)
      for (int w = 0; w < k; ++w) {
        auto dd = invariant_basis(k, p, w);
        long r0 = (k - w) % k;
        CHECK(static_cast<long>(dd.invariant.size()) == (p - r0) / k + 1);
        for (long j : dd.invariant) CHECK((j + w) % k == 0);
      }
  CHECK_THROWS_AS(invariant_basis(0, 4), std::invalid_argument);
  CHECK_THROWS_AS(invariant_basis(2, 0), std::invalid_argument);
  CHECK_THROWS_AS(invariant_basis(2, 4, 2), std::invalid_argument);
}

TEST_CASE("orbifold Bergman diagonal") {
  SUBCASE("trivial group degenerates to the sphere diagonal") {
    auto d = invariant_basis(1, 12);
    for (double z : {-0.8, 0.0, 0.7}) {
      std::array<double, 3> x{std::sqrt(1 - z * z), 0.0, z};
      CHECK(orbifold_bergman_diag(d, x) == doctest::Approx(bergman_diag(12, x)).epsilon(1e-12));
    }
  }

  SUBCASE("equator value approaches p+1") {
    std::array<double, 3> eq{1.0, 0.0, 0.0};
    auto d2 = invariant_basis(2, 64);
    CHECK(std::abs(orbifold_bergman_diag(d2, eq) - 65.0) <= 0.01);
    auto d3 = invariant_basis(3, 64);
    CHECK(std::abs(orbifold_bergman_diag(d3, eq) - 65.0) <= 0.01);
    // matches the roots-of-unity filter evaluation
    CHECK(orbifold_bergman_diag(d3, eq) ==
          doctest::Approx(3 * 65 * oracle::invariant_binomial_filter(3, 64, 0, 0.5))
              .epsilon(1e-12));
  }

  SUBCASE("cone point carries multiplicity k") {
    std::array<double, 3> north{0.0, 0.0, 1.0};
    for (int k : {2, 3, 5}) {
      auto d = invariant_basis(k, 64);
      CHECK(orbifold_bergman_diag(d, north) / 65.0 == doctest::Approx(k).epsilon(1e-12));
    }
  }

  SUBCASE("bounded deviation away from the cone points") {
    for (int k : {2, 3}) {
      for (long p : {8L, 16L, 32L, 64L, 128L}) {
        auto d = invariant_basis(k, p);
        for (double z : {-0.85, -0.4, 0.0, 0.4, 0.85}) {
          std::array<double, 3> x{std::sqrt(1 - z * z), 0.0, z};
          CHECK(std::abs(orbifold_bergman_diag(d, x) - (p + 1)) <= 8.0);
        }
        // group contribution dies off at large p in the bulk
        std::array<double, 3> mid{std::sqrt(1 - 0.16), 0.0, 0.4};
        if (p == 128) CHECK(std::abs(orbifold_bergman_diag(d, mid) - (p + 1)) <= 1e-6);
      }
    }
  }
}

TEST_CASE("orbifold Toeplitz restriction") {
  SUBCASE("non-invariant symbols are rejected") {
    auto d = invariant_basis(2, 6);
    CHECK_THROWS_AS(orbifold_toeplitz(x1(), d), std::invalid_argument);
    CHECK_THROWS_AS(orbifold_commutator_residual(x1(), x3(), d), std::invalid_argument);
  }

  SUBCASE("x3 restricts to the expected diagonal") {
    auto d = invariant_basis(2, 8);
    auto t = orbifold_toeplitz(x3(), d);
    REQUIRE(t.rows() == 5);
    for (size_t r = 0; r < d.invariant.size(); ++r) {
      long j = d.invariant[r];
      CHECK(t.mat(r, r).real() == doctest::Approx((8.0 - 2 * j) / 10.0).epsilon(1e-14));
    }
  }

  SUBCASE("identity on the invariant sector") {
    auto d = invariant_basis(3, 9);
    auto t = orbifold_toeplitz(SphereSymbol(Rational(1)), d);
    CHECK((t.mat - Eigen::MatrixXcd::Identity(t.rows(), t.cols())).cwiseAbs().maxCoeff() <=
          1e-15);
  }

  SUBCASE("sphere matrix of an invariant symbol is block diagonal across residues") {
    SphereSymbol f = x3() + re_power(2) * Rational(1, 3);
    auto sphere = toeplitz_sphere(f, 9);
    for (long j = 0; j <= 9; ++j)
      for (long k = 0; k <= 9; ++k)
        if ((j - k) % 2 != 0) CHECK(std::abs(sphere.mat(j, k)) == 0.0);
  }
}

TEST_CASE("orbifold commutator expansion") {
  SphereSymbol f = x3();
  for (int k : {2, 3}) {
    SphereSymbol g = re_power(k);
    for (long p : {8L, 16L, 32L, 64L}) {
      auto d = invariant_basis(k, p);
      double r = orbifold_commutator_residual(f, g, d);
      // matches the sphere residual restricted to the invariant block
      ToeplitzMatrix tf_s = toeplitz_sphere(f, p);
      ToeplitzMatrix tg_s = toeplitz_sphere(g, p);
      ToeplitzMatrix tb_s = toeplitz_sphere(poisson_sphere(f, g), p);
      Eigen::MatrixXcd resid = tf_s.mat * tg_s.mat - tg_s.mat * tf_s.mat -
                               std::complex<double>(0, 1.0 / p) * tb_s.mat;
      const auto& I = d.invariant;
      Eigen::MatrixXcd block(I.size(), I.size());
      for (size_t a = 0; a < I.size(); ++a)
        for (size_t b = 0; b < I.size(); ++b) block(a, b) = resid(I[a], I[b]);
      CHECK(r == doctest::Approx(operator_norm(block)).epsilon(1e-12));
      // second-order decay
      CHECK(r * p * p <= 60.0);
    }
    CHECK(orbifold_commutator_residual(g, g, invariant_basis(k, 16)) <= 1e-14);
  }
}
