#ifndef BTQ_ORBIFOLD_HPP
#define BTQ_ORBIFOLD_HPP

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "btq/cp1.hpp"
#include "btq/sphere_symbol.hpp"
#include "btq/toeplitz_matrix.hpp"

namespace btq {

// Cyclic quotient of the sphere: the generator rotates the chart coordinate
// by a primitive k-th root of unity and acts on the section s_j = z^j with
// weight j + lift_weight. The invariant sector is the residue class
// r0 = (-lift_weight) mod k.
struct OrbifoldData {
  int k = 1;
  long p = 0;
  int lift_weight = 0;
  int r0 = 0;
  std::vector<long> invariant;  // indices j in [0, p] with j = r0 (mod k)
};

inline OrbifoldData invariant_basis(int k, long p, int lift_weight = 0) {
  if (k < 1) throw std::invalid_argument("group order must be >= 1");
  if (p < 1) throw std::invalid_argument("tensor power must be >= 1");
  if (lift_weight < 0 || lift_weight >= k)
    throw std::invalid_argument("lift weight must lie in [0, k)");
  OrbifoldData d;
  d.k = k;
  d.p = p;
  d.lift_weight = lift_weight;
  d.r0 = (k - lift_weight) % k;
  for (long j = d.r0; j <= p; j += k) d.invariant.push_back(j);
  return d;
}

// k * sum_{j in I} |s_j(x)|^2_h / ||s_j||^2; the quotient volume is 1/k of
// the sphere's, hence the factor k in the orthonormalization.
inline double orbifold_bergman_diag(const OrbifoldData& d, const std::array<double, 3>& x) {
  double v = 0.5 * (1.0 - x[2]);
  v = std::min(1.0, std::max(0.0, v));
  double sum = 0.0;
  // direct binomial terms; p <= a few hundred keeps this exact enough
  for (long j : d.invariant) {
    double lg = std::lgamma(d.p + 1.0) - std::lgamma(j + 1.0) - std::lgamma(d.p - j + 1.0);
    double lt;
    if (v == 0.0)
      lt = (j == 0) ? lg : -std::numeric_limits<double>::infinity();
    else if (v == 1.0)
      lt = (j == d.p) ? lg : -std::numeric_limits<double>::infinity();
    else
      lt = lg + j * std::log(v) + (d.p - j) * std::log1p(-v);
    sum += std::exp(lt);
  }
  return d.k * (d.p + 1) * sum;
}

// Restriction of the sphere compression to the invariant sector. For an
// invariant symbol the complementary entries of the sphere matrix vanish
// identically, so the restriction is the whole orbifold operator.
inline ToeplitzMatrix orbifold_toeplitz(const SphereSymbol& f, const OrbifoldData& d,
                                        int max_degree = SphereSymbol::kDefaultMaxDegree) {
  if (!is_rotation_invariant(f, d.k))
    throw std::invalid_argument("symbol is not invariant under the cyclic action");
  ToeplitzMatrix sphere = toeplitz_sphere(f, d.p, max_degree);
  const long m = static_cast<long>(d.invariant.size());
  ToeplitzMatrix out{"orbifold", d.p, f.to_string(), Eigen::MatrixXcd::Zero(m, m)};
  for (long r = 0; r < m; ++r)
    for (long c = 0; c < m; ++c) out.mat(r, c) = sphere.mat(d.invariant[r], d.invariant[c]);
  return out;
}

// || [T_f, T_g] - (i/p) T_{f,g} || on the invariant sector.
inline double orbifold_commutator_residual(const SphereSymbol& f, const SphereSymbol& g,
                                           const OrbifoldData& d) {
  if (!is_rotation_invariant(f, d.k) || !is_rotation_invariant(g, d.k))
    throw std::invalid_argument("symbols must be invariant under the cyclic action");
  ToeplitzMatrix tf = orbifold_toeplitz(f, d);
  ToeplitzMatrix tg = orbifold_toeplitz(g, d);
  SphereSymbol br = poisson_sphere(f, g);
  ToeplitzMatrix tb = orbifold_toeplitz(br, d);
  Eigen::MatrixXcd resid = tf.mat * tg.mat - tg.mat * tf.mat -
                           std::complex<double>(0.0, 1.0 / static_cast<double>(d.p)) * tb.mat;
  return operator_norm(resid);
}

}  // namespace btq

#endif
