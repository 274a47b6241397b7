#ifndef BTQ_CP1_HPP
#define BTQ_CP1_HPP

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "btq/rational.hpp"
#include "btq/sphere_symbol.hpp"
#include "btq/toeplitz_matrix.hpp"

namespace btq {

// Conventions (see docs/conventions.md): the curvature form has unit total
// volume, the volume form is that same form, and sections at power p are
// spanned by z^k, k = 0..p, in the chart covering the north pole x3 = +1.

// Exact squared norms ||z^k||^2 = k! (p-k)! / (p+1)!.
struct SectionBasis {
  long p = 0;
  std::vector<Rational> norms;
};

inline SectionBasis section_norms(long p) {
  if (p < 1) throw std::invalid_argument("tensor power must be >= 1");
  SectionBasis b;
  b.p = p;
  b.norms.resize(p + 1);
  Rational denom(factorial_int(static_cast<unsigned long>(p) + 1));
  for (long k = 0; k <= p; ++k)
    b.norms[k] = Rational(factorial_int(k) * factorial_int(p - k)) / denom;
  return b;
}

// Sum_k |s_k(x)|^2_h / ||s_k||^2; constant p+1 on the whole sphere. With
// v = (1 - x3)/2 each term is (p+1) C(p,k) v^k (1-v)^{p-k}.
inline double bergman_diag(long p, const std::array<double, 3>& x) {
  if (p < 1) throw std::invalid_argument("tensor power must be >= 1");
  double v = 0.5 * (1.0 - x[2]);
  v = std::min(1.0, std::max(0.0, v));
  if (v > 0.5) v = 1.0 - v;  // k <-> p-k symmetry; keeps the k=0 term normal
  double term = std::pow(1.0 - v, static_cast<double>(p));
  double sum = term;
  double ratio = v / (1.0 - v);
  for (long k = 0; k + 1 <= p; ++k) {
    term *= ratio * (static_cast<double>(p - k) / (k + 1));
    sum += term;
  }
  return (p + 1) * sum;
}

namespace detail {

// Exact chart-measure moments <f s_k, s_j> for all j, k at once: with
// f = (sum c_{ml} z^m zbar^l)/(1+u)^d the (j, k) entry collects the
// monomials with k + m = j + l, each contributing the Beta value
// t! (p+d-t)! / (p+d+1)! at t = k + m.
inline std::vector<std::vector<GaussianRational>> sphere_moments(const SphereSymbol& f,
                                                                 long p) {
  ChartForm cf = chart_form(f);
  const long d = cf.d;
  std::vector<Rational> beta(p + d + 1);
  Rational denom(factorial_int(static_cast<unsigned long>(p + d) + 1));
  for (long t = 0; t <= p + d; ++t)
    beta[t] = Rational(factorial_int(t) * factorial_int(p + d - t)) / denom;
  std::vector<std::vector<GaussianRational>> A(p + 1, std::vector<GaussianRational>(p + 1));
  for (long j = 0; j <= p; ++j)
    for (long k = 0; k <= p; ++k)
      for (const auto& [ml, c] : cf.coeff) {
        long t = k + ml.first;
        if (t != j + ml.second || t > p + d) continue;
        A[j][k] += c * GaussianRational(beta[t]);
      }
  return A;
}

}  // namespace detail

// Compression of multiplication by f to the sections at power p, in the
// orthonormalized monomial basis. Entries are exact Beta-integral values
// divided by sqrt(norms); only the final normalization is floating point.
inline ToeplitzMatrix toeplitz_sphere(const SphereSymbol& f, long p,
                                      int max_degree = SphereSymbol::kDefaultMaxDegree) {
  if (p < 1) throw std::invalid_argument("tensor power must be >= 1");
  if (f.degree() > max_degree) throw std::invalid_argument("symbol degree exceeds bound");
  auto A = detail::sphere_moments(f, p);
  SectionBasis basis = section_norms(p);
  std::vector<double> inv_sqrt_norm(p + 1);
  for (long k = 0; k <= p; ++k) inv_sqrt_norm[k] = 1.0 / std::sqrt(to_double(basis.norms[k]));
  ToeplitzMatrix out{"cp1", p, f.to_string(), Eigen::MatrixXcd::Zero(p + 1, p + 1)};
  for (long j = 0; j <= p; ++j)
    for (long k = 0; k <= p; ++k) {
      if (A[j][k].is_zero()) continue;
      out.mat(j, k) = A[j][k].to_complex() * (inv_sqrt_norm[j] * inv_sqrt_norm[k]);
    }
  return out;
}

// Exact normalized diagonal entry A[k][k] / norms[k] (rational for real f).
inline Rational toeplitz_sphere_diagonal_exact(const SphereSymbol& f, long p, long k) {
  auto A = detail::sphere_moments(f, p);
  SectionBasis basis = section_norms(p);
  if (!A[k][k].is_real()) throw std::invalid_argument("diagonal entry is not real");
  return A[k][k].re / basis.norms[k];
}

// || [T_f, T_g] - (i/p) T_{f,g} || with the bracket from poisson_sphere.
inline double commutator_residual(const SphereSymbol& f, const SphereSymbol& g, long p) {
  ToeplitzMatrix tf = toeplitz_sphere(f, p);
  ToeplitzMatrix tg = toeplitz_sphere(g, p);
  SphereSymbol br = poisson_sphere(f, g);
  ToeplitzMatrix tb = toeplitz_sphere(br, p);
  Eigen::MatrixXcd resid = tf.mat * tg.mat - tg.mat * tf.mat -
                           std::complex<double>(0.0, 1.0 / static_cast<double>(p)) * tb.mat;
  return operator_norm(resid);
}

// || T_f T_g - T_{fg} ||.
inline double product_residual(const SphereSymbol& f, const SphereSymbol& g, long p,
                               int max_degree = SphereSymbol::kDefaultMaxDegree) {
  SphereSymbol fg = f * g;
  if (fg.degree() > max_degree) throw std::invalid_argument("product degree exceeds bound");
  ToeplitzMatrix tf = toeplitz_sphere(f, p);
  ToeplitzMatrix tg = toeplitz_sphere(g, p);
  ToeplitzMatrix tfg = toeplitz_sphere(fg, p, max_degree);
  return operator_norm(Eigen::MatrixXcd(tf.mat * tg.mat - tfg.mat));
}

// ||f||_inf - ||T_{f,p}||, nonnegative up to rounding for real symbols.
inline double norm_defect(const SphereSymbol& f, long p) {
  return sup_norm(f) - operator_norm(toeplitz_sphere(f, p));
}

}  // namespace btq

#endif
