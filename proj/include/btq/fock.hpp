#ifndef BTQ_FOCK_HPP
#define BTQ_FOCK_HPP

#include <Eigen/Dense>

#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "btq/kernel_calculus.hpp"
#include "btq/kernel_poly.hpp"
#include "btq/model_weights.hpp"
#include "btq/multi_index.hpp"
#include "btq/sqrt_rational.hpp"
#include "btq/toeplitz_matrix.hpp"

namespace btq {

// Truncated basis of the model quantum space: all phi_beta with |beta| <= B,
// in the deterministic graded order of multi_indices_up_to.
struct FockBasis {
  ModelWeights w;
  int cutoff;
  std::vector<MultiIndex> indices;
  std::map<std::vector<int>, int> position;

  int size() const { return static_cast<int>(indices.size()); }
  std::optional<int> find(const MultiIndex& m) const {
    auto it = position.find(m.e);
    if (it == position.end()) return std::nullopt;
    return it->second;
  }
};

inline FockBasis fock_basis(const ModelWeights& w, int B) {
  if (B < 0) throw std::invalid_argument("cutoff must be >= 0");
  FockBasis b{w, B, multi_indices_up_to(w.n(), B), {}};
  for (int i = 0; i < b.size(); ++i) b.position[b.indices[i].e] = i;
  return b;
}

// Exact matrix element <phi_beta, z^mu zbar^nu phi_gamma> against the full
// (untruncated) space. Nonzero only when beta + nu = gamma + mu, with value
//   prod_i t_i! (2/a_i)^{(mu_i+nu_i)/2} / sqrt(beta_i! gamma_i!),  t = mu + gamma.
inline SqrtRational fock_monomial_entry(const ModelWeights& w, const MultiIndex& mu,
                                        const MultiIndex& nu, const MultiIndex& beta,
                                        const MultiIndex& gamma) {
  const int n = w.n();
  if (mu.size() != n || nu.size() != n || beta.size() != n || gamma.size() != n)
    throw std::invalid_argument("dimension mismatch");
  Rational q(1), r(1);
  for (int i = 0; i < n; ++i) {
    if (beta[i] + nu[i] != gamma[i] + mu[i]) return SqrtRational();
    long t = gamma[i] + mu[i];
    long s = mu[i] + nu[i];
    q *= factorial(static_cast<unsigned long>(t)) * rat_pow(2 / w.a(i), s / 2);
    if (s % 2 != 0) r *= 2 / w.a(i);
    r /= factorial(static_cast<unsigned long>(beta[i])) *
         factorial(static_cast<unsigned long>(gamma[i]));
  }
  return SqrtRational(q, r);
}

namespace detail {

inline std::string mono_symbol(const MultiIndex& mu, const MultiIndex& nu) {
  std::ostringstream os;
  bool any = false;
  for (int i = 0; i < mu.size(); ++i)
    for (int rep = 0; rep < mu[i]; ++rep) {
      os << (any ? "*" : "") << "z" << (i + 1);
      any = true;
    }
  for (int i = 0; i < nu.size(); ++i)
    for (int rep = 0; rep < nu[i]; ++rep) {
      os << (any ? "*" : "") << "zbar" << (i + 1);
      any = true;
    }
  return any ? os.str() : "1";
}

}  // namespace detail

// Compression of multiplication by z^mu zbar^nu to the truncated basis;
// entries are full-space inner products, so truncation shows up only through
// the basis restriction, never in the entry values.
inline ToeplitzMatrix toeplitz_monomial_matrix(const FockBasis& basis, const MultiIndex& mu,
                                               const MultiIndex& nu) {
  const int N = basis.size();
  ToeplitzMatrix out{"fock", basis.cutoff, detail::mono_symbol(mu, nu),
                     Eigen::MatrixXcd::Zero(N, N)};
  for (int col = 0; col < N; ++col) {
    const MultiIndex& gamma = basis.indices[col];
    MultiIndex beta(basis.w.n());
    bool ok = true;
    for (int i = 0; i < basis.w.n(); ++i) {
      int v = gamma[i] + mu[i] - nu[i];
      if (v < 0) {
        ok = false;
        break;
      }
      beta[i] = v;
    }
    if (!ok) continue;
    auto row = basis.find(beta);
    if (!row) continue;
    out.mat(*row, col) = fock_monomial_entry(basis.w, mu, nu, beta, gamma).to_double();
  }
  return out;
}

// Matrix of the operator with kernel Q * P: entry (beta, gamma) is the finite
// sum over the single intermediate index delta = beta + B - A per monomial
// z^A zbar^B z'^C zbar'^D of Q.
inline ToeplitzMatrix kernel_operator_matrix(const FockBasis& basis, const KernelPoly& Q) {
  if (Q.n() != basis.w.n()) throw std::invalid_argument("dimension mismatch");
  const int N = basis.size();
  const int n = basis.w.n();
  ToeplitzMatrix out{"fock", basis.cutoff, "kernel:" + Q.to_json(),
                     Eigen::MatrixXcd::Zero(N, N)};
  for (const auto& [mono, coeff] : Q.terms()) {
    MultiIndex A(n), Bv(n), C(n), D(n);
    for (int i = 0; i < n; ++i) {
      A[i] = mono.get(Var::Z, i);
      Bv[i] = mono.get(Var::Zbar, i);
      C[i] = mono.get(Var::Zp, i);
      D[i] = mono.get(Var::Zbarp, i);
    }
    std::complex<double> c = coeff.to_complex();
    for (int row = 0; row < N; ++row) {
      const MultiIndex& beta = basis.indices[row];
      MultiIndex delta(n);
      bool ok = true;
      for (int i = 0; i < n; ++i) {
        int v = beta[i] + Bv[i] - A[i];
        if (v < 0) {
          ok = false;
          break;
        }
        delta[i] = v;
      }
      if (!ok) continue;
      MultiIndex gamma(n);
      for (int i = 0; i < n && ok; ++i) {
        int v = delta[i] + D[i] - C[i];
        if (v < 0) ok = false;
        else gamma[i] = v;
      }
      if (!ok) continue;
      auto col = basis.find(gamma);
      if (!col) continue;
      double e1 = fock_monomial_entry(basis.w, A, Bv, beta, delta).to_double();
      double e2 = fock_monomial_entry(basis.w, C, D, delta, gamma).to_double();
      out.mat(row, *col) += c * e1 * e2;
    }
  }
  return out;
}

// Matrix-level check of the composition calculus on the interior block
// |beta| <= B - margin. The matrix product of the two compressions resolves
// the middle variable over the model space, so it equals the compression of
// (F P) o P o (G P) = K[F, K[1, G]] P; for G free of zbar this is K[F, G] P.
// On the interior block the truncated product is complete, so the residual
// isolates arithmetic error of the calculus from truncation.
inline double verify_composition(const FockBasis& basis, const KernelPoly& F,
                                 const KernelPoly& G, int margin) {
  if (margin < 0 || margin >= basis.cutoff)
    throw std::invalid_argument("margin must satisfy 0 <= margin < B");
  if (F.degree() > margin || G.degree() > margin)
    throw std::invalid_argument("symbol degree exceeds margin");
  ToeplitzMatrix MF = kernel_operator_matrix(basis, F);
  ToeplitzMatrix MG = kernel_operator_matrix(basis, G);
  KernelPoly projected = compose_K(basis.w, F, compose_K(basis.w, KernelPoly::one(F.n()), G));
  ToeplitzMatrix MK = kernel_operator_matrix(basis, projected);
  Eigen::MatrixXcd diff = MF.mat * MG.mat - MK.mat;
  int interior = 0;
  while (interior < basis.size() &&
         basis.indices[interior].order() <= basis.cutoff - margin)
    ++interior;
  return operator_norm(Eigen::MatrixXcd(diff.topLeftCorner(interior, interior)));
}

}  // namespace btq

#endif
