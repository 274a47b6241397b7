#ifndef BTQ_KERNEL_CALCULUS_HPP
#define BTQ_KERNEL_CALCULUS_HPP

#include <cmath>
#include <complex>
#include <map>
#include <set>
#include <stdexcept>
#include <vector>

#include "btq/kernel_poly.hpp"
#include "btq/model_weights.hpp"
#include "btq/multi_index.hpp"

namespace btq {

// ---------------------------------------------------------------------------
// Numerical evaluation of the Gaussian projection kernel and its kernel basis.
// ---------------------------------------------------------------------------

inline std::vector<std::complex<double>> complex_point(const std::vector<double>& Z) {
  if (Z.size() % 2 != 0) throw std::invalid_argument("real point must have 2n coordinates");
  std::vector<std::complex<double>> z(Z.size() / 2);
  for (std::size_t j = 0; j < z.size(); ++j) z[j] = {Z[2 * j], Z[2 * j + 1]};
  return z;
}

inline std::complex<double> model_kernel_eval(const ModelWeights& w,
                                              const std::vector<std::complex<double>>& z,
                                              const std::vector<std::complex<double>>& zp) {
  if (static_cast<int>(z.size()) != w.n() || static_cast<int>(zp.size()) != w.n())
    throw std::invalid_argument("point dimension mismatch");
  double pref = 1.0;
  std::complex<double> expo = 0.0;
  for (int j = 0; j < w.n(); ++j) {
    double aj = to_double(w.a(j));
    pref *= aj / (2.0 * M_PI);
    expo += -0.25 * aj *
            (std::norm(z[j]) + std::norm(zp[j]) - 2.0 * z[j] * std::conj(zp[j]));
  }
  return pref * std::exp(expo);
}

inline std::complex<double> model_kernel_eval(const ModelWeights& w, const std::vector<double>& Z,
                                              const std::vector<double>& Zp) {
  return model_kernel_eval(w, complex_point(Z), complex_point(Zp));
}

inline std::complex<double> phi_beta_eval(const ModelWeights& w, const MultiIndex& beta,
                                          const std::vector<std::complex<double>>& z) {
  if (beta.size() != w.n() || static_cast<int>(z.size()) != w.n())
    throw std::invalid_argument("dimension mismatch");
  double norm2 = 1.0;  // squared normalization constant, a^beta prod a_i / ((2 pi)^n 2^|beta| beta!)
  std::complex<double> mono = 1.0;
  double expo = 0.0;
  for (int j = 0; j < w.n(); ++j) {
    double aj = to_double(w.a(j));
    int bj = beta[j];
    norm2 *= std::pow(aj, bj) * aj /
             (2.0 * M_PI * std::pow(2.0, bj) * std::tgamma(bj + 1.0));
    for (int r = 0; r < bj; ++r) mono *= z[j];
    expo += -0.25 * aj * std::norm(z[j]);
  }
  return std::sqrt(norm2) * mono * std::exp(expo);
}

inline std::complex<double> phi_beta_eval(const ModelWeights& w, const MultiIndex& beta,
                                          const std::vector<double>& Z) {
  return phi_beta_eval(w, beta, complex_point(Z));
}

// ---------------------------------------------------------------------------
// Spectrum of the model operator: {2 sum_i alpha_i a_i}.
// ---------------------------------------------------------------------------

inline std::vector<Rational> spectrum(const ModelWeights& w, const Rational& cutoff) {
  if (cutoff < 0) throw std::invalid_argument("cutoff must be >= 0");
  std::set<Rational> values;
  // depth-first over alpha with pruning; a_j > 0 keeps the search finite.
  auto rec = [&](auto&& self, int j, Rational acc) -> void {
    if (j == w.n()) {
      values.insert(acc);
      return;
    }
    Rational step = 2 * w.a(j);
    for (Rational v = acc; v <= cutoff; v += step) self(self, j + 1, v);
  };
  rec(rec, 0, Rational(0));
  return {values.begin(), values.end()};
}

// ---------------------------------------------------------------------------
// Calculus of kernels F*P.
// ---------------------------------------------------------------------------

// h with b_{j,z}(g P) = h P:  h = a_j (zbar_j - zbar'_j) g - 2 dg/dz_j.
inline KernelPoly bz_push(const ModelWeights& w, int j, const KernelPoly& g) {
  if (g.n() != w.n()) throw std::invalid_argument("dimension mismatch");
  if (j < 0 || j >= w.n()) throw std::out_of_range("coordinate index out of range");
  KernelPoly h = g.multiplied_by(Var::Zbar, j);
  h -= g.multiplied_by(Var::Zbarp, j);
  h *= GaussianRational(w.a(j));
  h -= g.derivative(Var::Z, j) * GaussianRational(Rational(2));
  return h;
}

// F * P = sum_alpha b_z^alpha (F_alpha * P) with every F_alpha free of zbar.
struct NormalForm {
  int n = 0;
  std::map<MultiIndex, KernelPoly> summands;
};

namespace detail {

// Picks a deterministic zbar variable to eliminate: the coordinate with the
// highest zbar exponent in the first (map-order) zbar-carrying monomial.
inline bool find_zbar_monomial(const KernelPoly& p, KernelMono& mono_out, int& j_out) {
  for (const auto& [m, c] : p.terms()) {
    int best = -1, best_exp = 0;
    for (int j = 0; j < p.n(); ++j) {
      int e = m.get(Var::Zbar, j);
      if (e > best_exp) {
        best_exp = e;
        best = j;
      }
    }
    if (best >= 0) {
      mono_out = m;
      j_out = best;
      return true;
    }
  }
  return false;
}

}  // namespace detail

inline NormalForm normal_order(const ModelWeights& w, const KernelPoly& F) {
  if (F.n() != w.n()) throw std::invalid_argument("dimension mismatch");
  NormalForm nf;
  nf.n = w.n();
  std::map<MultiIndex, KernelPoly> work;
  work.emplace(MultiIndex(w.n()), F);
  bool changed = true;
  while (changed) {
    changed = false;
    for (auto it = work.begin(); it != work.end(); ++it) {
      KernelMono m(w.n());
      int j = -1;
      if (!detail::find_zbar_monomial(it->second, m, j)) continue;
      changed = true;
      GaussianRational c = it->second.coeff(m);
      // remove c * m, split off one zbar_j:  m = zbar_j * m1
      KernelPoly rest = it->second;
      rest.add_term(m, -c);
      KernelMono m1 = m;
      m1.bump(Var::Zbar, j, -1);
      KernelPoly mono1(w.n());
      mono1.add_term(m1, c);
      // zbar_j (m1 P) = (1/a_j) b_j (m1 P) + ((2/a_j) d m1/dz_j + zbar'_j m1) P
      Rational inv_a = 1 / w.a(j);
      rest += mono1.derivative(Var::Z, j) * GaussianRational(2 * inv_a);
      rest += mono1.multiplied_by(Var::Zbarp, j);
      it->second = rest;
      KernelPoly lift = mono1 * GaussianRational(inv_a);
      MultiIndex alpha = it->first.plus(j);
      auto [lit, inserted] = work.try_emplace(alpha, lift);
      if (!inserted) lit->second += lift;
      break;  // map mutated; restart scan
    }
  }
  for (auto& [alpha, poly] : work)
    if (!poly.is_zero()) nf.summands.emplace(alpha, std::move(poly));
  return nf;
}

// Reassembles F from its normal form by expanding each b_z^alpha through
// bz_push; exact round trip.
inline KernelPoly expand_normal_form(const ModelWeights& w, const NormalForm& nf) {
  KernelPoly out(w.n());
  for (const auto& [alpha, poly] : nf.summands) {
    KernelPoly cur = poly;
    for (int j = 0; j < w.n(); ++j)
      for (int r = 0; r < alpha[j]; ++r) cur = bz_push(w, j, cur);
    out += cur;
  }
  return out;
}

namespace detail {

// Core of the left projection: rewrites away every zbar using
//   zbar_j m1 -> (2/a_j) d m1/dz_j + zbar'_j m1,
// which is the zero-ladder component of the normal ordering (all terms that
// acquire a b factor are annihilated by the outer projection).
inline KernelPoly project_core(const std::vector<Rational>& a, KernelPoly p) {
  while (true) {
    KernelMono m(p.n());
    int j = -1;
    if (!find_zbar_monomial(p, m, j)) break;
    GaussianRational c = p.coeff(m);
    p.add_term(m, -c);
    KernelMono m1 = m;
    m1.bump(Var::Zbar, j, -1);
    KernelPoly mono1(p.n());
    mono1.add_term(m1, c);
    Rational inv_a = 1 / a[j];
    p += mono1.derivative(Var::Z, j) * GaussianRational(2 * inv_a);
    p += mono1.multiplied_by(Var::Zbarp, j);
  }
  return p;
}

}  // namespace detail

// F0 in C[z, Z'] with P o (F P) = F0 P.
inline KernelPoly project_left(const ModelWeights& w, const KernelPoly& F) {
  if (F.n() != w.n()) throw std::invalid_argument("dimension mismatch");
  return detail::project_core(w.weights(), F);
}

// K[F, G] with (F P) o (G P) = K[F, G] P.
//
// Route: normal-order F in the outer variable; for each ladder index alpha,
// multiply F_alpha (outer-primed slots renamed to the middle variable) with G
// (outer slots renamed to the middle variable), project the middle variable
// away, substitute middle -> outer holomorphic variable, then re-expand the
// outer ladder factors with bz_push. Internally the middle variable occupies
// coordinates [0, n) and parameters live in coordinates [n, 2n) of a 2n-dim
// scratch polynomial.
inline KernelPoly compose_K(const ModelWeights& w, const KernelPoly& F, const KernelPoly& G) {
  if (F.n() != w.n() || G.n() != w.n())
    throw std::invalid_argument("dimension mismatch");
  const int n = w.n();
  std::vector<Rational> ext_a = w.weights();
  ext_a.insert(ext_a.end(), w.weights().begin(), w.weights().end());

  NormalForm nf = normal_order(w, F);

  KernelPoly embedded_G(2 * n);
  for (const auto& [m, c] : G.terms()) {
    KernelMono em(2 * n);
    for (int j = 0; j < n; ++j) {
      em.bump(Var::Z, j, m.get(Var::Z, j));        // middle w
      em.bump(Var::Zbar, j, m.get(Var::Zbar, j));  // middle wbar
      em.bump(Var::Zp, j, m.get(Var::Zp, j));
      em.bump(Var::Zbarp, j, m.get(Var::Zbarp, j));
    }
    embedded_G.add_term(em, c);
  }

  KernelPoly result(n);
  for (const auto& [alpha, Falpha] : nf.summands) {
    KernelPoly H(2 * n);
    for (const auto& [m, c] : Falpha.terms()) {
      KernelMono em(2 * n);
      for (int j = 0; j < n; ++j) {
        em.bump(Var::Z, n + j, m.get(Var::Z, j));   // outer z kept as parameter
        em.bump(Var::Z, j, m.get(Var::Zp, j));      // F_alpha's primed slot is the middle w
        em.bump(Var::Zbar, j, m.get(Var::Zbarp, j));
      }
      H.add_term(em, c);
    }
    H = H * embedded_G;
    H = detail::project_core(ext_a, std::move(H));
    // substitute middle w -> outer z and collapse back to n dimensions
    KernelPoly K0(n);
    for (const auto& [m, c] : H.terms()) {
      KernelMono km(n);
      for (int j = 0; j < n; ++j) {
        km.bump(Var::Z, j, m.get(Var::Z, j) + m.get(Var::Z, n + j));
        km.bump(Var::Zp, j, m.get(Var::Zp, j));
        km.bump(Var::Zbarp, j, m.get(Var::Zbarp, j));
      }
      K0.add_term(km, c);
    }
    for (int j = 0; j < n; ++j)
      for (int r = 0; r < alpha[j]; ++r) K0 = bz_push(w, j, K0);
    result += K0;
  }
  return result;
}

// ---------------------------------------------------------------------------
// First-order symbol calculus at the base point.
// ---------------------------------------------------------------------------

// Q1(f) = K[1, linear part of f] = sum_i f_z_i(0) z_i + f_zbar_i(0) zbar'_i.
inline KernelPoly q1_of_jet(const ModelWeights& w, const SymbolJet& f) {
  if (f.n() != w.n()) throw std::invalid_argument("dimension mismatch");
  KernelPoly lin(w.n());
  for (int j = 0; j < w.n(); ++j) {
    lin += KernelPoly::variable(w.n(), Var::Z, j) * f.dz(j);
    lin += KernelPoly::variable(w.n(), Var::Zbar, j) * f.dzbar(j);
  }
  return compose_K(w, KernelPoly::one(w.n()), lin);
}

// {f, g}(0) = -i sum_i (2/a_i) (f_zbar_i g_z_i - f_z_i g_zbar_i).
inline GaussianRational poisson_at_point(const ModelWeights& w, const SymbolJet& f,
                                         const SymbolJet& g) {
  if (f.n() != w.n() || g.n() != w.n()) throw std::invalid_argument("dimension mismatch");
  GaussianRational acc;
  for (int j = 0; j < w.n(); ++j) {
    GaussianRational term = f.dzbar(j) * g.dz(j) - f.dz(j) * g.dzbar(j);
    acc += term * GaussianRational(2 / w.a(j));
  }
  return acc * GaussianRational(Rational(0), Rational(-1));
}

// Constant term of K[Q1(f), Q1(g)] - K[Q1(g), Q1(f)]; equals
// i * poisson_at_point(f, g) exactly for scalar jets.
inline GaussianRational c1_antisymmetric(const ModelWeights& w, const SymbolJet& f,
                                         const SymbolJet& g) {
  KernelPoly qf = q1_of_jet(w, f);
  KernelPoly qg = q1_of_jet(w, g);
  KernelPoly diff = compose_K(w, qf, qg) - compose_K(w, qg, qf);
  return diff.constant_term();
}

}  // namespace btq

#endif
