#ifndef BTQ_KERNEL_POLY_HPP
#define BTQ_KERNEL_POLY_HPP

#include <complex>
#include <cstdint>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "btq/rational.hpp"

namespace btq {

// Variable groups of a kernel polynomial F(Z, Z'): per coordinate j we track
// exponents of z_j, conj(z_j), z'_j, conj(z'_j).
enum class Var : int { Z = 0, Zbar = 1, Zp = 2, Zbarp = 3 };

struct KernelMono {
  // layout: [z_1..z_n | zbar_1..zbar_n | zp_1..zp_n | zbarp_1..zbarp_n]
  std::vector<uint16_t> e;

  explicit KernelMono(int n) : e(4 * n, 0) {}

  int dim() const { return static_cast<int>(e.size()) / 4; }

  uint16_t get(Var g, int j) const { return e[static_cast<int>(g) * dim() + j]; }
  void bump(Var g, int j, int amount) {
    int idx = static_cast<int>(g) * dim() + j;
    int v = e[idx] + amount;
    if (v < 0) throw std::logic_error("monomial exponent underflow");
    e[idx] = static_cast<uint16_t>(v);
  }

  int degree() const {
    int d = 0;
    for (uint16_t x : e) d += x;
    return d;
  }
  int degree(Var g) const {
    int d = 0;
    for (int j = 0; j < dim(); ++j) d += get(g, j);
    return d;
  }

  friend bool operator<(const KernelMono& a, const KernelMono& b) { return a.e < b.e; }
  friend bool operator==(const KernelMono& a, const KernelMono& b) { return a.e == b.e; }
};

// Exact polynomial in (z, zbar, z', zbar') over Q(i). Represents the operator
// with kernel F * P against the Gaussian projection kernel P.
class KernelPoly {
 public:
  using TermMap = std::map<KernelMono, GaussianRational>;

  explicit KernelPoly(int n) : n_(n) {
    if (n < 1) throw std::invalid_argument("dimension must be >= 1");
  }

  static KernelPoly constant(int n, GaussianRational c) {
    KernelPoly p(n);
    p.add_term(KernelMono(n), std::move(c));
    return p;
  }
  static KernelPoly one(int n) { return constant(n, GaussianRational(1)); }
  static KernelPoly variable(int n, Var g, int j) {
    if (j < 0 || j >= n) throw std::out_of_range("coordinate index out of range");
    KernelMono m(n);
    m.bump(g, j, 1);
    KernelPoly p(n);
    p.add_term(m, GaussianRational(1));
    return p;
  }

  int n() const { return n_; }
  const TermMap& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  std::size_t term_count() const { return terms_.size(); }

  GaussianRational coeff(const KernelMono& m) const {
    auto it = terms_.find(m);
    return it == terms_.end() ? GaussianRational() : it->second;
  }
  GaussianRational constant_term() const { return coeff(KernelMono(n_)); }

  int degree() const {
    int d = 0;
    for (const auto& [m, c] : terms_) d = std::max(d, m.degree());
    return d;
  }
  int degree(Var g) const {
    int d = 0;
    for (const auto& [m, c] : terms_) d = std::max(d, m.degree(g));
    return d;
  }

  // True when all monomials have the same total-degree parity.
  bool parity_homogeneous() const {
    if (terms_.empty()) return true;
    int p = terms_.begin()->first.degree() & 1;
    for (const auto& [m, c] : terms_)
      if ((m.degree() & 1) != p) return false;
    return true;
  }
  int parity() const { return terms_.empty() ? 0 : terms_.begin()->first.degree() & 1; }

  void add_term(const KernelMono& m, GaussianRational c) {
    if (c.is_zero()) return;
    auto [it, inserted] = terms_.try_emplace(m, std::move(c));
    if (!inserted) {
      it->second += c;
      if (it->second.is_zero()) terms_.erase(it);
    }
  }

  KernelPoly& operator+=(const KernelPoly& o) {
    check_dim(o);
    for (const auto& [m, c] : o.terms_) add_term(m, c);
    return *this;
  }
  KernelPoly& operator-=(const KernelPoly& o) {
    check_dim(o);
    for (const auto& [m, c] : o.terms_) add_term(m, -c);
    return *this;
  }
  friend KernelPoly operator+(KernelPoly a, const KernelPoly& b) { return a += b; }
  friend KernelPoly operator-(KernelPoly a, const KernelPoly& b) { return a -= b; }

  friend KernelPoly operator*(const KernelPoly& a, const KernelPoly& b) {
    a.check_dim(b);
    KernelPoly out(a.n_);
    for (const auto& [ma, ca] : a.terms_)
      for (const auto& [mb, cb] : b.terms_) {
        KernelMono m = ma;
        for (std::size_t i = 0; i < m.e.size(); ++i) {
          int v = m.e[i] + mb.e[i];
          m.e[i] = static_cast<uint16_t>(v);
        }
        out.add_term(m, ca * cb);
      }
    return out;
  }

  KernelPoly& operator*=(const GaussianRational& c) {
    if (c.is_zero()) {
      terms_.clear();
      return *this;
    }
    for (auto& [m, v] : terms_) v *= c;
    return *this;
  }
  friend KernelPoly operator*(KernelPoly a, const GaussianRational& c) { return a *= c; }
  friend KernelPoly operator*(const GaussianRational& c, KernelPoly a) { return a *= c; }

  friend bool operator==(const KernelPoly& a, const KernelPoly& b) {
    return a.n_ == b.n_ && a.terms_ == b.terms_;
  }
  friend bool operator!=(const KernelPoly& a, const KernelPoly& b) { return !(a == b); }

  KernelPoly multiplied_by(Var g, int j) const {
    KernelPoly out(n_);
    for (const auto& [m, c] : terms_) {
      KernelMono m2 = m;
      m2.bump(g, j, 1);
      out.add_term(m2, c);
    }
    return out;
  }

  KernelPoly derivative(Var g, int j) const {
    KernelPoly out(n_);
    for (const auto& [m, c] : terms_) {
      int k = m.get(g, j);
      if (k == 0) continue;
      KernelMono m2 = m;
      m2.bump(g, j, -1);
      out.add_term(m2, c * GaussianRational(Rational(k)));
    }
    return out;
  }

  // Kernel of the adjoint operator: swap Z <-> Z' then conjugate, so the
  // monomial exponent blocks map (z, zbar, zp, zbarp) -> (zbarp, zp, zbar, z)
  // and coefficients conjugate. An involution.
  KernelPoly adjoint_kernel() const {
    KernelPoly out(n_);
    for (const auto& [m, c] : terms_) {
      KernelMono m2(n_);
      for (int j = 0; j < n_; ++j) {
        m2.bump(Var::Z, j, m.get(Var::Zbarp, j));
        m2.bump(Var::Zbar, j, m.get(Var::Zp, j));
        m2.bump(Var::Zp, j, m.get(Var::Zbar, j));
        m2.bump(Var::Zbarp, j, m.get(Var::Z, j));
      }
      out.add_term(m2, c.conj());
    }
    return out;
  }

  std::complex<double> eval(const std::vector<std::complex<double>>& z,
                            const std::vector<std::complex<double>>& zp) const {
    if (static_cast<int>(z.size()) != n_ || static_cast<int>(zp.size()) != n_)
      throw std::invalid_argument("evaluation point dimension mismatch");
    std::complex<double> acc = 0;
    for (const auto& [m, c] : terms_) {
      std::complex<double> t = c.to_complex();
      for (int j = 0; j < n_; ++j) {
        for (int r = 0; r < m.get(Var::Z, j); ++r) t *= z[j];
        for (int r = 0; r < m.get(Var::Zbar, j); ++r) t *= std::conj(z[j]);
        for (int r = 0; r < m.get(Var::Zp, j); ++r) t *= zp[j];
        for (int r = 0; r < m.get(Var::Zbarp, j); ++r) t *= std::conj(zp[j]);
      }
      acc += t;
    }
    return acc;
  }

  // Canonical text form: monomial keys in map order, one "name^k" token per
  // nonzero exponent, "1" for the constant monomial.
  static std::string mono_key(const KernelMono& m) {
    static const char* names[4] = {"z", "zb", "zp", "zbp"};
    std::ostringstream os;
    bool any = false;
    for (int g = 0; g < 4; ++g)
      for (int j = 0; j < m.dim(); ++j) {
        int k = m.get(static_cast<Var>(g), j);
        if (k == 0) continue;
        if (any) os << "*";
        os << names[g] << (j + 1);
        if (k > 1) os << "^" << k;
        any = true;
      }
    return any ? os.str() : "1";
  }

  std::string to_json() const {
    std::ostringstream os;
    os << "{\"n\":" << n_ << ",\"terms\":{";
    bool first = true;
    for (const auto& [m, c] : terms_) {
      if (!first) os << ",";
      first = false;
      os << "\"" << mono_key(m) << "\":[\"" << c.re.get_str() << "\",\"" << c.im.get_str()
         << "\"]";
    }
    os << "}}";
    return os.str();
  }

 private:
  void check_dim(const KernelPoly& o) const {
    if (n_ != o.n_) throw std::invalid_argument("kernel polynomial dimension mismatch");
  }

  int n_;
  TermMap terms_;
};

// Taylor jet of a scalar symbol at the base point: a polynomial in (z, zbar)
// only, i.e. a KernelPoly with empty primed blocks.
class SymbolJet {
 public:
  explicit SymbolJet(KernelPoly poly) : poly_(std::move(poly)) {
    for (const auto& [m, c] : poly_.terms())
      for (int j = 0; j < poly_.n(); ++j)
        if (m.get(Var::Zp, j) != 0 || m.get(Var::Zbarp, j) != 0)
          throw std::invalid_argument("symbol jet may only involve z and zbar");
  }
  explicit SymbolJet(int n) : poly_(n) {}

  int n() const { return poly_.n(); }
  const KernelPoly& poly() const { return poly_; }
  int degree() const { return poly_.degree(); }

  // d/dz_j at 0 and d/dzbar_j at 0 (the degree-1 coefficients).
  GaussianRational dz(int j) const {
    KernelMono m(n());
    m.bump(Var::Z, j, 1);
    return poly_.coeff(m);
  }
  GaussianRational dzbar(int j) const {
    KernelMono m(n());
    m.bump(Var::Zbar, j, 1);
    return poly_.coeff(m);
  }

  // Real-valued jets have coefficients symmetric under swapping the z and
  // zbar blocks together with conjugation.
  bool is_real() const {
    for (const auto& [m, c] : poly_.terms()) {
      KernelMono m2(n());
      for (int j = 0; j < n(); ++j) {
        m2.bump(Var::Z, j, m.get(Var::Zbar, j));
        m2.bump(Var::Zbar, j, m.get(Var::Z, j));
      }
      if (poly_.coeff(m2) != c.conj()) return false;
    }
    return true;
  }

 private:
  KernelPoly poly_;
};

}  // namespace btq

#endif
