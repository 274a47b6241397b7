#ifndef BTQ_SPHERE_SYMBOL_HPP
#define BTQ_SPHERE_SYMBOL_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "btq/rational.hpp"

namespace btq {

// Polynomial observable on the unit sphere in the ambient coordinates
// (x1, x2, x3), rational coefficients, reduced against x1^2+x2^2+x3^2 = 1 to
// the canonical basis { x1^a x2^b x3^c : c <= 1 }.
class SphereSymbol {
 public:
  static constexpr int kDefaultMaxDegree = 4;

  using Key = std::array<int, 3>;
  using TermMap = std::map<Key, Rational>;

  SphereSymbol() = default;
  explicit SphereSymbol(Rational c) { add_term({0, 0, 0}, std::move(c)); }

  static SphereSymbol coordinate(int axis) {
    if (axis < 1 || axis > 3) throw std::invalid_argument("axis must be 1, 2 or 3");
    SphereSymbol s;
    Key k{0, 0, 0};
    k[axis - 1] = 1;
    s.add_term(k, Rational(1));
    return s;
  }

  static SphereSymbol monomial(int a, int b, int c, Rational coeff = Rational(1)) {
    if (a < 0 || b < 0 || c < 0) throw std::invalid_argument("negative exponent");
    SphereSymbol s;
    s.add_term({a, b, c}, std::move(coeff));
    s.reduce();
    return s;
  }

  const TermMap& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  int degree() const {
    int d = 0;
    for (const auto& [k, c] : terms_) d = std::max(d, k[0] + k[1] + k[2]);
    return d;
  }

  void add_term(const Key& k, Rational c) {
    if (c == 0) return;
    auto [it, inserted] = terms_.try_emplace(k, std::move(c));
    if (!inserted) {
      it->second += c;
      if (it->second == 0) terms_.erase(it);
    }
  }

  SphereSymbol& operator+=(const SphereSymbol& o) {
    for (const auto& [k, c] : o.terms_) add_term(k, c);
    return *this;
  }
  SphereSymbol& operator-=(const SphereSymbol& o) {
    for (const auto& [k, c] : o.terms_) add_term(k, -c);
    return *this;
  }
  friend SphereSymbol operator+(SphereSymbol a, const SphereSymbol& b) { return a += b; }
  friend SphereSymbol operator-(SphereSymbol a, const SphereSymbol& b) { return a -= b; }
  friend SphereSymbol operator-(const SphereSymbol& a) {
    SphereSymbol out;
    for (const auto& [k, c] : a.terms_) out.add_term(k, -c);
    return out;
  }

  friend SphereSymbol operator*(const SphereSymbol& a, const SphereSymbol& b) {
    SphereSymbol out;
    for (const auto& [ka, ca] : a.terms_)
      for (const auto& [kb, cb] : b.terms_)
        out.add_term({ka[0] + kb[0], ka[1] + kb[1], ka[2] + kb[2]}, ca * cb);
    out.reduce();
    return out;
  }
  SphereSymbol& operator*=(const Rational& c) {
    if (c == 0) {
      terms_.clear();
      return *this;
    }
    for (auto& [k, v] : terms_) v *= c;
    return *this;
  }
  friend SphereSymbol operator*(SphereSymbol a, const Rational& c) { return a *= c; }
  friend SphereSymbol operator*(const Rational& c, SphereSymbol a) { return a *= c; }

  friend bool operator==(const SphereSymbol& a, const SphereSymbol& b) {
    return a.terms_ == b.terms_;
  }
  friend bool operator!=(const SphereSymbol& a, const SphereSymbol& b) { return !(a == b); }

  // canonical form: x3^2 -> 1 - x1^2 - x2^2 until every x3 exponent is <= 1
  void reduce() {
    bool changed = true;
    while (changed) {
      changed = false;
      for (auto it = terms_.begin(); it != terms_.end(); ++it) {
        if (it->first[2] < 2) continue;
        Key k = it->first;
        Rational c = it->second;
        terms_.erase(it);
        Key base{k[0], k[1], k[2] - 2};
        add_term(base, c);
        add_term({base[0] + 2, base[1], base[2]}, -c);
        add_term({base[0], base[1] + 2, base[2]}, -c);
        changed = true;
        break;
      }
    }
  }

  double eval(const std::array<double, 3>& x) const {
    double acc = 0;
    for (const auto& [k, c] : terms_)
      acc += c.get_d() * std::pow(x[0], k[0]) * std::pow(x[1], k[1]) * std::pow(x[2], k[2]);
    return acc;
  }

  // formal partial of the canonical representative
  SphereSymbol partial(int axis) const {
    SphereSymbol out;
    int a = axis - 1;
    for (const auto& [k, c] : terms_) {
      if (k[a] == 0) continue;
      Key k2 = k;
      k2[a] -= 1;
      out.add_term(k2, c * k[a]);
    }
    return out;
  }

  std::string to_string() const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (auto rit = terms_.rbegin(); rit != terms_.rend(); ++rit) {
      const auto& [k, c] = *rit;
      std::string cs = c.get_str();
      if (!first && c > 0) os << "+";
      first = false;
      bool has_var = k[0] + k[1] + k[2] > 0;
      if (!has_var) {
        os << cs;
        continue;
      }
      if (c == -1)
        os << "-";
      else if (c != 1)
        os << cs << "*";
      bool started = false;
      for (int a = 0; a < 3; ++a) {
        if (k[a] == 0) continue;
        if (started) os << "*";
        started = true;
        os << "x" << (a + 1);
        if (k[a] > 1) os << "^" << k[a];
      }
    }
    return os.str();
  }

 private:
  TermMap terms_;
};

// Poisson bracket fixed by the normalized-volume convention and the rotation
// algebra {x1,x2} = 2 x3 (cyclic); in the stereographic chart this is
// ((1+r^2)^2 / 2) (f_x g_y - f_y g_x).
inline SphereSymbol poisson_sphere(const SphereSymbol& f, const SphereSymbol& g,
                                   int max_degree = SphereSymbol::kDefaultMaxDegree) {
  SphereSymbol f1 = f.partial(1), f2 = f.partial(2), f3 = f.partial(3);
  SphereSymbol g1 = g.partial(1), g2 = g.partial(2), g3 = g.partial(3);
  SphereSymbol out = SphereSymbol::coordinate(1) * (f2 * g3 - f3 * g2) +
                     SphereSymbol::coordinate(2) * (f3 * g1 - f1 * g3) +
                     SphereSymbol::coordinate(3) * (f1 * g2 - f2 * g1);
  out *= Rational(2);
  if (out.degree() > max_degree)
    throw std::invalid_argument("poisson bracket exceeds the degree bound");
  return out;
}

// Re((x1 + i x2)^k): the lowest-degree nonconstant invariant of the order-k
// cyclic rotation besides functions of x3.
inline SphereSymbol rotation_harmonic(int k) {
  if (k < 0) throw std::invalid_argument("power must be >= 0");
  SphereSymbol re(Rational(1)), im;
  for (int t = 0; t < k; ++t) {
    SphereSymbol re2 = re * SphereSymbol::coordinate(1) - im * SphereSymbol::coordinate(2);
    SphereSymbol im2 = re * SphereSymbol::coordinate(2) + im * SphereSymbol::coordinate(1);
    re = re2;
    im = im2;
  }
  return re;
}

// Chart form of a symbol: f = (sum c_{ml} z^m zbar^l) / (1+|z|^2)^d under
// the chart z = (x1 - i x2)/(1 + x3), i.e.
// x1 = (z + zbar)/(1+|z|^2), x2 = i(z - zbar)/(1+|z|^2), x3 = (1-|z|^2)/(1+|z|^2).
// This orientation makes the commutator expansion converge with the +i/p
// sign together with {x1, x2} = 2 x3 (see docs/conventions.md).
struct ChartForm {
  int d = 0;
  std::map<std::pair<int, int>, GaussianRational> coeff;  // (m, l) -> c_{ml}
};

inline ChartForm chart_form(const SphereSymbol& f) {
  ChartForm out;
  out.d = f.degree();
  using Poly2 = std::map<std::pair<int, int>, GaussianRational>;
  auto mul = [](const Poly2& a, const Poly2& b) {
    Poly2 r;
    for (const auto& [ka, ca] : a)
      for (const auto& [kb, cb] : b) {
        auto key = std::make_pair(ka.first + kb.first, ka.second + kb.second);
        auto [it, ins] = r.try_emplace(key, ca * cb);
        if (!ins) {
          it->second += ca * cb;
          if (it->second.is_zero()) r.erase(it);
        }
      }
    return r;
  };
  const GaussianRational i = GaussianRational::unit_im();
  Poly2 X1{{{1, 0}, GaussianRational(1)}, {{0, 1}, GaussianRational(1)}};          // z + zbar
  Poly2 X2{{{1, 0}, i}, {{0, 1}, -i}};                                             // i(z - zbar)
  Poly2 X3{{{0, 0}, GaussianRational(1)}, {{1, 1}, GaussianRational(Rational(-1))}};  // 1 - z zbar
  Poly2 U{{{0, 0}, GaussianRational(1)}, {{1, 1}, GaussianRational(1)}};           // 1 + z zbar

  for (const auto& [k, c] : f.terms()) {
    Poly2 acc{{{0, 0}, GaussianRational(c)}};
    for (int r = 0; r < k[0]; ++r) acc = mul(acc, X1);
    for (int r = 0; r < k[1]; ++r) acc = mul(acc, X2);
    for (int r = 0; r < k[2]; ++r) acc = mul(acc, X3);
    int deficit = out.d - (k[0] + k[1] + k[2]);
    for (int r = 0; r < deficit; ++r) acc = mul(acc, U);
    for (const auto& [key, v] : acc) {
      auto [it, ins] = out.coeff.try_emplace(key, v);
      if (!ins) {
        it->second += v;
        if (it->second.is_zero()) out.coeff.erase(it);
      }
    }
  }
  return out;
}

// The cyclic-group generator acts on the chart coordinate by the primitive
// k-th root of unity; a symbol is invariant iff every chart monomial carries
// weight m - l divisible by k.
inline bool is_rotation_invariant(const SphereSymbol& f, int k) {
  if (k < 1) throw std::invalid_argument("group order must be >= 1");
  if (k == 1) return true;
  ChartForm cf = chart_form(f);
  for (const auto& [key, c] : cf.coeff)
    if ((key.first - key.second) % k != 0) return false;
  return true;
}

// sup of |f| on the sphere: deterministic Fibonacci lattice scan followed by
// Newton refinement of the best candidates on the sphere.
inline double sup_norm(const SphereSymbol& f, int lattice_points = 4096,
                       int newton_steps = 20) {
  SphereSymbol p1 = f.partial(1), p2 = f.partial(2), p3 = f.partial(3);
  SphereSymbol h11 = p1.partial(1), h12 = p1.partial(2), h13 = p1.partial(3);
  SphereSymbol h22 = p2.partial(2), h23 = p2.partial(3), h33 = p3.partial(3);

  auto refine = [&](std::array<double, 3> x, double sign) {
    for (int it = 0; it < newton_steps; ++it) {
      std::array<double, 3> g{sign * p1.eval(x), sign * p2.eval(x), sign * p3.eval(x)};
      double gx = g[0] * x[0] + g[1] * x[1] + g[2] * x[2];
      std::array<double, 3> gt{g[0] - gx * x[0], g[1] - gx * x[1], g[2] - gx * x[2]};
      // orthonormal tangent basis
      std::array<double, 3> u{-x[1], x[0], 0.0};
      double un = std::sqrt(u[0] * u[0] + u[1] * u[1]);
      if (un < 1e-8) {
        u = {1.0, 0.0, 0.0};
        double ux = u[0] * x[0];
        u = {u[0] - ux * x[0], -ux * x[1], -ux * x[2]};
        un = std::sqrt(u[0] * u[0] + u[1] * u[1] + u[2] * u[2]);
      }
      for (auto& c : u) c /= un;
      std::array<double, 3> v{x[1] * u[2] - x[2] * u[1], x[2] * u[0] - x[0] * u[2],
                              x[0] * u[1] - x[1] * u[0]};
      double H[3][3] = {{sign * h11.eval(x), sign * h12.eval(x), sign * h13.eval(x)},
                        {sign * h12.eval(x), sign * h22.eval(x), sign * h23.eval(x)},
                        {sign * h13.eval(x), sign * h23.eval(x), sign * h33.eval(x)}};
      auto quad = [&](const std::array<double, 3>& a, const std::array<double, 3>& b) {
        double s = 0;
        for (int r = 0; r < 3; ++r)
          for (int c = 0; c < 3; ++c) s += a[r] * H[r][c] * b[c];
        return s;
      };
      double huu = quad(u, u) - gx, huv = quad(u, v), hvv = quad(v, v) - gx;
      double bu = gt[0] * u[0] + gt[1] * u[1] + gt[2] * u[2];
      double bv = gt[0] * v[0] + gt[1] * v[1] + gt[2] * v[2];
      double det = huu * hvv - huv * huv;
      double su, sv;
      if (std::abs(det) > 1e-14 && huu < 0 && det > 0) {
        su = -(hvv * bu - huv * bv) / det;
        sv = -(huu * bv - huv * bu) / det;
      } else {
        su = 0.1 * bu;  // ascent fallback
        sv = 0.1 * bv;
      }
      std::array<double, 3> xn{x[0] + su * u[0] + sv * v[0], x[1] + su * u[1] + sv * v[1],
                               x[2] + su * u[2] + sv * v[2]};
      double nn = std::sqrt(xn[0] * xn[0] + xn[1] * xn[1] + xn[2] * xn[2]);
      if (nn == 0) break;
      for (auto& c : xn) c /= nn;
      if (sign * f.eval(xn) >= sign * f.eval(x))
        x = xn;
      else
        break;
    }
    return std::abs(f.eval(x));
  };

  double best = 0;
  std::vector<std::pair<double, std::array<double, 3>>> top_pos, top_neg;
  const double golden = (1.0 + std::sqrt(5.0)) / 2.0;
  for (int i = 0; i < lattice_points; ++i) {
    double z = 1.0 - (2.0 * i + 1.0) / lattice_points;
    double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
    double theta = 2.0 * M_PI * std::fmod(i / golden, 1.0);
    std::array<double, 3> x{rho * std::cos(theta), rho * std::sin(theta), z};
    double v = f.eval(x);
    best = std::max(best, std::abs(v));
    auto push = [&](auto& heap, double val) {
      heap.emplace_back(val, x);
      std::sort(heap.begin(), heap.end(),
                [](const auto& a, const auto& b) { return a.first > b.first; });
      if (heap.size() > 6) heap.pop_back();
    };
    push(top_pos, v);
    push(top_neg, -v);
  }
  for (const auto& [v, x] : top_pos) best = std::max(best, refine(x, +1.0));
  for (const auto& [v, x] : top_neg) best = std::max(best, refine(x, -1.0));
  return best;
}

}  // namespace btq

#endif
