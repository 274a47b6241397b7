#ifndef BTQ_SYMBOL_PARSE_HPP
#define BTQ_SYMBOL_PARSE_HPP

#include <cctype>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "btq/kernel_poly.hpp"
#include "btq/rational.hpp"
#include "btq/sphere_symbol.hpp"

namespace btq {

struct ParseError : std::runtime_error {
  std::size_t position;
  ParseError(std::size_t pos, const std::string& what)
      : std::runtime_error("parse error at position " + std::to_string(pos) + ": " + what),
        position(pos) {}
};

namespace detail {

// polynomial over named variables, the common target of the symbol grammar
struct MiniPoly {
  using Mono = std::map<std::string, int>;
  std::map<Mono, GaussianRational> terms;

  static MiniPoly constant(GaussianRational c) {
    MiniPoly p;
    if (!c.is_zero()) p.terms[{}] = std::move(c);
    return p;
  }
  static MiniPoly var(const std::string& name) {
    MiniPoly p;
    p.terms[{{name, 1}}] = GaussianRational(1);
    return p;
  }
  void add(const Mono& m, const GaussianRational& c) {
    auto [it, ins] = terms.try_emplace(m, c);
    if (!ins) {
      it->second += c;
      if (it->second.is_zero()) terms.erase(it);
    }
  }
  MiniPoly operator+(const MiniPoly& o) const {
    MiniPoly r = *this;
    for (const auto& [m, c] : o.terms) r.add(m, c);
    return r;
  }
  MiniPoly operator-(const MiniPoly& o) const {
    MiniPoly r = *this;
    for (const auto& [m, c] : o.terms) r.add(m, -c);
    return r;
  }
  MiniPoly operator*(const MiniPoly& o) const {
    MiniPoly r;
    for (const auto& [ma, ca] : terms)
      for (const auto& [mb, cb] : o.terms) {
        Mono m = ma;
        for (const auto& [name, e] : mb) m[name] += e;
        r.add(m, ca * cb);
      }
    return r;
  }
  MiniPoly pow(int e) const {
    MiniPoly r = constant(GaussianRational(1));
    for (int t = 0; t < e; ++t) r = r * *this;
    return r;
  }
};

class SymbolParser {
 public:
  explicit SymbolParser(std::string text) : text_(std::move(text)) {}

  MiniPoly parse() {
    MiniPoly p = expr();
    skip_space();
    if (pos_ != text_.size()) throw ParseError(pos_, "unexpected trailing input");
    return p;
  }

 private:
  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }
  char peek() {
    skip_space();
    return pos_ < text_.size() ? text_[pos_] : '\0';
  }

  MiniPoly expr() {
    bool neg = false;
    char c = peek();
    if (c == '+' || c == '-') {
      neg = c == '-';
      ++pos_;
    }
    MiniPoly acc = term();
    if (neg) acc = MiniPoly::constant(GaussianRational(Rational(-1))) * acc;
    while (true) {
      char op = peek();
      if (op != '+' && op != '-') break;
      ++pos_;
      MiniPoly t = term();
      acc = op == '+' ? acc + t : acc - t;
    }
    return acc;
  }

  MiniPoly term() {
    MiniPoly acc = factor();
    while (true) {
      char c = peek();
      if (c == '*') {
        ++pos_;
        acc = acc * factor();
      } else if (std::isdigit(static_cast<unsigned char>(c)) || std::isalpha(static_cast<unsigned char>(c)) ||
                 c == '(') {
        acc = acc * factor();  // juxtaposition
      } else {
        break;
      }
    }
    return acc;
  }

  MiniPoly factor() {
    MiniPoly base = atom();
    if (peek() == '^') {
      ++pos_;
      skip_space();
      std::size_t start = pos_;
      if (pos_ >= text_.size() || !std::isdigit(static_cast<unsigned char>(text_[pos_])))
        throw ParseError(pos_, "expected a nonnegative integer exponent");
      long e = 0;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        e = e * 10 + (text_[pos_] - '0');
        if (e > 64) throw ParseError(start, "exponent too large");
        ++pos_;
      }
      base = base.pow(static_cast<int>(e));
    }
    return base;
  }

  MiniPoly atom() {
    char c = peek();
    std::size_t start = pos_;
    if (c == '(') {
      ++pos_;
      MiniPoly inner = expr();
      if (peek() != ')') throw ParseError(pos_, "expected ')'");
      ++pos_;
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::string num;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_])))
        num += text_[pos_++];
      if (pos_ < text_.size() && text_[pos_] == '/') {
        ++pos_;
        if (pos_ >= text_.size() || !std::isdigit(static_cast<unsigned char>(text_[pos_])))
          throw ParseError(pos_, "expected a denominator");
        num += '/';
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_])))
          num += text_[pos_++];
      }
      return MiniPoly::constant(GaussianRational(rational_from_string(num)));
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      std::string id;
      while (pos_ < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[pos_]))))
        id += text_[pos_++];
      if (id == "i") return MiniPoly::constant(GaussianRational::unit_im());
      if (id.size() >= 2 && id[0] == 'x') {
        if (id.size() != 2 || id[1] < '1' || id[1] > '3')
          throw ParseError(start, "unknown variable '" + id + "'");
        return MiniPoly::var(id);
      }
      auto index_of = [&](const std::string& tail) -> long {
        if (tail.empty()) return -1;
        long v = 0;
        for (char ch : tail) {
          if (!std::isdigit(static_cast<unsigned char>(ch))) return -1;
          v = v * 10 + (ch - '0');
          if (v > 64) return -1;
        }
        return v >= 1 ? v : -1;
      };
      if (id.rfind("zbar", 0) == 0) {
        long j = index_of(id.substr(4));
        if (j < 0) throw ParseError(start, "unknown variable '" + id + "'");
        return MiniPoly::var("zbar" + std::to_string(j));
      }
      if (id[0] == 'z') {
        long j = index_of(id.substr(1));
        if (j < 0) throw ParseError(start, "unknown variable '" + id + "'");
        return MiniPoly::var("z" + std::to_string(j));
      }
      throw ParseError(start, "unknown variable '" + id + "'");
    }
    throw ParseError(pos_, "expected a number, variable or '('");
  }

  std::string text_;
  std::size_t pos_ = 0;
};

}  // namespace detail

// Polynomial in x1, x2, x3 with rational coefficients, reduced on the sphere.
inline SphereSymbol parse_sphere_symbol(const std::string& text,
                                        int max_degree = SphereSymbol::kDefaultMaxDegree) {
  detail::MiniPoly p = detail::SymbolParser(text).parse();
  SphereSymbol out;
  for (const auto& [mono, c] : p.terms) {
    int e[3] = {0, 0, 0};
    for (const auto& [name, exp] : mono) {
      if (name.size() == 2 && name[0] == 'x')
        e[name[1] - '1'] += exp;
      else
        throw ParseError(0, "sphere symbols may only use x1, x2, x3");
    }
    if (!c.is_real()) throw ParseError(0, "sphere symbols must have real coefficients");
    out += SphereSymbol::monomial(e[0], e[1], e[2], c.re);
  }
  if (out.degree() > max_degree) throw ParseError(0, "degree overflow");
  return out;
}

// Polynomial jet in z1..zn, zbar1..zbarn with Gaussian-rational coefficients.
inline SymbolJet parse_jet(const std::string& text, int n, int max_degree = 8) {
  detail::MiniPoly p = detail::SymbolParser(text).parse();
  KernelPoly out(n);
  for (const auto& [mono, c] : p.terms) {
    KernelMono km(n);
    for (const auto& [name, exp] : mono) {
      if (name.size() == 2 && name[0] == 'x')
        throw ParseError(0, "jets may only use z and zbar variables");
      bool bar = name.rfind("zbar", 0) == 0;
      long j = std::stol(name.substr(bar ? 4 : 1));
      if (j < 1 || j > n) throw ParseError(0, "variable index exceeds the dimension");
      km.bump(bar ? Var::Zbar : Var::Z, static_cast<int>(j - 1), exp);
    }
    out.add_term(km, c);
  }
  if (out.degree() > max_degree) throw ParseError(0, "degree overflow");
  return SymbolJet(out);
}

}  // namespace btq

#endif
