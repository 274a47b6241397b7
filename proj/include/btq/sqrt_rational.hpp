#ifndef BTQ_SQRT_RATIONAL_HPP
#define BTQ_SQRT_RATIONAL_HPP

#include <cmath>
#include <stdexcept>

#include "btq/rational.hpp"

namespace btq {

// q * sqrt(r) with q, r exact rationals, r >= 0. Closed under multiplication;
// equality goes through (sign, q^2 r), so no square-free normalization is
// needed.
struct SqrtRational {
  Rational q{0};
  Rational r{1};

  SqrtRational() = default;
  SqrtRational(Rational q_, Rational r_) : q(std::move(q_)), r(std::move(r_)) {
    if (r < 0) throw std::invalid_argument("radicand must be >= 0");
    if (q == 0 || r == 0) {
      q = 0;
      r = 1;
    } else if (mpz_perfect_square_p(r.get_num().get_mpz_t()) &&
               mpz_perfect_square_p(r.get_den().get_mpz_t())) {
      // fold exact square roots into q so rational values stay rational
      mpz_class num_rt, den_rt;
      mpz_sqrt(num_rt.get_mpz_t(), r.get_num().get_mpz_t());
      mpz_sqrt(den_rt.get_mpz_t(), r.get_den().get_mpz_t());
      q *= Rational(num_rt) / Rational(den_rt);
      r = 1;
    }
  }
  static SqrtRational of(Rational value) { return {std::move(value), Rational(1)}; }
  static SqrtRational sqrt_of(Rational radicand) { return {Rational(1), std::move(radicand)}; }

  bool is_zero() const { return q == 0; }
  int sign() const { return sgn(q); }

  SqrtRational operator*(const SqrtRational& o) const {
    return SqrtRational(q * o.q, r * o.r);
  }
  SqrtRational operator-() const {
    SqrtRational s = *this;
    s.q = -s.q;
    return s;
  }

  friend bool operator==(const SqrtRational& a, const SqrtRational& b) {
    if (a.sign() != b.sign()) return false;
    return a.q * a.q * a.r == b.q * b.q * b.r;
  }
  friend bool operator!=(const SqrtRational& a, const SqrtRational& b) { return !(a == b); }

  bool equals_rational(const Rational& x) const {
    if (sign() != sgn(x)) return false;
    return q * q * r == x * x;
  }

  double to_double() const { return q.get_d() * std::sqrt(r.get_d()); }

 private:
  static int sgn(const Rational& x) { return x > 0 ? 1 : (x < 0 ? -1 : 0); }
};

}  // namespace btq

#endif
