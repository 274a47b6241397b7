#ifndef BTQ_MULTI_INDEX_HPP
#define BTQ_MULTI_INDEX_HPP

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "btq/rational.hpp"

namespace btq {

// alpha = (alpha_1, ..., alpha_n), nonnegative exponents.
struct MultiIndex {
  std::vector<int> e;

  MultiIndex() = default;
  explicit MultiIndex(int n) : e(n, 0) {}
  MultiIndex(std::initializer_list<int> init) : e(init) { validate(); }
  explicit MultiIndex(std::vector<int> init) : e(std::move(init)) { validate(); }

  void validate() const {
    for (int x : e)
      if (x < 0) throw std::invalid_argument("multi-index entries must be nonnegative");
  }

  int size() const { return static_cast<int>(e.size()); }
  int order() const { return std::accumulate(e.begin(), e.end(), 0); }
  int operator[](int i) const { return e[i]; }
  int& operator[](int i) { return e[i]; }

  static MultiIndex unit(int n, int j) {
    MultiIndex m(n);
    m.e[j] = 1;
    return m;
  }

  MultiIndex plus(int j, int amount = 1) const {
    MultiIndex m = *this;
    m.e[j] += amount;
    if (m.e[j] < 0) throw std::invalid_argument("multi-index entry went negative");
    return m;
  }

  Rational factorial_of() const {
    mpz_class f = 1;
    for (int x : e) f *= factorial_int(static_cast<unsigned long>(x));
    return Rational(f);
  }

  friend bool operator==(const MultiIndex& a, const MultiIndex& b) { return a.e == b.e; }
  friend bool operator!=(const MultiIndex& a, const MultiIndex& b) { return !(a == b); }
  friend bool operator<(const MultiIndex& a, const MultiIndex& b) { return a.e < b.e; }
};

// All |beta| <= max_order, graded order; within a degree the entry-wise
// lexicographically larger index comes first, so for n=2, degree 1 the order
// is (1,0), (0,1).
inline std::vector<MultiIndex> multi_indices_up_to(int n, int max_order) {
  if (n < 1) throw std::invalid_argument("dimension must be >= 1");
  if (max_order < 0) throw std::invalid_argument("max_order must be >= 0");
  std::vector<MultiIndex> out;
  std::vector<int> cur(n, 0);
  auto rec = [&](auto&& self, int pos, int remaining) -> void {
    if (pos == n - 1) {
      cur[pos] = remaining;
      out.emplace_back(cur);
      return;
    }
    for (int v = remaining; v >= 0; --v) {
      cur[pos] = v;
      self(self, pos + 1, remaining - v);
    }
  };
  for (int d = 0; d <= max_order; ++d) rec(rec, 0, d);
  return out;
}

inline mpz_class binomial_int(unsigned long n, unsigned long k) {
  mpz_class r;
  mpz_bin_uiui(r.get_mpz_t(), n, k);
  return r;
}

}  // namespace btq

#endif
