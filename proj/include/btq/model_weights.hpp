#ifndef BTQ_MODEL_WEIGHTS_HPP
#define BTQ_MODEL_WEIGHTS_HPP

#include <stdexcept>
#include <vector>

#include "btq/rational.hpp"

namespace btq {

// Curvature eigenvalues 0 < a_1 <= ... <= a_n of the model space.
class ModelWeights {
 public:
  ModelWeights(int n, std::vector<Rational> a) : n_(n), a_(std::move(a)) {
    if (n_ < 1) throw std::invalid_argument("dimension must be >= 1");
    if (static_cast<int>(a_.size()) != n_)
      throw std::invalid_argument("weight count must equal the dimension");
    for (int j = 0; j < n_; ++j) {
      if (a_[j] <= 0) throw std::invalid_argument("weights must be positive");
      if (j > 0 && a_[j] < a_[j - 1])
        throw std::invalid_argument("weights must be non-decreasing");
    }
  }

  int n() const { return n_; }
  const Rational& a(int j) const {
    if (j < 0 || j >= n_) throw std::out_of_range("coordinate index out of range");
    return a_[j];
  }
  const std::vector<Rational>& weights() const { return a_; }

 private:
  int n_;
  std::vector<Rational> a_;
};

}  // namespace btq

#endif
