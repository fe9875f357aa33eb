#pragma once

#include <cstdint>
#include <vector>

#include "psgraph/errors.hpp"

namespace psgraph {

// Dense symmetric matrix of doubles, upper-triangle storage (diagonal
// included). Used for community-pair edge counts and supernode weights.
class SymMatrix {
 public:
  SymMatrix() = default;
  explicit SymMatrix(std::uint32_t n) : n_(n), data_(index(n, 0), 0.0) {}

  std::uint32_t size() const { return n_; }

  double& at(std::uint32_t i, std::uint32_t j) {
    check(i, j);
    return data_[index(std::min(i, j), std::max(i, j))];
  }
  double at(std::uint32_t i, std::uint32_t j) const {
    check(i, j);
    return data_[index(std::min(i, j), std::max(i, j))];
  }

  bool operator==(const SymMatrix&) const = default;

 private:
  // index of (i, j) with i <= j; index(n, 0) is the total element count
  std::size_t index(std::uint32_t i, std::uint32_t j) const {
    if (i == n_) return static_cast<std::size_t>(n_) * (n_ + 1) / 2;
    std::size_t row_start =
        static_cast<std::size_t>(i) * (2 * n_ - i + 1) / 2;
    return row_start + (j - i);
  }
  void check(std::uint32_t i, std::uint32_t j) const {
    if (i >= n_ || j >= n_) throw ContractError("SymMatrix: index out of range");
  }

  std::uint32_t n_ = 0;
  std::vector<double> data_;
};

}  // namespace psgraph
