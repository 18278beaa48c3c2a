// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cassert>
#include <cstddef>
#include <span>
#include <vector>

namespace ncg {

/// Dense cube-shaped array of rank `Rank`, every index running over 0..dim-1.
/// Row-major: the last index varies fastest.
template <class T, std::size_t Rank>
class IndexArray {
 public:
  using value_type = T;

  IndexArray() = default;
  IndexArray(std::size_t dim, const T& fill) : dim_(dim), data_(count(dim), fill) {}

  std::size_t dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return data_.size(); }

  template <class... I>
    requires(sizeof...(I) == Rank)
  T& operator()(I... idx) {
    return data_[offset({static_cast<std::size_t>(idx)...})];
  }
  template <class... I>
    requires(sizeof...(I) == Rank)
  const T& operator()(I... idx) const {
    return data_[offset({static_cast<std::size_t>(idx)...})];
  }

  std::span<T> flat() noexcept { return data_; }
  std::span<const T> flat() const noexcept { return data_; }

 private:
  static std::size_t count(std::size_t dim) {
    std::size_t n = 1;
    for (std::size_t r = 0; r < Rank; ++r) n *= dim;
    return n;
  }
  std::size_t offset(const std::array<std::size_t, Rank>& idx) const {
    std::size_t off = 0;
    for (std::size_t r = 0; r < Rank; ++r) {
      assert(idx[r] < dim_);
      off = off * dim_ + idx[r];
    }
    return off;
  }

  std::size_t dim_ = 0;
  std::vector<T> data_;
};

template <class T>
using Tensor2 = IndexArray<T, 2>;
template <class T>
using Tensor3 = IndexArray<T, 3>;
template <class T>
using Tensor4 = IndexArray<T, 4>;

}  // namespace ncg
