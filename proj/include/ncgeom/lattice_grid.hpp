// SPDX-License-Identifier: Apache-2.0
//
// Uniform periodic grid on the m-torus [0, 2pi)^m and real fields on it.
#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "ncgeom/errors.hpp"

namespace ncg::torus {

using Point = std::array<double, 3>;

class TorusGrid {
 public:
  static constexpr int kMaxDim = 3;
  static constexpr int kMinPointsPerAxis = 8;

  TorusGrid(int m, int points_per_axis) : m_(m), n_(points_per_axis) {
    if (m < 1 || m > kMaxDim) {
      fail(ErrorKind::InvalidDimension, "TorusGrid: dimension must be in 1..3, got " + std::to_string(m));
    }
    if (points_per_axis < kMinPointsPerAxis) {
      fail(ErrorKind::InvalidDimension,
           "TorusGrid: need at least 8 points per axis, got " + std::to_string(points_per_axis));
    }
    size_ = 1;
    for (int a = 0; a < m_; ++a) size_ *= static_cast<std::size_t>(n_);
  }

  int dim() const noexcept { return m_; }
  int points_per_axis() const noexcept { return n_; }
  std::size_t size() const noexcept { return size_; }
  double spacing() const noexcept { return 2.0 * std::numbers::pi / n_; }
  double cell_volume() const { return std::pow(spacing(), m_); }
  double volume() const { return std::pow(2.0 * std::numbers::pi, m_); }

  /// Row-major: axis 0 varies slowest.
  std::array<int, 3> coords(std::size_t index) const {
    std::array<int, 3> c{0, 0, 0};
    for (int a = m_ - 1; a >= 0; --a) {
      c[a] = static_cast<int>(index % static_cast<std::size_t>(n_));
      index /= static_cast<std::size_t>(n_);
    }
    return c;
  }

  std::size_t index(const std::array<int, 3>& c) const {
    std::size_t idx = 0;
    for (int a = 0; a < m_; ++a) {
      const int w = ((c[a] % n_) + n_) % n_;
      idx = idx * static_cast<std::size_t>(n_) + static_cast<std::size_t>(w);
    }
    return idx;
  }

  std::size_t neighbor(std::size_t index, int axis, int delta) const {
    auto c = coords(index);
    c[axis] += delta;
    return this->index(c);
  }

  Point position(std::size_t index) const {
    const auto c = coords(index);
    Point x{0.0, 0.0, 0.0};
    for (int a = 0; a < m_; ++a) x[a] = c[a] * spacing();
    return x;
  }

  std::string describe(std::size_t index) const {
    const auto c = coords(index);
    std::string s = "(";
    for (int a = 0; a < m_; ++a) s += (a ? ", " : "") + std::to_string(c[a]);
    return s + ")";
  }

 private:
  int m_;
  int n_;
  std::size_t size_;
};

struct LatticeField {
  std::vector<double> values;

  std::size_t size() const noexcept { return values.size(); }
  double operator[](std::size_t i) const { return values[i]; }
  double& operator[](std::size_t i) { return values[i]; }
};

/// Pairwise (tree) summation; fixed traversal order.
inline double pairwise_sum(std::span<const double> v) {
  if (v.size() <= 8) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
  }
  const std::size_t half = v.size() / 2;
  return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

/// Periodic trapezoid rule over the whole torus.
inline double integrate(const TorusGrid& grid, const LatticeField& f) {
  return pairwise_sum(f.values) * grid.cell_volume();
}

enum class DerivativeOrder { Second, Fourth };

/// Central difference along `axis`; exact zero on constant fields.
inline LatticeField derivative(const TorusGrid& grid, const LatticeField& f, int axis,
                               DerivativeOrder order = DerivativeOrder::Second) {
  LatticeField out{std::vector<double>(f.size())};
  const double h = grid.spacing();
  for (std::size_t p = 0; p < f.size(); ++p) {
    const double fp1 = f[grid.neighbor(p, axis, 1)];
    const double fm1 = f[grid.neighbor(p, axis, -1)];
    if (order == DerivativeOrder::Second) {
      out[p] = (fp1 - fm1) / (2.0 * h);
    } else {
      const double fp2 = f[grid.neighbor(p, axis, 2)];
      const double fm2 = f[grid.neighbor(p, axis, -2)];
      out[p] = (8.0 * (fp1 - fm1) - (fp2 - fm2)) / (12.0 * h);
    }
  }
  return out;
}

}  // namespace ncg::torus
