// SPDX-License-Identifier: Apache-2.0
//
// Seeded sampling of test matrices. All randomness in the library flows
// through an explicitly passed engine.
#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "ncgeom/liealg.hpp"

namespace ncg {

using Rng = std::mt19937_64;

inline double uniform(Rng& rng, double lo = -1.0, double hi = 1.0) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

template <class Mat = Matrix>
Mat uniform_matrix(Rng& rng, Eigen::Index rows, Eigen::Index cols, double lo = -1.0, double hi = 1.0) {
  Mat m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = uniform(rng, lo, hi);
  return m;
}

/// A A^T + shift I with A uniform in [-1, 1]; symmetric positive definite.
inline Matrix random_spd(Rng& rng, Eigen::Index d, double shift = 0.5) {
  const Matrix a = uniform_matrix(rng, d, d);
  return a * a.transpose() + shift * Matrix::Identity(d, d);
}

/// Symmetric, invertible, generally indefinite; cond < max_condition and
/// |det| > 1e-12 * max|s_ij|^d.
inline Matrix random_symmetric_invertible(Rng& rng, Eigen::Index d, double max_condition = 1e4) {
  for (;;) {
    const Matrix a = uniform_matrix(rng, d, d);
    Matrix s = a + a.transpose();
    const double scale = max_abs(s);
    if (condition_number(s) < max_condition && std::abs(s.determinant()) > 1e-12 * std::pow(scale, static_cast<double>(d))) {
      return s;
    }
  }
}

}  // namespace ncg
