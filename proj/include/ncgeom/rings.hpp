// SPDX-License-Identifier: Apache-2.0
//
// Coefficient rings for Christoffel symbols and curvature. A ring object
// carries whatever runtime shape information its values need (matrix size,
// grid) so that `zero()` and `one()` can be produced without a sample value.
#pragma once

#include <cmath>
#include <concepts>
#include <cstddef>
#include <string>

#include <Eigen/Dense>

#include "ncgeom/errors.hpp"
#include "ncgeom/liealg.hpp"
#include "ncgeom/tensor.hpp"

namespace ncg {

template <class R>
concept CoefficientRing = requires(const R& ring, typename R::value_type& acc,
                                   const typename R::value_type& a, double s) {
  typename R::value_type;
  { ring.zero() } -> std::convertible_to<typename R::value_type>;
  { ring.one() } -> std::convertible_to<typename R::value_type>;
  { ring.add(a, a) } -> std::convertible_to<typename R::value_type>;
  { ring.sub(a, a) } -> std::convertible_to<typename R::value_type>;
  { ring.mul(a, a) } -> std::convertible_to<typename R::value_type>;
  { ring.scale(a, s) } -> std::convertible_to<typename R::value_type>;
  ring.accumulate(acc, a, s);             // acc += s * a
  ring.accumulate_product(acc, a, a, s);  // acc += s * a * b
  { ring.trace(a) } -> std::convertible_to<double>;
  { ring.max_abs(a) } -> std::convertible_to<double>;
};

/// Rings whose elements are central, so a metric with entries in the ring
/// can be inverted pointwise (needed by the Koszul formula).
template <class R>
concept CentreValuedRing = CoefficientRing<R> && requires(const R& ring,
                                                          const Tensor2<typename R::value_type>& g) {
  { ring.invert(g) } -> std::same_as<Tensor2<typename R::value_type>>;
};

inline constexpr double kMaxMetricCondition = 1e12;

/// Real scalars standing for multiples of the identity of M_n(R).
/// `trace` is the M_n trace of x * 1_n.
struct ScalarRing {
  using value_type = double;
  int identity_trace = 1;

  double zero() const { return 0.0; }
  double one() const { return 1.0; }
  double add(double a, double b) const { return a + b; }
  double sub(double a, double b) const { return a - b; }
  double mul(double a, double b) const { return a * b; }
  double scale(double a, double s) const { return s * a; }
  void accumulate(double& acc, double a, double s) const { acc += s * a; }
  void accumulate_product(double& acc, double a, double b, double s) const { acc += s * a * b; }
  double trace(double a) const { return identity_trace * a; }
  double max_abs(double a) const { return std::abs(a); }

  Tensor2<double> invert(const Tensor2<double>& g) const {
    const auto d = static_cast<Eigen::Index>(g.dim());
    Matrix m(d, d);
    for (Eigen::Index i = 0; i < d; ++i)
      for (Eigen::Index j = 0; j < d; ++j) m(i, j) = g(i, j);
    if (condition_number(m) > kMaxMetricCondition) {
      fail(ErrorKind::DegenerateMetric, "metric is singular (condition number > 1e12)");
    }
    const Matrix inv = m.inverse();
    Tensor2<double> out(g.dim(), 0.0);
    for (Eigen::Index i = 0; i < d; ++i)
      for (Eigen::Index j = 0; j < d; ++j) out(i, j) = inv(i, j);
    return out;
  }
};

/// Square real matrices of a fixed (or runtime) size.
template <class Mat = Matrix>
struct MatrixRing {
  using value_type = Mat;
  Eigen::Index n = Mat::RowsAtCompileTime > 0 ? Mat::RowsAtCompileTime : 0;

  Mat zero() const { return Mat::Zero(n, n); }
  Mat one() const { return Mat::Identity(n, n); }
  Mat add(const Mat& a, const Mat& b) const { return a + b; }
  Mat sub(const Mat& a, const Mat& b) const { return a - b; }
  Mat mul(const Mat& a, const Mat& b) const { return a * b; }
  Mat scale(const Mat& a, double s) const { return s * a; }
  void accumulate(Mat& acc, const Mat& a, double s) const { acc += s * a; }
  void accumulate_product(Mat& acc, const Mat& a, const Mat& b, double s) const {
    acc.noalias() += s * (a * b);
  }
  double trace(const Mat& a) const { return static_cast<double>(a.trace()); }
  double max_abs(const Mat& a) const { return static_cast<double>(a.cwiseAbs().maxCoeff()); }
};

}  // namespace ncg
