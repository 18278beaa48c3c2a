// SPDX-License-Identifier: Apache-2.0
//
// Einstein action functional for M_n(R) with centre-valued metrics.
#pragma once

#include <cmath>
#include <cstddef>
#include <string>

#include "ncgeom/errors.hpp"
#include "ncgeom/geometry.hpp"
#include "ncgeom/liealg.hpp"
#include "ncgeom/rings.hpp"

namespace ncg {

/// |det g| > 1e-12 * max|g_ij|^d.
inline bool passes_determinant_floor(const Matrix& g) {
  const double scale = max_abs(g);
  return scale > 0.0 && std::abs(g.determinant()) > 1e-12 * std::pow(scale, static_cast<double>(g.rows()));
}

/// Symmetric, invertible real metric on a d-dimensional frame.
class CentreMetric {
 public:
  explicit CentreMetric(Matrix g) : g_(std::move(g)) {
    if (g_.rows() != g_.cols() || g_.rows() == 0) {
      fail(ErrorKind::ShapeMismatch, "CentreMetric: matrix must be square and non-empty");
    }
    if (!g_.allFinite()) fail(ErrorKind::InvalidArgument, "CentreMetric: non-finite entry");
    const double scale = max_abs(g_);
    if ((g_ - g_.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, scale)) {
      fail(ErrorKind::InvalidArgument, "CentreMetric: matrix is not symmetric");
    }
    det_ = g_.determinant();
    if (!passes_determinant_floor(g_) || condition_number(g_) > kMaxMetricCondition) {
      fail(ErrorKind::DegenerateMetric, "CentreMetric: metric is singular");
    }
  }

  const Matrix& matrix() const noexcept { return g_; }
  std::size_t dim() const noexcept { return static_cast<std::size_t>(g_.rows()); }
  double determinant() const noexcept { return det_; }
  double sqrt_abs_det() const { return std::sqrt(std::abs(det_)); }
  int det_sign() const noexcept { return det_ < 0 ? -1 : 1; }
  Tensor2<double> tensor() const { return to_tensor(g_); }

 private:
  Matrix g_;
  double det_ = 0.0;
};

inline CentreMetric inverse_metric(const CentreMetric& g) {
  const Matrix inv = g.matrix().inverse();
  return CentreMetric(0.5 * (inv + inv.transpose()));
}

/// Metric-dependent trace tau_g = normalizer * (sqrt|det g| if volume_weighted) * Tr.
struct ActionTrace {
  double normalizer = 1.0;
  bool volume_weighted = true;

  /// 1/n |det g|^{1/2} Tr on M_n(R).
  static ActionTrace matrix_algebra(int n) { return {1.0 / n, true}; }
  /// 1/4 |det g|^{1/2} Tr on M_4(R).
  static ActionTrace quarter_volume() { return {0.25, true}; }
  /// Plain Tr, no volume factor.
  static ActionTrace plain() { return {1.0, false}; }

  double weight(double abs_det) const {
    return volume_weighted ? normalizer * std::sqrt(abs_det) : normalizer;
  }
};

struct ActionValue {
  double value = 0.0;
  int det_sign = 1;
};

/// E = g^{jp} (K_{jp} + 1/2 g^{il} g_{rk} c^r_{lp} c^k_{ij}) sqrt|det g|.
inline ActionValue action_closed_form(const CentreMetric& g, const StructureTensor& c,
                                      const KillingMatrix& killing) {
  const std::size_t d = g.dim();
  if (c.dim() != d || static_cast<std::size_t>(killing.k.rows()) != d) {
    fail(ErrorKind::ShapeMismatch, "action_closed_form: shapes disagree");
  }
  const Matrix& gl = g.matrix();
  const Matrix gu = inverse_metric(g).matrix();
  auto ix = [](std::size_t a) { return static_cast<Eigen::Index>(a); };

  // q_{jp} = g^{il} g_{rk} c^r_{lp} c^k_{ij}
  double total = 0.0;
  for (std::size_t j = 0; j < d; ++j)
    for (std::size_t p = 0; p < d; ++p) {
      double q = 0.0;
      for (std::size_t i = 0; i < d; ++i)
        for (std::size_t l = 0; l < d; ++l) {
          const double gil = gu(ix(i), ix(l));
          if (gil == 0.0) continue;
          for (std::size_t r = 0; r < d; ++r) {
            const double crlp = c(r, l, p);
            if (crlp == 0.0) continue;
            for (std::size_t k = 0; k < d; ++k) q += gil * gl(ix(r), ix(k)) * crlp * c(k, i, j);
          }
        }
      total += gu(ix(j), ix(p)) * (killing.k(ix(j), ix(p)) + 0.5 * q);
    }
  return {total * g.sqrt_abs_det(), g.det_sign()};
}

/// E(g, nabla) = -tau_g(Tr (g^{jk} R_{kj})) for a centre-valued metric and
/// a connection with coefficients in any ring.
template <CoefficientRing Ring>
ActionValue action_pipeline(const CentreMetric& g, const Connection<typename Ring::value_type>& conn,
                            const Frame<Ring>& frame, const ActionTrace& trace) {
  if (g.dim() != frame.size()) fail(ErrorKind::ShapeMismatch, "action_pipeline: frame size mismatch");
  const auto& ring = frame.ring();
  const auto ric = ricci(curvature_tensor(conn, frame), ring);
  const Matrix gu = inverse_metric(g).matrix();
  auto contracted = ring.zero();
  for (std::size_t j = 0; j < g.dim(); ++j)
    for (std::size_t k = 0; k < g.dim(); ++k) {
      ring.accumulate(contracted, ric(k, j), gu(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k)));
    }
  return {-trace.weight(std::abs(g.determinant())) * ring.trace(contracted), g.det_sign()};
}

/// Einstein action of the Levi-Civita connection of a constant metric on
/// the matrix Lie algebra with structure constants `c` inside M_n(R).
inline ActionValue levi_civita_action(const CentreMetric& g, const StructureTensor& c, int n) {
  const auto frame = centre_frame(c, n);
  const auto conn = koszul_levi_civita(g.tensor(), frame);
  return action_pipeline(g, conn, frame, ActionTrace::matrix_algebra(n));
}

}  // namespace ncg
