// SPDX-License-Identifier: Apache-2.0
//
// Connection / curvature / Ricci / torsion calculus over a frame of
// derivations X_0..X_{D-1}, generic in the coefficient ring.
//
// Index conventions (0-based in code):
//   [X_i, X_j]            = c^k_{ij} X_k                 c(k, i, j)
//   nabla_{X_i} X_j       = X_k (x) Gamma^k_{ji}         gamma(k, j, i)
//   (nabla^2 X_k)(X_i,X_j) = X_m (x) R^m_{kij}           R(m, k, i, j)
//   R_{kj}                = R^i_{kij}                    Ric(k, j)
//   T(X_i, X_j)           = X_k (x) T^k_{ij}             T(k, i, j)
#pragma once

#include <algorithm>
#include <cstddef>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "ncgeom/errors.hpp"
#include "ncgeom/liealg.hpp"
#include "ncgeom/rings.hpp"
#include "ncgeom/tensor.hpp"

namespace ncg {

/// A frame of derivations: structure constants plus the action of each
/// frame element on ring coefficients. An empty action is the zero
/// derivation (e.g. inner derivations acting on central coefficients).
template <CoefficientRing Ring>
class Frame {
 public:
  using value_type = typename Ring::value_type;
  using Action = std::function<value_type(const value_type&)>;

  Frame(Ring ring, StructureTensor c, std::vector<Action> actions)
      : ring_(std::move(ring)), c_(std::move(c)), actions_(std::move(actions)) {
    if (actions_.size() != c_.dim()) {
      fail(ErrorKind::ShapeMismatch, "Frame: action count differs from structure tensor dimension");
    }
  }

  /// Frame whose derivations all act trivially on coefficients.
  static Frame trivial(Ring ring, StructureTensor c) {
    std::vector<Action> none(c.dim());
    return Frame(std::move(ring), std::move(c), std::move(none));
  }

  std::size_t size() const noexcept { return c_.dim(); }
  const Ring& ring() const noexcept { return ring_; }
  const StructureTensor& structure() const noexcept { return c_; }

  bool acts_trivially(std::size_t i) const { return !actions_[i]; }

  value_type act(std::size_t i, const value_type& x) const {
    return actions_[i] ? actions_[i](x) : ring_.zero();
  }

 private:
  Ring ring_;
  StructureTensor c_;
  std::vector<Action> actions_;
};

/// Christoffel symbols; `(k, j, i)` is Gamma^k_{ji}.
template <class V>
class Connection {
 public:
  Connection() = default;
  Connection(std::size_t dim, const V& fill) : gamma_(dim, fill) {}

  std::size_t dim() const noexcept { return gamma_.dim(); }
  V& operator()(std::size_t k, std::size_t j, std::size_t i) { return gamma_(k, j, i); }
  const V& operator()(std::size_t k, std::size_t j, std::size_t i) const { return gamma_(k, j, i); }
  /// Symbols in (k, j, i) row-major order.
  std::span<V> flat() noexcept { return gamma_.flat(); }
  std::span<const V> flat() const noexcept { return gamma_.flat(); }

 private:
  Tensor3<V> gamma_;
};

template <class V>
using CurvatureTensor = Tensor4<V>;  // R(m, k, i, j)
template <class V>
using RicciTensor = Tensor2<V>;  // Ric(k, j)
template <class V>
using TorsionTensor = Tensor3<V>;  // T(k, i, j)

namespace detail {

template <class Ring>
void require_same_dim(std::size_t a, const Frame<Ring>& frame, const char* what) {
  if (a != frame.size()) fail(ErrorKind::ShapeMismatch, std::string(what) + ": frame size mismatch");
}

// R^m_{kij} for one (m, k, i, j); shared by the full tensor and the Ricci
// shortcut.
template <class Ring>
typename Ring::value_type curvature_entry(const Connection<typename Ring::value_type>& g,
                                          const Frame<Ring>& frame, std::size_t m, std::size_t k,
                                          std::size_t i, std::size_t j) {
  const auto& ring = frame.ring();
  const auto& c = frame.structure();
  const std::size_t dim = frame.size();
  auto acc = ring.zero();
  for (std::size_t n = 0; n < dim; ++n) {
    ring.accumulate_product(acc, g(m, n, i), g(n, k, j), 1.0);
    ring.accumulate_product(acc, g(m, n, j), g(n, k, i), -1.0);
  }
  if (!frame.acts_trivially(i)) ring.accumulate(acc, frame.act(i, g(m, k, j)), 1.0);
  if (!frame.acts_trivially(j)) ring.accumulate(acc, frame.act(j, g(m, k, i)), -1.0);
  for (std::size_t n = 0; n < dim; ++n) {
    const double cn = c(n, i, j);
    if (cn != 0.0) ring.accumulate(acc, g(m, k, n), -cn);
  }
  return acc;
}

}  // namespace detail

/// R^m_{kij} = Gamma^m_{ni} Gamma^n_{kj} - Gamma^m_{nj} Gamma^n_{ki}
///           + X_i(Gamma^m_{kj}) - X_j(Gamma^m_{ki}) - c^n_{ij} Gamma^m_{kn}.
/// Only i < j is evaluated; the rest is filled by antisymmetry.
template <CoefficientRing Ring>
CurvatureTensor<typename Ring::value_type> curvature_tensor(
    const Connection<typename Ring::value_type>& conn, const Frame<Ring>& frame) {
  detail::require_same_dim(conn.dim(), frame, "curvature_tensor");
  const auto& ring = frame.ring();
  const std::size_t dim = frame.size();
  CurvatureTensor<typename Ring::value_type> r(dim, ring.zero());
  for (std::size_t m = 0; m < dim; ++m)
    for (std::size_t k = 0; k < dim; ++k)
      for (std::size_t i = 0; i < dim; ++i)
        for (std::size_t j = i + 1; j < dim; ++j) {
          auto v = detail::curvature_entry(conn, frame, m, k, i, j);
          r(m, k, j, i) = ring.scale(v, -1.0);
          r(m, k, i, j) = std::move(v);
        }
  return r;
}

template <CoefficientRing Ring>
RicciTensor<typename Ring::value_type> ricci(const CurvatureTensor<typename Ring::value_type>& r,
                                             const Ring& ring) {
  const std::size_t dim = r.dim();
  RicciTensor<typename Ring::value_type> ric(dim, ring.zero());
  for (std::size_t k = 0; k < dim; ++k)
    for (std::size_t j = 0; j < dim; ++j)
      for (std::size_t i = 0; i < dim; ++i) ring.accumulate(ric(k, j), r(i, k, i, j), 1.0);
  return ric;
}

/// Ricci tensor straight from the connection, without materializing the
/// D^4 curvature tensor (used on lattices where D^4 fields would not fit).
template <CoefficientRing Ring>
RicciTensor<typename Ring::value_type> ricci_from_connection(
    const Connection<typename Ring::value_type>& conn, const Frame<Ring>& frame) {
  detail::require_same_dim(conn.dim(), frame, "ricci_from_connection");
  const auto& ring = frame.ring();
  const std::size_t dim = frame.size();
  RicciTensor<typename Ring::value_type> ric(dim, ring.zero());
  for (std::size_t k = 0; k < dim; ++k)
    for (std::size_t j = 0; j < dim; ++j)
      for (std::size_t i = 0; i < dim; ++i) {
        if (i == j) continue;
        ring.accumulate(ric(k, j), detail::curvature_entry(conn, frame, i, k, i, j), 1.0);
      }
  return ric;
}

/// T^k_{ij} = Gamma^k_{ji} - Gamma^k_{ij} - c^k_{ij} 1.
template <CoefficientRing Ring>
TorsionTensor<typename Ring::value_type> torsion(const Connection<typename Ring::value_type>& conn,
                                                 const Frame<Ring>& frame) {
  detail::require_same_dim(conn.dim(), frame, "torsion");
  const auto& ring = frame.ring();
  const auto& c = frame.structure();
  const std::size_t dim = frame.size();
  const auto one = ring.one();
  TorsionTensor<typename Ring::value_type> t(dim, ring.zero());
  for (std::size_t k = 0; k < dim; ++k)
    for (std::size_t i = 0; i < dim; ++i)
      for (std::size_t j = 0; j < dim; ++j) {
        auto v = ring.sub(conn(k, j, i), conn(k, i, j));
        if (c(k, i, j) != 0.0) ring.accumulate(v, one, -c(k, i, j));
        t(k, i, j) = std::move(v);
      }
  return t;
}

/// Levi-Civita connection of a centre-valued metric:
///   2 g_{kl} Gamma^l_{ji} = X_i g_{jk} + X_j g_{ik} - X_k g_{ij}
///                         + c^l_{ij} g_{lk} + c^l_{ki} g_{lj} + c^l_{kj} g_{li}.
/// Throws DegenerateMetric when g is (pointwise) singular.
template <CentreValuedRing Ring>
Connection<typename Ring::value_type> koszul_levi_civita(const Tensor2<typename Ring::value_type>& g,
                                                         const Frame<Ring>& frame) {
  using V = typename Ring::value_type;
  detail::require_same_dim(g.dim(), frame, "koszul_levi_civita");
  const auto& ring = frame.ring();
  const auto& c = frame.structure();
  const std::size_t dim = frame.size();
  const Tensor2<V> ginv = ring.invert(g);

  // dg[i] = X_i g, present only for nontrivially acting directions.
  std::vector<std::optional<Tensor2<V>>> dg(dim);
  for (std::size_t i = 0; i < dim; ++i) {
    if (frame.acts_trivially(i)) continue;
    Tensor2<V> d(dim, ring.zero());
    for (std::size_t a = 0; a < dim; ++a)
      for (std::size_t b = 0; b < dim; ++b) d(a, b) = frame.act(i, g(a, b));
    dg[i] = std::move(d);
  }

  Tensor3<V> rhs(dim, ring.zero());  // rhs(k, j, i)
  for (std::size_t k = 0; k < dim; ++k)
    for (std::size_t j = 0; j < dim; ++j)
      for (std::size_t i = 0; i < dim; ++i) {
        V& v = rhs(k, j, i);
        if (dg[i]) ring.accumulate(v, (*dg[i])(j, k), 1.0);
        if (dg[j]) ring.accumulate(v, (*dg[j])(i, k), 1.0);
        if (dg[k]) ring.accumulate(v, (*dg[k])(i, j), -1.0);
        for (std::size_t l = 0; l < dim; ++l) {
          if (c(l, i, j) != 0.0) ring.accumulate(v, g(l, k), c(l, i, j));
          if (c(l, k, i) != 0.0) ring.accumulate(v, g(l, j), c(l, k, i));
          if (c(l, k, j) != 0.0) ring.accumulate(v, g(l, i), c(l, k, j));
        }
      }

  Connection<V> conn(dim, ring.zero());
  for (std::size_t m = 0; m < dim; ++m)
    for (std::size_t j = 0; j < dim; ++j)
      for (std::size_t i = 0; i < dim; ++i)
        for (std::size_t k = 0; k < dim; ++k) ring.accumulate_product(conn(m, j, i), ginv(m, k), rhs(k, j, i), 0.5);
  return conn;
}

/// max over (i, j, k) of |X_i g_{jk} - Gamma^l_{ji} g_{lk} - g_{jl} Gamma^l_{ki}|.
template <CoefficientRing Ring>
double metric_compat_residual(const Tensor2<typename Ring::value_type>& g,
                              const Connection<typename Ring::value_type>& conn,
                              const Frame<Ring>& frame) {
  detail::require_same_dim(g.dim(), frame, "metric_compat_residual");
  detail::require_same_dim(conn.dim(), frame, "metric_compat_residual");
  const auto& ring = frame.ring();
  const std::size_t dim = frame.size();
  double worst = 0.0;
  for (std::size_t i = 0; i < dim; ++i)
    for (std::size_t j = 0; j < dim; ++j)
      for (std::size_t k = 0; k < dim; ++k) {
        auto v = frame.act(i, g(j, k));
        for (std::size_t l = 0; l < dim; ++l) {
          ring.accumulate_product(v, conn(l, j, i), g(l, k), -1.0);
          ring.accumulate_product(v, g(j, l), conn(l, k, i), -1.0);
        }
        worst = std::max(worst, ring.max_abs(v));
      }
  return worst;
}

/// Compatibility in inverse-metric form:
///   max |g^{pj} Gamma^n_{ji} + Gamma^p_{ji} g^{jn} + X_i g^{pn}|.
template <CoefficientRing Ring>
double inverse_metric_compat_residual(const Tensor2<typename Ring::value_type>& ginv,
                                      const Connection<typename Ring::value_type>& conn,
                                      const Frame<Ring>& frame) {
  detail::require_same_dim(ginv.dim(), frame, "inverse_metric_compat_residual");
  detail::require_same_dim(conn.dim(), frame, "inverse_metric_compat_residual");
  const auto& ring = frame.ring();
  const std::size_t dim = frame.size();
  double worst = 0.0;
  for (std::size_t i = 0; i < dim; ++i)
    for (std::size_t p = 0; p < dim; ++p)
      for (std::size_t n = 0; n < dim; ++n) {
        auto v = frame.act(i, ginv(p, n));
        for (std::size_t j = 0; j < dim; ++j) {
          ring.accumulate_product(v, ginv(p, j), conn(n, j, i), 1.0);
          ring.accumulate_product(v, conn(p, j, i), ginv(j, n), 1.0);
        }
        worst = std::max(worst, ring.max_abs(v));
      }
  return worst;
}

/// Leibniz defect |X_i(ab) - X_i(a) b - a X_i(b)| of one frame direction.
template <CoefficientRing Ring>
double leibniz_residual(const Frame<Ring>& frame, std::size_t i, const typename Ring::value_type& a,
                        const typename Ring::value_type& b) {
  const auto& ring = frame.ring();
  auto v = frame.act(i, ring.mul(a, b));
  ring.accumulate_product(v, frame.act(i, a), b, -1.0);
  ring.accumulate_product(v, a, frame.act(i, b), -1.0);
  return ring.max_abs(v);
}

template <class V, std::size_t Rank, class Ring>
double max_abs(const IndexArray<V, Rank>& t, const Ring& ring) {
  double worst = 0.0;
  for (const auto& v : t.flat()) worst = std::max(worst, ring.max_abs(v));
  return worst;
}

template <class V, class Ring>
double max_abs(const Connection<V>& conn, const Ring& ring) {
  double worst = 0.0;
  const std::size_t d = conn.dim();
  for (std::size_t k = 0; k < d; ++k)
    for (std::size_t j = 0; j < d; ++j)
      for (std::size_t i = 0; i < d; ++i) worst = std::max(worst, ring.max_abs(conn(k, j, i)));
  return worst;
}

// ---------------------------------------------------------------------------
// Constant centre-valued metrics on a matrix Lie algebra.

inline Tensor2<double> to_tensor(const Matrix& m) {
  Tensor2<double> t(static_cast<std::size_t>(m.rows()), 0.0);
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) t(i, j) = m(i, j);
  return t;
}

/// Frame of inner derivations of M_n(R) acting on central (scalar)
/// coefficients, i.e. trivially.
inline Frame<ScalarRing> centre_frame(const StructureTensor& c, int n) {
  return Frame<ScalarRing>::trivial(ScalarRing{n}, c);
}

/// Gamma^i_{jk} = 1/2 (c^i_{kj} + g^{il} g_{jn} c^n_{lk} + g^{il} g_{kn} c^n_{lj}),
/// with nabla_{E_j} E_k = Gamma^i_{kj} E_i (the frame convention above).
inline Connection<double> torsion_part_formula(const Matrix& g, const StructureTensor& c) {
  const auto d = static_cast<std::size_t>(g.rows());
  if (g.rows() != g.cols() || d != c.dim()) {
    fail(ErrorKind::ShapeMismatch, "torsion_part_formula: metric and structure tensor disagree");
  }
  if (condition_number(g) > kMaxMetricCondition) {
    fail(ErrorKind::DegenerateMetric, "torsion_part_formula: singular metric");
  }
  const Matrix gi = g.inverse();
  auto at = [](const Matrix& m, std::size_t a, std::size_t b) {
    return m(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
  };
  Connection<double> out(d, 0.0);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j)
      for (std::size_t k = 0; k < d; ++k) {
        double s = c(i, k, j);
        for (std::size_t l = 0; l < d; ++l)
          for (std::size_t n = 0; n < d; ++n) {
            s += at(gi, i, l) * at(g, j, n) * c(n, l, k) + at(gi, i, l) * at(g, k, n) * c(n, l, j);
          }
        out(i, j, k) = 0.5 * s;
      }
  return out;
}

}  // namespace ncg
