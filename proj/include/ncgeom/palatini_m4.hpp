// SPDX-License-Identifier: Apache-2.0
//
// Toy model A = M_4(R) with the abelian frame so(2) + so(2) generated by the
// inner derivations [F_1, .], [F_2, .]. Metrics take values in M_4(R) and are
// stored as 2x2 arrays of 4x4 blocks (an 8x8 real matrix).
//
// Block and frame indices are 0-based in code: block (0, 1) is g_{12}.
//
// The kernels are templated on the scalar of the connection so that they can
// also be run in extended precision; metrics are always double.
#pragma once

#include <array>
#include <cmath>
#include <string>

#include <Eigen/Dense>

#include "ncgeom/einstein_action.hpp"
#include "ncgeom/errors.hpp"
#include "ncgeom/geometry.hpp"
#include "ncgeom/rings.hpp"
#include "ncgeom/sampling.hpp"

namespace ncg::m4 {

template <class S>
using BlockT = Eigen::Matrix<S, 4, 4>;
template <class S>
using Matrix8T = Eigen::Matrix<S, 8, 8>;
template <class S>
using ConnectionT = Connection<BlockT<S>>;

using Block = BlockT<double>;
using Matrix8 = Matrix8T<double>;
using Ring = MatrixRing<Block>;
using M4Connection = ConnectionT<double>;

inline constexpr double kMinAbsDet = 1e-10;

template <class S>
struct GeneratorsT {
  BlockT<S> f1;
  BlockT<S> f2;

  const BlockT<S>& operator[](std::size_t i) const { return i == 0 ? f1 : f2; }
};
using Generators = GeneratorsT<double>;

/// F_1 = blockdiag(F, 0), F_2 = blockdiag(0, F), F = [[0, 1], [-1, 0]].
template <class S = double>
const GeneratorsT<S>& generators() {
  static const GeneratorsT<S> gens = [] {
    BlockT<S> f1 = BlockT<S>::Zero();
    BlockT<S> f2 = BlockT<S>::Zero();
    f1(0, 1) = 1;
    f1(1, 0) = -1;
    f2(2, 3) = 1;
    f2(3, 2) = -1;
    return GeneratorsT<S>{f1, f2};
  }();
  return gens;
}

template <class S>
BlockT<S> bracket(const BlockT<S>& a, const BlockT<S>& b) {
  return a * b - b * a;
}

/// c = 0 (the two derivations commute), X_i acts as [F_i, .].
template <class S = double>
Frame<MatrixRing<BlockT<S>>> frame() {
  std::vector<typename Frame<MatrixRing<BlockT<S>>>::Action> actions;
  for (std::size_t i = 0; i < 2; ++i) {
    actions.emplace_back([i](const BlockT<S>& x) -> BlockT<S> { return bracket<S>(generators<S>()[i], x); });
  }
  return Frame<MatrixRing<BlockT<S>>>(MatrixRing<BlockT<S>>{}, StructureTensor::zero(2), std::move(actions));
}

template <class S>
Matrix8T<S> assemble(const BlockT<S>& b11, const BlockT<S>& b12, const BlockT<S>& b21, const BlockT<S>& b22) {
  Matrix8T<S> m;
  m.template topLeftCorner<4, 4>() = b11;
  m.template topRightCorner<4, 4>() = b12;
  m.template bottomLeftCorner<4, 4>() = b21;
  m.template bottomRightCorner<4, 4>() = b22;
  return m;
}

template <class S>
BlockT<S> block_of(const Matrix8T<S>& m, int i, int j) {
  return m.template block<4, 4>(4 * i, 4 * j);
}

/// Swaps the off-diagonal blocks (transpose in the algebra of 2x2 matrices
/// over M_4(R); the blocks themselves are not transposed).
template <class S>
Matrix8T<S> block_transpose(const Matrix8T<S>& m) {
  return assemble<S>(block_of<S>(m, 0, 0), block_of<S>(m, 1, 0), block_of<S>(m, 0, 1), block_of<S>(m, 1, 1));
}

/// Symmetric pair of off-diagonal blocks: g_{12} = g_{21} by construction.
/// Individual blocks need not be symmetric, nor the assembled 8x8 matrix.
class BlockMetric {
 public:
  BlockMetric(const Block& g11, const Block& g12, const Block& g22) : g11_(g11), g12_(g12), g22_(g22) {
    const Matrix8 full = assembled();
    if (!full.allFinite()) fail(ErrorKind::InvalidArgument, "BlockMetric: non-finite entry");
    det_ = full.determinant();
    if (std::abs(det_) < kMinAbsDet || condition_number(full) > kMaxMetricCondition) {
      fail(ErrorKind::DegenerateMetric, "BlockMetric: 8x8 assembly is singular");
    }
  }

  static BlockMetric from_matrix(const Matrix8& m) {
    if ((block_of<double>(m, 0, 1) - block_of<double>(m, 1, 0)).cwiseAbs().maxCoeff() > 0.0) {
      fail(ErrorKind::InvalidArgument, "BlockMetric: off-diagonal blocks differ (g12 != g21)");
    }
    return BlockMetric(block_of<double>(m, 0, 0), block_of<double>(m, 0, 1), block_of<double>(m, 1, 1));
  }

  const Block& g11() const noexcept { return g11_; }
  const Block& g12() const noexcept { return g12_; }
  const Block& g21() const noexcept { return g12_; }
  const Block& g22() const noexcept { return g22_; }
  const Block& block(int i, int j) const { return i == 0 ? (j == 0 ? g11_ : g12_) : (j == 0 ? g12_ : g22_); }

  Matrix8 assembled() const { return assemble<double>(g11_, g12_, g12_, g22_); }
  double determinant() const noexcept { return det_; }
  double sqrt_abs_det() const { return std::sqrt(std::abs(det_)); }

 private:
  Block g11_, g12_, g22_;
  double det_ = 0.0;
};

/// Admissible metric perturbation: h_{12} = h_{21}; no invertibility needed.
struct BlockPerturbation {
  Block h11 = Block::Zero();
  Block h12 = Block::Zero();
  Block h22 = Block::Zero();

  static BlockPerturbation from_matrix(const Matrix8& h) {
    if ((block_of<double>(h, 0, 1) - block_of<double>(h, 1, 0)).cwiseAbs().maxCoeff() > 0.0) {
      fail(ErrorKind::InvalidArgument, "metric perturbation violates h12 = h21");
    }
    return {block_of<double>(h, 0, 0), block_of<double>(h, 0, 1), block_of<double>(h, 1, 1)};
  }
  Matrix8 assembled() const { return assemble<double>(h11, h12, h12, h22); }
};

inline BlockMetric perturbed(const BlockMetric& g, const BlockPerturbation& h, double s) {
  return BlockMetric(g.g11() + s * h.h11, g.g12() + s * h.h12, g.g22() + s * h.h22);
}

/// Blocks of the 8x8 inverse. In general g^{12} != g^{21}.
template <class S>
struct InverseBlocksT {
  std::array<std::array<BlockT<S>, 2>, 2> b;

  const BlockT<S>& operator()(int i, int j) const { return b[i][j]; }
  Matrix8T<S> assembled() const { return assemble<S>(b[0][0], b[0][1], b[1][0], b[1][1]); }
};
using InverseBlocks = InverseBlocksT<double>;

/// The inverse is formed in scalar type S (the metric itself is double).
template <class S = double>
InverseBlocksT<S> block_inverse(const BlockMetric& g) {
  const Matrix8T<S> inv = g.assembled().template cast<S>().inverse();
  InverseBlocksT<S> out;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) out.b[i][j] = block_of<S>(inv, i, j);
  return out;
}

template <class S = double>
ConnectionT<S> zero_connection() {
  return ConnectionT<S>(2, BlockT<S>::Zero());
}

template <class S>
ConnectionT<S> cast_connection(const M4Connection& conn) {
  ConnectionT<S> out = zero_connection<S>();
  for (std::size_t t = 0; t < out.flat().size(); ++t) out.flat()[t] = conn.flat()[t].template cast<S>();
  return out;
}

/// r = [[R_11, R_12], [R_21, R_22]] with R_{kj} = R^i_{kij}.
template <class S>
Matrix8T<S> ricci_blocks(const ConnectionT<S>& conn) {
  static const auto fr = frame<S>();
  const auto ric = ricci_from_connection(conn, fr);
  return assemble<S>(ric(0, 0), ric(0, 1), ric(1, 0), ric(1, 1));
}

/// E = -tau (tr(g^{-1} r)) with tau = 1/4 sqrt|det g| Tr by default.
template <class S>
double action_m4(const BlockMetric& g, const ConnectionT<S>& conn,
                 const ActionTrace& trace = ActionTrace::quarter_volume()) {
  const Matrix8T<S> gi = block_inverse<S>(g).assembled();
  return -trace.weight(std::abs(g.determinant())) * static_cast<double>((gi * ricci_blocks<S>(conn)).trace());
}

struct FieldResidual {
  Matrix8 residual;          // g^{-1} r g^{-1} + (g^{-1} r g^{-1})^T, block transpose
  double trace_ginv_r = 0.0; // tr(g^{-1} r)
};

/// Evaluated in the scalar type of the connection, reported in double.
template <class S>
FieldResidual field_residual(const BlockMetric& g, const ConnectionT<S>& conn) {
  const Matrix8T<S> gi = block_inverse<S>(g).assembled();
  const Matrix8T<S> r = ricci_blocks<S>(conn);
  const Matrix8T<S> m = gi * r * gi;
  return {(m + block_transpose<S>(m)).template cast<double>(), static_cast<double>((gi * r).trace())};
}

/// Left-hand sides of the eight equations equivalent to stationarity of E
/// under Gamma -> Gamma + sA, numbered c1..c8.
template <class S>
std::array<Block, 8> connection_residuals(const BlockMetric& g, const ConnectionT<S>& conn) {
  using B = BlockT<S>;
  const InverseBlocksT<S> gi = block_inverse<S>(g);
  const B& g11 = gi(0, 0);
  const B& g12 = gi(0, 1);
  const B& g21 = gi(1, 0);
  const B& g22 = gi(1, 1);
  const B& f1 = generators<S>().f1;
  const B& f2 = generators<S>().f2;
  // G(k, j, i) = Gamma^k_{ji}, 1-based.
  auto G = [&conn](int k, int j, int i) -> const B& { return conn(k - 1, j - 1, i - 1); };
  auto br = [](const B& a, const B& b) -> B { return bracket<S>(a, b); };
  const std::array<B, 8> res = {
      g11 * G(2, 1, 2) + G(1, 2, 2) * g22 + br(G(1, 1, 2) + f2, g21),
      g11 * G(2, 1, 1) + G(1, 2, 1) * g22 + br(G(1, 1, 1) + f1, g21),
      g22 * G(1, 2, 2) + G(2, 1, 2) * g11 + br(G(2, 2, 2) + f2, g12),
      g22 * G(1, 2, 1) + G(2, 1, 1) * g11 + br(G(2, 2, 1) + f1, g12),
      g22 * G(1, 1, 2) - G(2, 2, 2) * g22 - g12 * G(2, 1, 2) - G(2, 1, 2) * g21 - br(f2, g22),
      g11 * G(2, 2, 2) - G(1, 1, 2) * g11 - g21 * G(1, 2, 2) - G(1, 2, 2) * g12 - br(f2, g11),
      g22 * G(1, 1, 1) - G(2, 2, 1) * g22 - g12 * G(2, 1, 1) - G(2, 1, 1) * g21 - br(f1, g22),
      g11 * G(2, 2, 1) - G(1, 1, 1) * g11 - g21 * G(1, 2, 1) - G(1, 2, 1) * g12 - br(f1, g11),
  };
  std::array<Block, 8> out;
  for (std::size_t m = 0; m < 8; ++m) out[m] = res[m].template cast<double>();
  return out;
}

/// For Gamma^k_{ji} (0-based), which connection residual is the gradient of
/// -tr(g^{-1} r) and with which sign: dE = sum sign * tr(residual * A^k_{ji}).
struct GradientSlot {
  int residual;
  double sign;
};
inline GradientSlot gradient_slot(std::size_t k, std::size_t j, std::size_t i) {
  static constexpr GradientSlot table[2][2][2] = {
      {{{0, -1.0}, {1, 1.0}}, {{4, 1.0}, {6, -1.0}}},
      {{{5, -1.0}, {7, 1.0}}, {{2, 1.0}, {3, -1.0}}},
  };
  return table[k][j][i];
}

/// The Ricci-flat critical connection nabla^g determined by g, with symbols
/// in scalar type S.
template <class S = double>
ConnectionT<S> critical_connection(const BlockMetric& g) {
  const InverseBlocksT<S> gi = block_inverse<S>(g);
  const BlockT<S>& f1 = generators<S>().f1;
  const BlockT<S>& f2 = generators<S>().f2;
  ConnectionT<S> c = zero_connection<S>();
  auto G = [&c](int k, int j, int i) -> BlockT<S>& { return c(k - 1, j - 1, i - 1); };
  G(1, 2, 2) = -gi(0, 0);
  G(1, 2, 1) = -gi(0, 0);
  G(2, 1, 2) = gi(1, 1);
  G(2, 1, 1) = gi(1, 1);
  G(2, 2, 2) = -f2 - gi(0, 1);
  G(2, 2, 1) = -f1 - gi(0, 1);
  G(1, 1, 2) = -f2 + gi(1, 0);
  G(1, 1, 1) = -f1 + gi(1, 0);
  return c;
}

struct VariationDerivative {
  double analytic = 0.0;
  double finite_difference = 0.0;
};

/// d/ds E(g + s h, nabla) at s = 0.
inline VariationDerivative metric_variation_derivative(
    const BlockMetric& g, const M4Connection& conn, const BlockPerturbation& h,
    const ActionTrace& trace = ActionTrace::quarter_volume(), double step = 1e-5) {
  const Matrix8 gi = g.assembled().inverse();
  const Matrix8 r = ricci_blocks(conn);
  const Matrix8 hm = h.assembled();
  const double w = trace.weight(std::abs(g.determinant()));
  const double tr_gr = (gi * r).trace();
  const double tr_hgrg = (hm * gi * r * gi).trace();
  VariationDerivative out;
  out.analytic = trace.volume_weighted ? -w * (0.5 * tr_gr * (hm * gi).trace() - tr_hgrg) : w * tr_hgrg;
  out.finite_difference =
      (action_m4(perturbed(g, h, step), conn, trace) - action_m4(perturbed(g, h, -step), conn, trace)) /
      (2.0 * step);
  return out;
}

inline M4Connection shifted(const M4Connection& conn, const M4Connection& a, double s) {
  M4Connection out = conn;
  for (std::size_t k = 0; k < 2; ++k)
    for (std::size_t j = 0; j < 2; ++j)
      for (std::size_t i = 0; i < 2; ++i) out(k, j, i) += s * a(k, j, i);
  return out;
}

/// d/ds E(g, nabla + s A) at s = 0; the analytic value pairs A with the
/// eight connection residuals.
inline VariationDerivative connection_variation_derivative(
    const BlockMetric& g, const M4Connection& conn, const M4Connection& a,
    const ActionTrace& trace = ActionTrace::quarter_volume(), double step = 1e-5) {
  const auto res = connection_residuals(g, conn);
  const double w = trace.weight(std::abs(g.determinant()));
  double pairing = 0.0;
  for (std::size_t k = 0; k < 2; ++k)
    for (std::size_t j = 0; j < 2; ++j)
      for (std::size_t i = 0; i < 2; ++i) {
        const auto slot = gradient_slot(k, j, i);
        pairing += slot.sign * (res[slot.residual] * a(k, j, i)).trace();
      }
  VariationDerivative out;
  out.analytic = w * pairing;
  out.finite_difference =
      (action_m4(g, shifted(conn, a, step), trace) - action_m4(g, shifted(conn, a, -step), trace)) /
      (2.0 * step);
  return out;
}

/// Compatibility residual in inverse-metric form over the M_4 frame.
inline double metric_compat_residual(const BlockMetric& g, const M4Connection& conn) {
  const InverseBlocks gi = block_inverse(g);
  Tensor2<Block> t(2, Block::Zero());
  for (int p = 0; p < 2; ++p)
    for (int n = 0; n < 2; ++n) t(p, n) = gi(p, n);
  static const auto fr = frame();
  return inverse_metric_compat_residual(t, conn, fr);
}

inline TorsionTensor<Block> torsion(const M4Connection& conn) {
  static const auto fr = frame();
  return ncg::torsion(conn, fr);
}

// ---------------------------------------------------------------------------
// Fixtures.

/// g_0 = g_0^{-1}: zero diagonal blocks, g_12 = g_21 = blockdiag(I_2, K).
inline BlockMetric paper_g0() {
  Block p = Block::Zero();
  p(0, 0) = 1.0;
  p(1, 1) = 1.0;
  p(2, 3) = 1.0;
  p(3, 2) = 1.0;
  return BlockMetric(Block::Zero(), p, Block::Zero());
}

/// Only nonzero symbol Gamma^1_{11} = blockdiag(0, J), J = diag(1, -1).
inline M4Connection paper_nabla0() {
  M4Connection c = zero_connection();
  Block q = Block::Zero();
  q(2, 2) = 1.0;
  q(3, 3) = -1.0;
  c(0, 0, 0) = q;
  return c;
}

/// 8x8 metric built from 2x2 blocks 2I, I, 0 whose inverse has g^{12} != g^{21}.
inline BlockMetric paper_counterexample_metric() {
  const Eigen::Matrix2d i2 = Eigen::Matrix2d::Identity();
  const Eigen::Matrix2d z2 = Eigen::Matrix2d::Zero();
  Matrix8 g;
  g << 2 * i2, z2, i2, i2,  //
      z2, i2, i2, z2,       //
      i2, i2, i2, z2,       //
      i2, z2, z2, i2;
  return BlockMetric::from_matrix(g);
}

/// Blocks g11, g22, g12 uniform in [-1, 1], resampled until cond(g) < max_condition.
inline BlockMetric random_block_metric(Rng& rng, double max_condition = 1e6) {
  for (;;) {
    const Block a = uniform_matrix<Block>(rng, 4, 4);
    const Block b = uniform_matrix<Block>(rng, 4, 4);
    const Block c = uniform_matrix<Block>(rng, 4, 4);
    const Matrix8 full = assemble(a, c, c, b);
    if (condition_number(full) < max_condition && std::abs(full.determinant()) >= kMinAbsDet) {
      return BlockMetric(a, c, b);
    }
  }
}

inline M4Connection random_connection(Rng& rng, double scale = 1.0) {
  M4Connection c = zero_connection();
  for (std::size_t k = 0; k < 2; ++k)
    for (std::size_t j = 0; j < 2; ++j)
      for (std::size_t i = 0; i < 2; ++i) c(k, j, i) = scale * uniform_matrix<Block>(rng, 4, 4);
  return c;
}

inline BlockPerturbation random_perturbation(Rng& rng) {
  return {uniform_matrix<Block>(rng, 4, 4), uniform_matrix<Block>(rng, 4, 4),
          uniform_matrix<Block>(rng, 4, 4)};
}

}  // namespace ncg::m4
