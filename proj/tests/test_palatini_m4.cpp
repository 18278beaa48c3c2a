// SPDX-License-Identifier: Apache-2.0
#include <cmath>

#include <gtest/gtest.h>

#include "ncgeom/extended_precision.hpp"
#include "ncgeom/palatini_m4.hpp"

namespace ncg::m4 {
namespace {

double max_entry(const std::array<Block, 8>& res) {
  double m = 0.0;
  for (const auto& b : res) m = std::max(m, b.cwiseAbs().maxCoeff());
  return m;
}

TEST(Generators, Invariants) {
  const auto& g = generators();
  EXPECT_EQ(bracket<double>(g.f1, g.f2), Block::Zero());
  Block sq1 = Block::Zero(), sq2 = Block::Zero();
  sq1(0, 0) = sq1(1, 1) = -1.0;
  sq2(2, 2) = sq2(3, 3) = -1.0;
  EXPECT_EQ(g.f1 * g.f1, sq1);
  EXPECT_EQ(g.f2 * g.f2, sq2);
}

TEST(BlockMetric, Validation) {
  EXPECT_THROW(BlockMetric(Block::Zero(), Block::Zero(), Block::Identity()), Error);
  Matrix8 m = Matrix8::Identity();
  m(0, 4) = 0.5;
  EXPECT_THROW(BlockMetric::from_matrix(m), Error);
  m(4, 0) = 0.5;
  EXPECT_NO_THROW(BlockMetric::from_matrix(m));
}

TEST(BlockInverse, Identity) {
  const BlockMetric id(Block::Identity(), Block::Zero(), Block::Identity());
  const auto inv = block_inverse(id);
  EXPECT_EQ(inv(0, 0), Block::Identity());
  EXPECT_EQ(inv(1, 1), Block::Identity());
  EXPECT_EQ(inv(0, 1), Block::Zero());
  EXPECT_EQ(inv(1, 0), Block::Zero());
}

TEST(BlockInverse, G0IsItsOwnInverse) {
  const auto g0 = paper_g0();
  EXPECT_LT((block_inverse(g0).assembled() - g0.assembled()).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_LT((g0.assembled() * g0.assembled() - Matrix8::Identity()).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(BlockInverse, CounterexampleIsAsymmetric) {
  const auto g = paper_counterexample_metric();
  const auto inv = block_inverse(g);
  EXPECT_LT((g.assembled() * inv.assembled() - Matrix8::Identity()).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_GT((inv(0, 1) - inv(1, 0)).norm(), 1e-6);
}

TEST(Action, G0Nabla0IsMinusOne) {
  EXPECT_NEAR(action_m4(paper_g0(), paper_nabla0()), -1.0, 1e-12);
  EXPECT_NEAR(action_m4(paper_g0(), cast_connection<Quad>(paper_nabla0())), -1.0, 1e-15);
}

TEST(Action, ZeroConnection) {
  Rng rng(31);
  for (int t = 0; t < 5; ++t) EXPECT_EQ(action_m4(random_block_metric(rng), zero_connection()), 0.0);
}

TEST(CriticalConnection, IdentityTable) {
  const auto conn = critical_connection(BlockMetric(Block::Identity(), Block::Zero(), Block::Identity()));
  const auto& f = generators();
  const Block id = Block::Identity();
  EXPECT_EQ(conn(0, 1, 1), -id);  // Gamma^1_{22}
  EXPECT_EQ(conn(0, 1, 0), -id);  // Gamma^1_{21}
  EXPECT_EQ(conn(1, 0, 1), id);   // Gamma^2_{12}
  EXPECT_EQ(conn(1, 0, 0), id);   // Gamma^2_{11}
  EXPECT_EQ(conn(1, 1, 1), -f.f2);
  EXPECT_EQ(conn(0, 0, 1), -f.f2);
  EXPECT_EQ(conn(1, 1, 0), -f.f1);
  EXPECT_EQ(conn(0, 0, 0), -f.f1);
}

TEST(CriticalConnection, RicciFlatAndStationaryInQuad) {
  Rng rng(32);
  for (int t = 0; t < 20; ++t) {
    const auto g = random_block_metric(rng);
    const auto conn = critical_connection<Quad>(g);
    const double scale = block_inverse(g).assembled().cwiseAbs().maxCoeff();
    EXPECT_LT(static_cast<double>(ricci_blocks(conn).cwiseAbs().maxCoeff()), 1e-10 * scale);
    EXPECT_LT(max_entry(connection_residuals(g, conn)), 1e-10 * scale * scale);
    const auto field = field_residual(g, conn);
    EXPECT_LT(field.residual.cwiseAbs().maxCoeff(), 1e-10);
    EXPECT_LT(std::abs(field.trace_ginv_r), 1e-10);
    EXPECT_LT(std::abs(action_m4(g, conn)), 1e-10);
  }
}

TEST(CriticalConnection, WellConditionedInDouble) {
  // Near-identity metrics keep the double evaluation accurate.
  Rng rng(33);
  for (int t = 0; t < 10; ++t) {
    const Block a = Block::Identity() + 0.1 * uniform_matrix<Block>(rng, 4, 4);
    const Block b = Block::Identity() + 0.1 * uniform_matrix<Block>(rng, 4, 4);
    const Block c = 0.1 * uniform_matrix<Block>(rng, 4, 4);
    const BlockMetric g(a, c, b);
    const auto conn = critical_connection(g);
    EXPECT_LT(ricci_blocks(conn).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LT(max_entry(connection_residuals(g, conn)), 1e-12);
    EXPECT_LT(std::abs(action_m4(g, conn)), 1e-12);
  }
}

TEST(Residuals, NonzeroAwayFromCriticalPoints) {
  const auto g0 = paper_g0();
  const auto n0 = paper_nabla0();
  EXPECT_GT(field_residual(g0, n0).residual.cwiseAbs().maxCoeff(), 0.1);
  EXPECT_GT(max_entry(connection_residuals(g0, n0)), 0.1);
  // With Gamma = 0 at g = I only the Gamma-free bracket terms survive and
  // they vanish, since g^{ij} commutes with F_i.
  const BlockMetric id(Block::Identity(), Block::Zero(), Block::Identity());
  EXPECT_EQ(max_entry(connection_residuals(id, zero_connection())), 0.0);
  EXPECT_EQ(field_residual(id, zero_connection()).residual, Matrix8::Zero());
}

TEST(GradientSlot, CoversEachResidualOnce) {
  std::array<int, 8> hits{};
  for (std::size_t k = 0; k < 2; ++k)
    for (std::size_t j = 0; j < 2; ++j)
      for (std::size_t i = 0; i < 2; ++i) ++hits[static_cast<std::size_t>(gradient_slot(k, j, i).residual)];
  for (int h : hits) EXPECT_EQ(h, 1);
}

TEST(Variation, MetricDerivativeMatchesFiniteDifference) {
  Rng rng(34);
  for (int t = 0; t < 20; ++t) {
    const auto g = random_block_metric(rng, 1e3);
    const auto conn = random_connection(rng, 0.5);
    const auto h = random_perturbation(rng);
    for (const auto& tr : {ActionTrace::quarter_volume(), ActionTrace::plain()}) {
      const auto d = metric_variation_derivative(g, conn, h, tr);
      EXPECT_NEAR(d.finite_difference, d.analytic, 1e-6 * std::max(1.0, std::abs(d.analytic))) << t;
    }
  }
}

TEST(Variation, ConnectionDerivativeMatchesFiniteDifference) {
  Rng rng(35);
  for (int t = 0; t < 20; ++t) {
    const auto g = random_block_metric(rng, 1e3);
    const auto conn = random_connection(rng, 0.5);
    const auto a = random_connection(rng);
    for (const auto& tr : {ActionTrace::quarter_volume(), ActionTrace::plain()}) {
      const auto d = connection_variation_derivative(g, conn, a, tr);
      EXPECT_NEAR(d.finite_difference, d.analytic, 1e-6 * std::max(1.0, std::abs(d.analytic))) << t;
    }
  }
}

TEST(Variation, RejectsAsymmetricPerturbation) {
  Matrix8 h = Matrix8::Zero();
  h(0, 4) = 1.0;
  EXPECT_THROW(BlockPerturbation::from_matrix(h), Error);
}

TEST(PlainTrace, CriticalPointsStillHaveZeroAction) {
  Rng rng(36);
  for (int t = 0; t < 10; ++t) {
    const auto g = random_block_metric(rng);
    EXPECT_LT(std::abs(action_m4(g, critical_connection<Quad>(g), ActionTrace::plain())), 1e-10);
  }
  // Without the 1/4 normalizer (and |det g0| = 1) the value is 4 times larger.
  EXPECT_NEAR(action_m4(paper_g0(), paper_nabla0(), ActionTrace::plain()), -4.0, 1e-12);
}

}  // namespace
}  // namespace ncg::m4
