// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <numbers>
#include <sstream>

#include <gtest/gtest.h>

#include "ncgeom/sampling.hpp"
#include "ncgeom/torus_lattice.hpp"

namespace ncg::torus {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

Matrix diag2(double a, double b) {
  Matrix g = Matrix::Zero(2, 2);
  g(0, 0) = a;
  g(1, 1) = b;
  return g;
}

TEST(Grid, Validation) {
  EXPECT_THROW(TorusGrid(0, 16), Error);
  EXPECT_THROW(TorusGrid(4, 16), Error);
  EXPECT_THROW(TorusGrid(1, 4), Error);
  const TorusGrid g(2, 8);
  EXPECT_EQ(g.size(), 64u);
  EXPECT_EQ(g.neighbor(g.index({7, 0, 0}), 0, 1), g.index({0, 0, 0}));
}

TEST(Quadrature, TrapezoidIsExactOnLowModes) {
  const TorusGrid g(2, 16);
  LatticeField f{std::vector<double>(g.size())};
  for (std::size_t p = 0; p < g.size(); ++p) {
    const auto x = g.position(p);
    f[p] = 1.0 + std::sin(x[0]) * std::cos(3.0 * x[1]) + std::pow(std::cos(x[0]), 2);
  }
  EXPECT_NEAR(integrate(g, f), 1.5 * kTwoPi * kTwoPi, 1e-12);
}

TEST(Derivative, ConstantIsExactZero) {
  const TorusGrid g(1, 16);
  const LatticeField f{std::vector<double>(g.size(), 3.5)};
  for (auto order : {DerivativeOrder::Second, DerivativeOrder::Fourth}) {
    for (double v : derivative(g, f, 0, order).values) EXPECT_EQ(v, 0.0);
  }
}

TEST(Model, Construction) {
  const auto flat = build_model(1, 2, 16, constant_field(Matrix::Identity(1, 1)), constant_field(Matrix::Identity(3, 3)));
  EXPECT_EQ(flat.frame_size(), 4u);
  Rng rng(41);
  const Matrix g0 = random_spd(rng, 3);
  auto varying = [&g0](const Point& x) -> Matrix { return (1.0 + 0.5 * std::sin(x[0])) * g0; };
  const auto model = build_model(2, 2, 16, constant_field(diag2(1.0, 2.0)), varying);
  EXPECT_FALSE(quantum_block_is_constant(model));
  EXPECT_TRUE(quantum_block_is_constant(flat));
}

TEST(Model, RejectsCrossBlock) {
  Matrix full = Matrix::Identity(4, 4);
  full(0, 2) = full(2, 0) = 0.1;
  try {
    build_model(1, 2, 16, constant_field(full));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::InvalidArgument);
    EXPECT_NE(std::string(e.what()).find("cross block"), std::string::npos);
  }
  EXPECT_NO_THROW(build_model(1, 2, 16, constant_field(Matrix::Identity(4, 4))));
}

TEST(Model, RejectsSingularPointWithLocation) {
  // sin vanishes at x = 0 and pi.
  auto gc = [](const Point& x) -> Matrix { return Matrix::Constant(1, 1, std::sin(x[0])); };
  try {
    build_model(1, 2, 16, gc, constant_field(Matrix::Identity(3, 3)));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::DegenerateMetric);
    EXPECT_NE(std::string(e.what()).find("grid point (0)"), std::string::npos);
  }
}

TEST(Action, ConstantFieldsAreExact) {
  Rng rng(42);
  for (int m : {1, 2}) {
    const Matrix gc = random_spd(rng, m);
    const Matrix gq = random_spd(rng, 3);
    const auto model = build_model(m, 2, 16, constant_field(gc), constant_field(gq));
    const auto c = structure_constants(sl_basis(2));
    const double e_q = levi_civita_action(CentreMetric(gq), c, 2).value;
    const double expected = e_q * std::sqrt(gc.determinant()) * std::pow(kTwoPi, m);
    EXPECT_NEAR(total_action(model), expected, 1e-10 * std::abs(expected));
    // The closed-form expression for E(g_q) is exactly twice the pipeline.
    const auto split = split_action_constant_gq(model);
    EXPECT_NEAR(split.quantum_action / split.quantum_closed_form, 0.5, 1e-10);
  }
}

TEST(Action, FlatClassicalBlockSplit) {
  const double a = 1.5, b = 0.75;
  Rng rng(43);
  const auto model =
      build_model(2, 2, 16, constant_field(diag2(a * a, b * b)), constant_field(random_symmetric_invertible(rng, 3)));
  const auto split = split_action_constant_gq(model);
  EXPECT_EQ(split.classical, 0.0);
  EXPECT_NEAR(split.volume, kTwoPi * kTwoPi * a * b, 1e-12);
  EXPECT_NEAR(split.total(), total_action(model), 1e-6 * std::abs(split.total()));
}

TEST(Action, SplitWithCurvedClassicalBlock) {
  Rng rng(44);
  const auto model = build_model(2, 2, 32, conformal_field(Matrix::Identity(2, 2), 0.2, 0),
                                 constant_field(random_spd(rng, 3)));
  const auto split = split_action_constant_gq(model);
  EXPECT_NEAR(split.total(), total_action(model), 1e-6 * std::abs(split.total()));
}

TEST(Action, SplitRejectsVaryingQuantumBlock) {
  auto gq = [](const Point& x) -> Matrix { return (1.0 + 0.5 * std::sin(x[0])) * Matrix::Identity(3, 3); };
  const auto model = build_model(1, 2, 16, constant_field(Matrix::Identity(1, 1)), gq);
  EXPECT_THROW(split_action_constant_gq(model), Error);
}

TEST(ClassicalOracle, FlatAndConstantMetricsVanish) {
  Rng rng(45);
  for (int m : {1, 2, 3}) {
    const auto model = build_model(m, 2, 8, constant_field(random_spd(rng, m)), constant_field(Matrix::Identity(3, 3)));
    EXPECT_EQ(classical_eh_oracle(model), 0.0);
    EXPECT_EQ(classical_action(model), 0.0);
  }
}

TEST(ClassicalOracle, ConformalDensityMatchesEngine) {
  const auto model = build_model(2, 2, 64, conformal_field(Matrix::Identity(2, 2), 0.3, 0),
                                 constant_field(Matrix::Identity(3, 3)));
  const auto engine = classical_density(model);
  const auto oracle = classical_scalar_density_oracle(model.grid, classical_metric_points(model));
  // Analytic R sqrt(g) for e^{2 phi} I on T^2 is -2 phi'' = 2 eps sin x.
  double worst = 0.0, worst_exact = 0.0;
  for (std::size_t p = 0; p < oracle.size(); ++p) {
    worst = std::max(worst, std::abs(-engine[p] - oracle[p]));
    worst_exact = std::max(worst_exact, std::abs(oracle[p] - 0.6 * std::sin(model.grid.position(p)[0])));
  }
  EXPECT_LT(worst / 0.6, 1e-3);
  EXPECT_LT(worst_exact / 0.6, 1e-2);
}

TEST(Convergence, ConstantFieldsAreExact) {
  TorusSetup setup{1, 2, constant_field(Matrix::Identity(1, 1)), constant_field(2.0 * Matrix::Identity(3, 3)),
                   DerivativeOrder::Second};
  const auto rep = grid_convergence(setup, {8, 16, 32});
  EXPECT_TRUE(rep.exact);
}

TEST(Convergence, SecondOrderForVaryingQuantumBlock) {
  Rng rng(46);
  const Matrix base = random_spd(rng, 3, 1.0);
  auto gq = [base](const Point& x) -> Matrix {
    Matrix g = (1.0 + 0.5 * std::sin(x[0])) * base;
    g(0, 0) *= 1.0 + 0.2 * std::cos(x[0]);
    return g;
  };
  TorusSetup setup{1, 2, constant_field(Matrix::Identity(1, 1)), gq, DerivativeOrder::Second};
  const auto rep = grid_convergence(setup, {16, 32, 64});
  EXPECT_FALSE(rep.exact);
  EXPECT_GT(rep.observed_order, 1.9);
  EXPECT_LT(rep.observed_order, 2.2);
  setup.order = DerivativeOrder::Fourth;
  EXPECT_GT(grid_convergence(setup, {16, 32, 64}).observed_order, 3.5);
}

TEST(Convergence, RejectsBadResolutions) {
  TorusSetup setup{1, 2, constant_field(Matrix::Identity(1, 1)), constant_field(Matrix::Identity(3, 3)),
                   DerivativeOrder::Second};
  EXPECT_THROW(grid_convergence(setup, {16, 32}), Error);
  EXPECT_THROW(grid_convergence(setup, {16, 24, 48}), Error);
}

TEST(Tabulated, RoundTrip) {
  Rng rng(47);
  const Matrix base = random_spd(rng, 3, 1.0);
  const Matrix dir = random_symmetric_invertible(rng, 3);
  const auto model = build_model(2, 2, 8, conformal_field(diag2(1.0, 2.0), 0.1, 1), fourier_field(base, dir, 0.05));
  std::stringstream ss;
  write_tabulated(ss, model);
  const auto back = read_tabulated(ss);
  EXPECT_EQ(back.grid.size(), model.grid.size());
  for (std::size_t p = 0; p < model.grid.size(); ++p) {
    EXPECT_EQ(back.classical_at(p), model.classical_at(p));
    EXPECT_EQ(back.quantum_at(p), model.quantum_at(p));
  }
  EXPECT_EQ(total_action(back), total_action(model));
}

TEST(Tabulated, ParseErrors) {
  auto kind_of = [](const std::string& text) {
    std::istringstream is(text);
    try {
      read_tabulated(is);
    } catch (const Error& e) {
      return e.kind();
    }
    return ErrorKind::InvalidArgument;
  };
  std::string ok_line = "1 1 0 1 0 0 1\n";  // g_c then lower triangle of I_3
  std::string body;
  for (int i = 0; i < 8; ++i) body += ok_line;
  EXPECT_EQ(kind_of(""), ErrorKind::Parse);
  EXPECT_EQ(kind_of("1 2\n"), ErrorKind::Parse);
  EXPECT_EQ(kind_of("1 2 8\n" + ok_line), ErrorKind::Parse);
  EXPECT_EQ(kind_of("1 2 8\n" + body + ok_line), ErrorKind::Parse);
  EXPECT_EQ(kind_of("1 2 8\n1 1 0 x 0 0 1\n" + body), ErrorKind::Parse);
  EXPECT_EQ(kind_of("1 2 8\n" + body.substr(0, body.size() - 3) + "\n"), ErrorKind::Parse);
  std::istringstream good("1 2 8\n" + body);
  EXPECT_NO_THROW(read_tabulated(good));
}

}  // namespace
}  // namespace ncg::torus
