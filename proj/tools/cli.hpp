// SPDX-License-Identifier: Apache-2.0
//
// Command-line front end. Kept in a header so tests can drive it in-process.
#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ncgeom/critical_point_solver.hpp"
#include "ncgeom/einstein_action.hpp"
#include "ncgeom/palatini_m4.hpp"
#include "ncgeom/report.hpp"
#include "ncgeom/sampling.hpp"
#include "ncgeom/torus_lattice.hpp"
#include "ncgeom/verification.hpp"

namespace ncg::cli {

enum ExitCode : int { kPass = 0, kVerificationFailed = 1, kConfigError = 2 };

struct RunConfig {
  std::string command;
  int n = 2;
  int m = 1;
  int grid = 32;
  std::string metric = "identity";
  std::string metric_file;
  std::uint64_t seed = 20240917;
  std::optional<double> tol;
  std::string out;
  std::string format = "table";
};

struct MetricSpec {
  std::string family;
  std::vector<double> params;
};

inline MetricSpec parse_metric(const std::string& text) {
  MetricSpec spec;
  const auto colon = text.find(':');
  spec.family = text.substr(0, colon);
  if (colon == std::string::npos) return spec;
  std::stringstream ss(text.substr(colon + 1));
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(tok, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != tok.size()) fail(ErrorKind::InvalidArgument, "bad metric parameter '" + tok + "'");
    spec.params.push_back(v);
  }
  return spec;
}

namespace detail {

inline void expect_params(const MetricSpec& spec, std::size_t max) {
  if (spec.params.size() > max) {
    fail(ErrorKind::InvalidArgument, "metric family '" + spec.family + "' takes at most " + std::to_string(max) +
                                         " parameter(s)");
  }
}

[[noreturn]] inline void unsupported(const MetricSpec& spec, const std::string& command) {
  fail(ErrorKind::InvalidArgument, "metric family '" + spec.family + "' is not available for " + command);
}

inline CheckRecord value(std::string name, double v, std::string claim = "") {
  return {std::move(name), std::move(claim), "-", fmt(v, 12), 0.0, true, 0.0};
}

inline CheckRecord compare(std::string name, std::string claim, double computed, double expected, double tol,
                           bool relative) {
  const double diff = std::abs(computed - expected) / (relative ? std::max(1e-300, std::abs(expected)) : 1.0);
  return {std::move(name), std::move(claim), fmt(expected, 12),
          fmt(computed, 12) + (relative ? " rel=" : " abs=") + fmt(diff, 3), tol, diff < tol, 0.0};
}

// Symmetric positive definite block metric with g12 = g21 symmetric.
inline m4::BlockMetric random_spd_block_metric(Rng& rng) {
  for (;;) {
    const m4::Block a = random_spd(rng, 4);
    const m4::Block b = random_spd(rng, 4);
    const m4::Block o = uniform_matrix<m4::Block>(rng, 4, 4, -0.3, 0.3);
    const m4::Block c = 0.5 * (o + o.transpose());
    const m4::Matrix8 full = m4::assemble<double>(a, c, c, b);
    if (Eigen::SelfAdjointEigenSolver<m4::Matrix8>(full).eigenvalues().minCoeff() > 1e-3) return m4::BlockMetric(a, c, b);
  }
}

struct M4Start {
  m4::BlockMetric metric;
  m4::M4Connection connection;
  std::string label;
};

// paper-g0 pairs with nabla_0; every other family starts from nabla^g.
inline M4Start m4_start(const MetricSpec& spec, Rng& rng, const std::string& command) {
  expect_params(spec, 0);
  if (spec.family == "paper-g0") return {m4::paper_g0(), m4::paper_nabla0(), "(g0, nabla0)"};
  std::optional<m4::BlockMetric> g;
  if (spec.family == "identity") g = m4::BlockMetric(m4::Block::Identity(), m4::Block::Zero(), m4::Block::Identity());
  if (spec.family == "paper-counterexample-8x8") g = m4::paper_counterexample_metric();
  if (spec.family == "random-spd") g = random_spd_block_metric(rng);
  if (!g) unsupported(spec, command);
  return {*g, m4::critical_connection(*g), "(" + spec.family + ", nabla^g)"};
}

inline Matrix sl_metric(const MetricSpec& spec, int n, Rng& rng) {
  expect_params(spec, 0);
  const Eigen::Index d = n * n - 1;
  if (spec.family == "identity") return Matrix::Identity(d, d);
  if (spec.family == "random-spd") return random_spd(rng, d);
  unsupported(spec, "matrix-action");
}

}  // namespace detail

inline Report matrix_action(const RunConfig& cfg) {
  if (cfg.n < 2 || cfg.n > 6) fail(ErrorKind::InvalidDimension, "matrix-action: --n must be in 2..6");
  Rng rng(cfg.seed);
  const CentreMetric g(detail::sl_metric(parse_metric(cfg.metric), cfg.n, rng));
  const auto c = structure_constants(sl_basis(cfg.n));
  Report rep("matrix-action", cfg.seed);
  const double closed = action_closed_form(g, c, killing_form(c)).value;
  const double pipe = levi_civita_action(g, c, cfg.n).value;
  rep.add(detail::value("closed-form", closed, "closed-form matrix action, adjoint-trace Killing form"));
  rep.add(detail::value("pipeline", pipe, "-tau_g(g^jk R_kj) for the Levi-Civita connection"));
  rep.add(detail::value("pipeline/closed-form", pipe / closed));
  rep.add(detail::compare("closed-form-vs-pipeline", "closed form equals the pipeline", pipe, closed,
                          cfg.tol.value_or(1e-8), true));
  return rep;
}

inline torus::TorusModel torus_model(const RunConfig& cfg) {
  if (!cfg.metric_file.empty()) {
    std::ifstream in(cfg.metric_file);
    if (!in) fail(ErrorKind::InvalidArgument, "cannot open metric file '" + cfg.metric_file + "'");
    return torus::read_tabulated(in);
  }
  const auto spec = parse_metric(cfg.metric);
  const int d = cfg.n * cfg.n - 1;
  if (cfg.n < 2 || cfg.n > 4) fail(ErrorKind::InvalidDimension, "torus-action: --n must be in 2..4");
  Rng rng(cfg.seed);
  const Matrix gc = Matrix::Identity(cfg.m, cfg.m);
  if (spec.family == "identity") {
    detail::expect_params(spec, 0);
    return torus::build_model(cfg.m, cfg.n, cfg.grid, torus::constant_field(gc),
                              torus::constant_field(Matrix::Identity(d, d)));
  }
  if (spec.family == "random-spd") {
    detail::expect_params(spec, 0);
    return torus::build_model(cfg.m, cfg.n, cfg.grid, torus::constant_field(gc), torus::constant_field(random_spd(rng, d)));
  }
  if (spec.family == "fourier-perturbed") {
    detail::expect_params(spec, 2);
    const double amplitude = spec.params.size() > 0 ? spec.params[0] : 0.2;
    const int mode = spec.params.size() > 1 ? static_cast<int>(spec.params[1]) : 1;
    const Matrix base = random_spd(rng, d, 1.0);
    const Matrix dir = random_symmetric_invertible(rng, d);
    return torus::build_model(cfg.m, cfg.n, cfg.grid, torus::constant_field(gc),
                              torus::fourier_field(base, dir, amplitude, 0, mode));
  }
  detail::unsupported(spec, "torus-action");
}

inline Report torus_action(const torus::TorusModel& model, const RunConfig& cfg) {
  Report rep("torus-action", cfg.seed);
  const double total = torus::total_action(model);
  rep.add(detail::value("total", total, "lattice action of the Levi-Civita connection"));
  rep.add(detail::value("classical-block", torus::classical_action(model)));
  if (torus::quantum_block_is_constant(model)) {
    const auto split = torus::split_action_constant_gq(model);
    rep.add(detail::value("split-classical", split.classical));
    rep.add(detail::value("split-quantum", split.quantum));
    rep.add(detail::value("quantum-action", split.quantum_action));
    rep.add(detail::value("volume", split.volume));
    rep.add(detail::compare("total-vs-split", "constant g_q splits the action", total, split.total(),
                            cfg.tol.value_or(1e-6), true));
  }
  return rep;
}

inline Report palatini_check(const RunConfig& cfg) {
  Rng rng(cfg.seed);
  const auto start = detail::m4_start(parse_metric(cfg.metric), rng, "palatini-check");
  const auto& g = start.metric;
  const auto& conn = start.connection;
  Report rep("palatini-check", cfg.seed);
  const auto norms = m4::residual_norms(g, conn);
  const auto field = m4::field_residual(g, m4::cast_connection<Quad>(conn));
  const auto inv = m4::block_inverse(g);
  rep.add(detail::value("action", m4::action_m4(g, m4::cast_connection<Quad>(conn)), "E at " + start.label));
  rep.add(detail::value("residual-norm", norms.total));
  rep.add(detail::value("field-residual-norm", norms.field));
  for (int k = 0; k < 8; ++k) rep.add(detail::value("c" + std::to_string(k + 1) + "-norm", norms.c[k]));
  rep.add(detail::value("trace-ginv-r", field.trace_ginv_r));
  rep.add(detail::value("ricci-max", m4::ricci_blocks(conn).cwiseAbs().maxCoeff()));
  rep.add(detail::value("inverse-asymmetry", (inv(0, 1) - inv(1, 0)).norm(), "||g^12 - g^21||"));
  return rep;
}

inline Report palatini_solve(const RunConfig& cfg) {
  Rng rng(cfg.seed);
  const auto spec = parse_metric(cfg.metric);
  auto start = detail::m4_start(spec, rng, "palatini-solve");
  if (spec.family != "paper-g0") start.connection = verify::detail::noisy(start.connection, rng, 0.1);
  m4::SolverConfig sc;
  sc.seed = cfg.seed;
  if (cfg.tol) sc.tolerance = *cfg.tol;
  const auto res = m4::solve(start.metric, start.connection, sc);
  const auto& r = res.report;
  Report rep("palatini-solve", cfg.seed);
  rep.add({"converged", "solver reaches the residual tolerance", "true", std::string(r.converged ? "true" : "false") +
              " (" + r.message + ")", sc.tolerance, r.converged, 0.0});
  rep.add(detail::value("iterations", r.iterations));
  rep.add(detail::value("initial-residual", r.initial_residual));
  rep.add(detail::value("residual", r.residuals.total));
  rep.add(detail::value("trace-ginv-r", r.trace_ginv_r));
  rep.add(detail::value("distance-to-critical-connection", r.distance_to_critical_connection));
  rep.add(detail::compare("action", "the value of E at any critical point is zero", r.action, 0.0, 1e-6, false));
  rep.add({"stationarity", "d/ds E = 0 along admissible directions", "< 1e-06",
           fmt(r.stationarity.max_derivative, 3) + " over " + std::to_string(r.stationarity.directions) + " directions",
           1e-6, !r.stationarity.degenerate && r.stationarity.max_derivative < 1e-6, 0.0});
  return rep;
}

/// Parses argv, runs one command, writes the report. Returns the exit code.
inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Einstein action and Palatini critical points on matrix algebras"};
  RunConfig cfg;
  std::optional<double> tol;
  app.add_option("--command", cfg.command, "verify-paper | matrix-action | torus-action | palatini-check | palatini-solve")
      ->required()
      ->check(CLI::IsMember({"verify-paper", "matrix-action", "torus-action", "palatini-check", "palatini-solve"}));
  app.add_option("--n", cfg.n, "matrix size n of M_n(R)");
  app.add_option("--m", cfg.m, "torus dimension m")->check(CLI::Range(1, 3));
  app.add_option("--grid", cfg.grid, "grid points per torus axis")->check(CLI::Range(8, 4096));
  app.add_option("--metric", cfg.metric,
                 "identity | paper-g0 | paper-counterexample-8x8 | random-spd | fourier-perturbed[:amplitude[,mode]]");
  app.add_option("--metric-file", cfg.metric_file, "tabulated torus metric (torus-action only)");
  app.add_option("--seed", cfg.seed, "seed for every random draw");
  app.add_option("--tol", tol, "override the check tolerance(s)")->check(CLI::PositiveNumber);
  app.add_option("--out", cfg.out, "write the report here instead of stdout");
  app.add_option("--format", cfg.format, "table | records")->check(CLI::IsMember({"table", "records"}));
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    app.exit(e, out, err);
    return kPass;
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kConfigError;
  }
  cfg.tol = tol;
  if (!cfg.metric_file.empty() && cfg.command != "torus-action") {
    err << "error: --metric-file is only accepted by torus-action\n";
    return kConfigError;
  }

  std::optional<Report> report;
  try {
    if (cfg.command == "verify-paper") {
      report = verify::run_all({cfg.seed, cfg.tol});
    } else if (cfg.command == "matrix-action") {
      report = matrix_action(cfg);
    } else if (cfg.command == "torus-action") {
      const auto model = torus_model(cfg);
      report = torus_action(model, cfg);
    } else if (cfg.command == "palatini-check") {
      report = palatini_check(cfg);
    } else {
      report = palatini_solve(cfg);
    }
  } catch (const Error& e) {
    const bool config = e.kind() != ErrorKind::DegenerateMetric;
    err << "error: " << e.what() << '\n';
    if (config) return kConfigError;
    Report failed(cfg.command, cfg.seed);
    failed.add({"run", "", "completes", std::string("error: ") + e.what(), 0.0, false, 0.0});
    report = failed;
  }

  std::ofstream file;
  if (!cfg.out.empty()) {
    file.open(cfg.out);
    if (!file) {
      err << "error: cannot write '" << cfg.out << "'\n";
      return kConfigError;
    }
  }
  std::ostream& sink = cfg.out.empty() ? out : file;
  if (cfg.format == "records") {
    report->write_records(sink);
  } else {
    report->write_table(sink);
  }
  return report->all_passed() ? kPass : kVerificationFailed;
}

}  // namespace ncg::cli
