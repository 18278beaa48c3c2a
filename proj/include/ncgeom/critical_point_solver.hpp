// SPDX-License-Identifier: Apache-2.0
//
// Search for critical points (g, Gamma) of the M_4(R) action by driving the
// stacked first-order residual (field equation + c1..c8) to zero with a
// damped Gauss-Newton (Levenberg-Marquardt) iteration.
//
// The field residual g^-1 r g^-1 amplifies rounding in r by |g^-1|^2, so
// residual norms and the stationarity certificate are evaluated in 128-bit
// arithmetic. The Jacobian only steers the iteration and stays in double.
#pragma once

#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <optional>
#include <sstream>
#include <string>

#include <Eigen/Dense>

#include "ncgeom/errors.hpp"
#include "ncgeom/extended_precision.hpp"
#include "ncgeom/palatini_m4.hpp"
#include "ncgeom/sampling.hpp"

namespace ncg::m4 {

inline constexpr int kMetricParams = 48;      // g11, g22, g12 (= g21)
inline constexpr int kConnectionParams = 128;  // Gamma^k_{ji}, 8 blocks
inline constexpr int kParams = kMetricParams + kConnectionParams;
inline constexpr int kResiduals = 64 + 8 * 16;

using ParamVector = Eigen::VectorXd;     // kParams entries
using ResidualVector = Eigen::VectorXd;  // kResiduals entries

struct SolverConfig {
  int max_iterations = 200;
  double tolerance = 1e-8;
  double damping = 1e-3;  // initial Levenberg-Marquardt parameter
  double fd_step = 1e-6;
  std::uint64_t seed = 0;
  int stationarity_directions = 40;
  double stationarity_step = 1e-5;
  double max_condition = 1e8;

  void validate() const {
    if (max_iterations < 0) fail(ErrorKind::InvalidArgument, "SolverConfig: max_iterations must be >= 0");
    if (!(tolerance > 0.0)) fail(ErrorKind::InvalidArgument, "SolverConfig: tolerance must be > 0");
    if (!(damping >= 0.0)) fail(ErrorKind::InvalidArgument, "SolverConfig: damping must be >= 0");
    if (!(fd_step >= 1e-8 && fd_step <= 1e-3)) {
      fail(ErrorKind::InvalidArgument, "SolverConfig: fd_step must lie in [1e-8, 1e-3]");
    }
    if (stationarity_directions < 0) fail(ErrorKind::InvalidArgument, "SolverConfig: negative direction count");
    if (!(stationarity_step >= 1e-8 && stationarity_step <= 1e-3)) {
      fail(ErrorKind::InvalidArgument, "SolverConfig: stationarity_step must lie in [1e-8, 1e-3]");
    }
    if (!(max_condition > 1.0)) fail(ErrorKind::InvalidArgument, "SolverConfig: max_condition must be > 1");
  }
};

struct ResidualNorms {
  double field = 0.0;
  std::array<double, 8> c{};
  double total = 0.0;
};

struct StationarityCertificate {
  double max_derivative = 0.0;
  int directions = 0;
  bool degenerate = false;  // no directions sampled
};

struct SolverReport {
  ResidualNorms residuals;
  double initial_residual = 0.0;
  int iterations = 0;
  bool converged = false;
  StationarityCertificate stationarity;
  double action = std::numeric_limits<double>::quiet_NaN();
  double trace_ginv_r = std::numeric_limits<double>::quiet_NaN();
  double distance_to_critical_connection = std::numeric_limits<double>::quiet_NaN();
  std::string message;
};

struct SolveResult {
  BlockMetric metric;
  M4Connection connection;
  SolverReport report;
};

// ---------------------------------------------------------------------------
// Parameter packing. Order: g11, g22, g12 (column-major blocks), then
// Gamma(k, j, i) with k slowest.

inline ParamVector pack(const BlockMetric& g, const M4Connection& conn) {
  ParamVector x(kParams);
  Eigen::Index at = 0;
  for (const Block* b : {&g.g11(), &g.g22(), &g.g12()}) {
    x.segment<16>(at) = b->reshaped();
    at += 16;
  }
  for (const Block& b : conn.flat()) {
    x.segment<16>(at) = b.reshaped();
    at += 16;
  }
  return x;
}

inline Block block_at(const ParamVector& x, Eigen::Index at) {
  return x.segment<16>(at).reshaped(4, 4);
}

/// Throws DegenerateMetric if the metric part is singular.
inline BlockMetric unpack_metric(const ParamVector& x) {
  return BlockMetric(block_at(x, 0), block_at(x, 32), block_at(x, 16));
}

inline M4Connection unpack_connection(const ParamVector& x) {
  M4Connection conn = zero_connection();
  Eigen::Index at = kMetricParams;
  for (Block& b : conn.flat()) {
    b = block_at(x, at);
    at += 16;
  }
  return conn;
}

/// Field residual entries followed by c1..c8 entries, evaluated in scalar
/// type S.
template <class S = double>
ResidualVector residual_vector(const BlockMetric& g, const M4Connection& conn) {
  const auto c_s = cast_connection<S>(conn);
  ResidualVector r(kResiduals);
  r.head<64>() = field_residual(g, c_s).residual.reshaped();
  const auto c = connection_residuals(g, c_s);
  for (int m = 0; m < 8; ++m) r.segment<16>(64 + 16 * m) = c[m].reshaped();
  return r;
}

/// Norms of the field residual and of each of c1..c8 (128-bit evaluation).
inline ResidualNorms residual_norms(const BlockMetric& g, const M4Connection& conn) {
  const auto c_q = cast_connection<Quad>(conn);
  ResidualNorms n;
  n.field = field_residual(g, c_q).residual.norm();
  const auto c = connection_residuals(g, c_q);
  double sq = n.field * n.field;
  for (int m = 0; m < 8; ++m) {
    n.c[m] = c[m].norm();
    sq += n.c[m] * n.c[m];
  }
  n.total = std::sqrt(sq);
  return n;
}

/// Euclidean norm of the field residual and all eight connection residuals.
inline double residual_norm(const BlockMetric& g, const M4Connection& conn) { return residual_norms(g, conn).total; }

namespace detail {

template <class S>
std::optional<ResidualVector> try_residual(const ParamVector& x, double max_condition) {
  try {
    const BlockMetric g = unpack_metric(x);
    if (condition_number(g.assembled()) > max_condition) return std::nullopt;
    ResidualVector r = residual_vector<S>(g, unpack_connection(x));
    if (!r.allFinite()) return std::nullopt;
    return r;
  } catch (const Error&) {
    return std::nullopt;
  }
}

inline double connection_distance(const M4Connection& a, const M4Connection& b) {
  double sq = 0.0;
  for (std::size_t t = 0; t < a.flat().size(); ++t) sq += (a.flat()[t] - b.flat()[t]).squaredNorm();
  return std::sqrt(sq);
}

}  // namespace detail

/// Max |central FD directional derivative of E| over random unit directions
/// (h, A) with h12 = h21. E is evaluated in 128-bit arithmetic.
inline StationarityCertificate stationarity_check(const BlockMetric& g, const M4Connection& conn, int num_dirs,
                                                  double step, Rng& rng,
                                                  const ActionTrace& trace = ActionTrace::quarter_volume()) {
  StationarityCertificate cert;
  cert.directions = num_dirs;
  if (num_dirs <= 0) {
    cert.degenerate = true;
    return cert;
  }
  const ParamVector x = pack(g, conn);
  auto action_at = [&trace](const ParamVector& y) {
    return action_m4(unpack_metric(y), cast_connection<Quad>(unpack_connection(y)), trace);
  };
  for (int d = 0; d < num_dirs; ++d) {
    ParamVector dir(kParams);
    for (Eigen::Index t = 0; t < kParams; ++t) dir(t) = std::normal_distribution<double>(0.0, 1.0)(rng);
    dir.normalize();
    const double deriv = (action_at(x + step * dir) - action_at(x - step * dir)) / (2.0 * step);
    cert.max_derivative = std::max(cert.max_derivative, std::abs(deriv));
  }
  return cert;
}

/// Damped Gauss-Newton on the 176 parameters. Never throws on numerical
/// trouble; a non-converged report carries the reason in `message`.
inline SolveResult solve(const BlockMetric& init_g, const M4Connection& init_conn, const SolverConfig& config) {
  config.validate();
  ParamVector x = pack(init_g, init_conn);
  SolverReport rep;

  auto finish = [&](const ParamVector& xf) {
    const BlockMetric g = unpack_metric(xf);
    const M4Connection conn = unpack_connection(xf);
    rep.residuals = residual_norms(g, conn);
    rep.converged = rep.residuals.total < config.tolerance;
    const auto conn_q = cast_connection<Quad>(conn);
    rep.action = action_m4(g, conn_q);
    rep.trace_ginv_r = field_residual(g, conn_q).trace_ginv_r;
    rep.distance_to_critical_connection = detail::connection_distance(conn, critical_connection(g));
    Rng rng(config.seed);
    rep.stationarity =
        stationarity_check(g, conn, config.stationarity_directions, config.stationarity_step, rng);
    if (rep.message.empty()) rep.message = rep.converged ? "converged" : "iteration cap reached";
    return SolveResult{g, conn, rep};
  };

  auto r0 = detail::try_residual<Quad>(x, std::numeric_limits<double>::infinity());
  if (!r0) {
    rep.message = "initial residual not finite";
    rep.residuals.total = std::numeric_limits<double>::infinity();
    return {init_g, init_conn, rep};
  }
  ResidualVector r = *r0;
  double norm = r.norm();
  rep.initial_residual = norm;
  double lambda = config.damping;
  const double h = config.fd_step;

  Eigen::MatrixXd jac(kResiduals, kParams);
  while (norm >= config.tolerance && rep.iterations < config.max_iterations) {
    bool jac_ok = true;
    for (Eigen::Index t = 0; t < kParams && jac_ok; ++t) {
      ParamVector xp = x, xm = x;
      xp(t) += h;
      xm(t) -= h;
      const auto rp = detail::try_residual<double>(xp, std::numeric_limits<double>::infinity());
      const auto rm = detail::try_residual<double>(xm, std::numeric_limits<double>::infinity());
      if (!rp || !rm) {
        jac_ok = false;
        break;
      }
      jac.col(t) = (*rp - *rm) / (2.0 * h);
    }
    if (!jac_ok) {
      rep.message = "singular metric encountered while forming the Jacobian";
      break;
    }
    ++rep.iterations;

    const Eigen::MatrixXd jtj = jac.transpose() * jac;
    const ParamVector grad = jac.transpose() * r;
    bool accepted = false;
    for (int attempt = 0; attempt < 40; ++attempt) {
      Eigen::MatrixXd a = jtj;
      a.diagonal().array() += lambda * (1.0 + jtj.diagonal().array());
      const ParamVector delta = a.ldlt().solve(-grad);
      if (!delta.allFinite()) {
        lambda = std::max(1e-12, lambda) * 10.0;
        continue;
      }
      const ParamVector xn = x + delta;
      const auto rn = detail::try_residual<Quad>(xn, config.max_condition);
      if (rn && rn->norm() < norm) {
        x = xn;
        r = *rn;
        norm = rn->norm();
        lambda = std::max(lambda / 3.0, 1e-15);
        accepted = true;
        break;
      }
      lambda = std::max(1e-12, lambda) * 10.0;
    }
    if (!accepted) {
      rep.message = "no descent step found (stalled)";
      break;
    }
  }
  try {
    return finish(x);
  } catch (const Error& e) {
    rep.message = std::string("failed to evaluate endpoint: ") + e.what();
    return {init_g, init_conn, rep};
  }
}

/// Exact text form of a report (hex floats) for reproducibility checks.
inline std::string serialize(const SolverReport& rep) {
  auto hex = [](double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%a", v);
    return std::string(buf);
  };
  std::ostringstream os;
  os << "iterations=" << rep.iterations << " converged=" << rep.converged << " residual=" << hex(rep.residuals.total)
     << " field=" << hex(rep.residuals.field);
  for (int m = 0; m < 8; ++m) os << " c" << m + 1 << '=' << hex(rep.residuals.c[m]);
  os << " action=" << hex(rep.action) << " trace=" << hex(rep.trace_ginv_r)
     << " stationarity=" << hex(rep.stationarity.max_derivative) << " degenerate=" << rep.stationarity.degenerate
     << " distance=" << hex(rep.distance_to_critical_connection) << " message=" << rep.message;
  return os.str();
}

}  // namespace ncg::m4
