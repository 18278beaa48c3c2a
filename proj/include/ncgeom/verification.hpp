// SPDX-License-Identifier: Apache-2.0
//
// The acceptance suite: twelve numbered checks with pinned tolerances. Each
// check draws its samples from (seed, check number) so verdicts do not
// depend on which other checks ran.
#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "ncgeom/critical_point_solver.hpp"
#include "ncgeom/einstein_action.hpp"
#include "ncgeom/extended_precision.hpp"
#include "ncgeom/geometry.hpp"
#include "ncgeom/liealg.hpp"
#include "ncgeom/palatini_m4.hpp"
#include "ncgeom/report.hpp"
#include "ncgeom/sampling.hpp"
#include "ncgeom/torus_lattice.hpp"

namespace ncg::verify {

inline constexpr int kCriteria = 12;

struct Options {
  std::uint64_t seed = 20240917;
  // Replaces every upper-bound tolerance of every check when set.
  std::optional<double> tolerance;
};

namespace detail {

inline Rng rng_for(const Options& opt, int criterion) {
  std::seed_seq seq{static_cast<std::uint32_t>(opt.seed), static_cast<std::uint32_t>(opt.seed >> 32),
                    static_cast<std::uint32_t>(criterion)};
  return Rng(seq);
}

inline double tol(const Options& opt, double pinned) { return opt.tolerance.value_or(pinned); }

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

inline double max_block(const std::array<m4::Block, 8>& c) {
  double m = 0.0;
  for (const auto& b : c) m = std::max(m, b.cwiseAbs().maxCoeff());
  return m;
}

struct CriticalStats {
  double residual_c = 0.0;
  double residual_field = 0.0;
  double ricci = 0.0;
  double action = 0.0;
  double trace = 0.0;
};

/// Residuals at (g, nabla^g) over random metrics, with nabla^g, the
/// inverse metric and the curvature all formed in scalar type S.
template <class S>
CriticalStats critical_stats(Rng& rng, int samples, const ActionTrace& trace) {
  CriticalStats s;
  for (int t = 0; t < samples; ++t) {
    const auto g = m4::random_block_metric(rng);
    const auto conn = m4::critical_connection<S>(g);
    s.residual_c = std::max(s.residual_c, max_block(m4::connection_residuals(g, conn)));
    const auto fr = m4::field_residual(g, conn);
    s.residual_field = std::max(s.residual_field, fr.residual.cwiseAbs().maxCoeff());
    s.trace = std::max(s.trace, std::abs(fr.trace_ginv_r));
    s.ricci = std::max(s.ricci, static_cast<double>(m4::ricci_blocks<S>(conn).cwiseAbs().maxCoeff()));
    s.action = std::max(s.action, std::abs(m4::action_m4(g, conn, trace)));
  }
  return s;
}

inline m4::M4Connection noisy(const m4::M4Connection& conn, Rng& rng, double norm) {
  auto a = m4::random_connection(rng);
  double sq = 0.0;
  for (const auto& b : a.flat()) sq += b.squaredNorm();
  return m4::shifted(conn, a, norm / std::sqrt(sq));
}

}  // namespace detail

inline CheckRecord criterion_1(const Options& opt) {
  const double t_e = detail::tol(opt, 1e-10);
  const auto g = m4::paper_g0();
  const auto conn = m4::paper_nabla0();
  double e = m4::action_m4(g, conn);
  constexpr int reps = 100;
  detail::Stopwatch sw;
  for (int r = 0; r < reps; ++r) e = m4::action_m4(g, conn);
  const double per_call = sw.seconds() / reps;
  const double err = std::abs(e + 1.0);
  return {"1-action-g0-nabla0", "E(g0, nabla0) = -1", "-1 within tol; < 1 ms per evaluation",
          "E=" + fmt(e, 17) + " |E+1|=" + fmt(err, 3) + " t=" + fmt(per_call * 1e3, 3) + "ms",
          t_e, err < t_e && per_call < 1e-3, per_call};
}

inline CheckRecord criterion_2(const Options& opt) {
  const double t = detail::tol(opt, 1e-10);
  auto rng = detail::rng_for(opt, 2);
  auto rng_double = rng;
  detail::Stopwatch sw;
  const auto s = detail::critical_stats<Quad>(rng, 100, ActionTrace::quarter_volume());
  const double secs = sw.seconds();
  const auto d = detail::critical_stats<double>(rng_double, 100, ActionTrace::quarter_volume());
  return {"2-critical-connection-solves-system", "nabla^g satisfies c1-c8 and the field equation",
          "all residual entries < tol over 100 metrics (128-bit evaluation); < 1 s",
          "max|c|=" + fmt(s.residual_c, 3) + " max|field|=" + fmt(s.residual_field, 3) + " t=" + fmt(secs, 3) +
              "s [double: max|c|=" + fmt(d.residual_c, 3) + " max|field|=" + fmt(d.residual_field, 3) + "]",
          t, s.residual_c < t && s.residual_field < t && secs < 1.0, secs};
}

inline CheckRecord criterion_3(const Options& opt) {
  const double t = detail::tol(opt, 1e-10);
  auto rng = detail::rng_for(opt, 2);  // same 100 metrics as check 2
  detail::Stopwatch sw;
  auto rng_double = rng;
  const auto s = detail::critical_stats<Quad>(rng, 100, ActionTrace::quarter_volume());
  const auto d = detail::critical_stats<double>(rng_double, 100, ActionTrace::quarter_volume());
  return {"3-critical-connection-ricci-flat", "nabla^g has vanishing Ricci curvature",
          "max |Ric| entry < tol over 100 metrics (128-bit evaluation)",
          "max|Ric|=" + fmt(s.ricci, 3) + " [double: " + fmt(d.ricci, 3) + "]", t, s.ricci < t, sw.seconds()};
}

inline CheckRecord criterion_4(const Options& opt) {
  const double t_e = detail::tol(opt, 1e-9);
  const double t_tr = detail::tol(opt, 1e-10);
  auto rng = detail::rng_for(opt, 2);
  detail::Stopwatch sw;
  auto rng_double = rng;
  const auto s = detail::critical_stats<Quad>(rng, 100, ActionTrace::quarter_volume());
  const auto d = detail::critical_stats<double>(rng_double, 100, ActionTrace::quarter_volume());
  return {"4-critical-value-zero", "the value of E at any critical point is zero; tr(g^-1 r) = 0",
          "|E| < " + fmt(t_e, 3) + ", |tr(g^-1 r)| < " + fmt(t_tr, 3) + " (128-bit evaluation)",
          "max|E|=" + fmt(s.action, 3) + " max|tr|=" + fmt(s.trace, 3) + " [double: max|E|=" + fmt(d.action, 3) +
              " max|tr|=" + fmt(d.trace, 3) + "]",
          t_e, s.action < t_e && s.trace < t_tr, sw.seconds()};
}

inline CheckRecord criterion_5(const Options& opt) {
  const double t = detail::tol(opt, 1e-6);
  auto rng = detail::rng_for(opt, 5);
  detail::Stopwatch sw;
  double worst = 0.0;
  for (int s = 0; s < 10; ++s) {
    const auto g = m4::random_block_metric(rng);
    const auto cert = m4::stationarity_check(g, m4::critical_connection(g), 40, 1e-5, rng);
    worst = std::max(worst, cert.max_derivative);
  }
  return {"5-stationarity", "d/ds E vanishes along admissible (h, A) at (g, nabla^g)",
          "max |dE| < tol over 10 metrics x 40 directions", "max|dE|=" + fmt(worst, 3), t, worst < t, sw.seconds()};
}

inline CheckRecord criterion_6(const Options& opt) {
  const double t = detail::tol(opt, 1e-10);
  const double t_e = detail::tol(opt, 1e-9);
  auto rng = detail::rng_for(opt, 2);
  detail::Stopwatch sw;
  const auto s = detail::critical_stats<Quad>(rng, 100, ActionTrace::plain());
  const bool ok = s.residual_c < t && s.residual_field < t && s.ricci < t && s.action < t_e && s.trace < t;
  return {"6-plain-trace", "results remain valid with tau_g = Tr", "checks 2-4 with the plain trace (128-bit evaluation)",
          "max|c|=" + fmt(s.residual_c, 3) + " max|field|=" + fmt(s.residual_field, 3) + " max|Ric|=" + fmt(s.ricci, 3) +
              " max|E|=" + fmt(s.action, 3) + " max|tr|=" + fmt(s.trace, 3),
          t, ok, sw.seconds()};
}

inline CheckRecord criterion_7(const Options& opt) {
  const double t = detail::tol(opt, 1e-10);
  auto rng = detail::rng_for(opt, 7);
  detail::Stopwatch sw;
  double formula = 0.0, tors = 0.0, compat = 0.0;
  for (int n : {2, 3}) {
    const auto c = structure_constants(sl_basis(n));
    const auto frame = centre_frame(c, n);
    const auto d = static_cast<Eigen::Index>(c.dim());
    for (int s = 0; s < 50; ++s) {
      const Matrix g = random_symmetric_invertible(rng, d);
      const auto conn = koszul_levi_civita(to_tensor(g), frame);
      const auto ref = torsion_part_formula(g, c);
      for (std::size_t k = 0; k < c.dim(); ++k)
        for (std::size_t j = 0; j < c.dim(); ++j)
          for (std::size_t i = 0; i < c.dim(); ++i) formula = std::max(formula, std::abs(conn(k, j, i) - ref(k, j, i)));
      tors = std::max(tors, max_abs(torsion(conn, frame), frame.ring()));
      compat = std::max(compat, metric_compat_residual(to_tensor(g), conn, frame));
    }
  }
  return {"7-levi-civita-uniqueness", "Levi-Civita symbols equal the torsion-part formula and are real",
          "Koszul == formula, torsion and compatibility residuals < tol (50 metrics each on sl2, sl3)",
          "max|diff|=" + fmt(formula, 3) + " max|T|=" + fmt(tors, 3) + " max|compat|=" + fmt(compat, 3), t,
          formula < t && tors < t && compat < t, sw.seconds()};
}

struct ClosedFormFit {
  double kappa = 0.0;
  double max_relative_difference = 0.0;
  double min_ratio = 0.0;  // pipeline / closed form at kappa = 1
  double max_ratio = 0.0;
};

/// Fits one global Killing normalization kappa (closed form with kappa K)
/// against the pipeline over n in {2, 3}, ten metrics each, by least
/// squares on relative residuals.
inline ClosedFormFit fit_killing_normalization(Rng& rng) {
  std::vector<double> a, b, p;
  ClosedFormFit fit;
  fit.min_ratio = std::numeric_limits<double>::infinity();
  fit.max_ratio = -fit.min_ratio;
  for (int n : {2, 3}) {
    const auto c = structure_constants(sl_basis(n));
    const auto killing = killing_form(c);
    const KillingMatrix zero{Matrix::Zero(killing.k.rows(), killing.k.cols())};
    for (int s = 0; s < 10; ++s) {
      const CentreMetric g(random_symmetric_invertible(rng, static_cast<Eigen::Index>(c.dim())));
      const double with_k = action_closed_form(g, c, killing).value;
      const double without_k = action_closed_form(g, c, zero).value;
      const double pipe = levi_civita_action(g, c, n).value;
      a.push_back(with_k - without_k);
      b.push_back(without_k);
      p.push_back(pipe);
      fit.min_ratio = std::min(fit.min_ratio, pipe / with_k);
      fit.max_ratio = std::max(fit.max_ratio, pipe / with_k);
    }
  }
  double num = 0.0, den = 0.0;
  for (std::size_t t = 0; t < p.size(); ++t) {
    const double w = 1.0 / (p[t] * p[t]);
    num += w * a[t] * (p[t] - b[t]);
    den += w * a[t] * a[t];
  }
  fit.kappa = num / den;
  for (std::size_t t = 0; t < p.size(); ++t) {
    fit.max_relative_difference =
        std::max(fit.max_relative_difference, std::abs(fit.kappa * a[t] + b[t] - p[t]) / std::abs(p[t]));
  }
  return fit;
}

inline CheckRecord criterion_8(const Options& opt) {
  const double t = detail::tol(opt, 1e-8);
  auto rng = detail::rng_for(opt, 8);
  detail::Stopwatch sw;
  const auto fit = fit_killing_normalization(rng);
  return {"8-closed-form-vs-pipeline", "closed-form matrix action equals the defining pipeline",
          "rel diff < tol for n=2,3 with one global Killing normalization",
          "best kappa=" + fmt(fit.kappa, 6) + " max rel diff=" + fmt(fit.max_relative_difference, 3) +
              " pipeline/closed(kappa=1) in [" + fmt(fit.min_ratio, 12) + ", " + fmt(fit.max_ratio, 12) + "]",
          t, fit.max_relative_difference < t, sw.seconds()};
}

inline CheckRecord criterion_9(const Options& opt) {
  const double t = detail::tol(opt, 1e-8);
  auto rng = detail::rng_for(opt, 9);
  detail::Stopwatch sw;
  double worst = 0.0;
  double slowest = 0.0;
  for (int m : {1, 2}) {
    const Matrix gc = random_spd(rng, m);
    const Matrix gq = random_spd(rng, 3);
    detail::Stopwatch one;
    const auto model = torus::build_model(m, 2, 32, torus::constant_field(gc), torus::constant_field(gq));
    const double total = torus::total_action(model);
    slowest = std::max(slowest, one.seconds());
    const auto split = torus::split_action_constant_gq(model);
    const double ref = split.quantum_action * split.volume;
    worst = std::max(worst, std::abs(total - ref) / std::abs(ref));
  }
  return {"9-constant-gq-split", "with g_q constant the action splits into classical and quantum parts",
          "|total - E(g_q) vol| / |E(g_q) vol| < tol for m = 1, 2 at N = 32; < 5 s",
          "max rel=" + fmt(worst, 3) + " slowest=" + fmt(slowest, 3) + "s", t, worst < t && slowest < 5.0,
          sw.seconds()};
}

/// Smoothly varying quantum block used by the convergence study: a fixed SPD
/// base modulated by smooth positive factors.
inline torus::MetricFunction varying_quantum_block(const Matrix& base, int m) {
  return [base, m](const torus::Point& x) -> Matrix {
    double f = 1.0 + 0.5 * std::sin(x[0]);
    if (m > 1) f += 0.3 * std::cos(x[m - 1]);
    Matrix g = f * base;
    g(0, 0) *= 1.0 + 0.2 * std::cos(x[0]);
    return g;
  };
}

inline Matrix conformal_base_t2() { return Matrix::Identity(2, 2); }

inline CheckRecord criterion_10(const Options& opt) {
  const double t_rel = detail::tol(opt, 1e-3);
  const double t_abs = detail::tol(opt, 1e-8);
  auto rng = detail::rng_for(opt, 10);
  detail::Stopwatch sw;
  double min_order = std::numeric_limits<double>::infinity();
  for (int m : {1, 2}) {
    torus::TorusSetup setup{m, 2, torus::constant_field(Matrix::Identity(m, m)),
                            varying_quantum_block(random_spd(rng, 3, 1.0), m), torus::DerivativeOrder::Second};
    const auto conv = torus::grid_convergence(setup, {16, 32, 64});
    min_order = std::min(min_order, conv.exact ? std::numeric_limits<double>::infinity() : conv.observed_order);
  }
  // Conformal T^2: integrated curvature vanishes (Gauss-Bonnet), so the
  // oracle comparison is made on the pointwise densities.
  const auto model = torus::build_model(2, 2, 64, torus::conformal_field(conformal_base_t2(), 0.3, 0),
                                        torus::constant_field(Matrix::Identity(3, 3)));
  const auto engine = torus::classical_density(model);
  const auto oracle = torus::classical_scalar_density_oracle(model.grid, torus::classical_metric_points(model));
  double diff = 0.0, scale = 0.0;
  for (std::size_t p = 0; p < oracle.size(); ++p) {
    diff = std::max(diff, std::abs(-engine[p] - oracle[p]));
    scale = std::max(scale, std::abs(oracle[p]));
  }
  const double rel = diff / scale;
  const double engine_int = torus::classical_action(model);
  const double oracle_int = torus::classical_eh_oracle(model);
  const bool ok = min_order >= 1.9 && rel < t_rel && std::abs(engine_int) < t_abs && std::abs(oracle_int) < t_abs;
  return {"10-lattice-convergence", "lattice action converges; classical block matches a coordinate oracle",
          "order >= 1.9 on T1, T2; density rel diff < " + fmt(t_rel, 3) + " and |integrals| < " + fmt(t_abs, 3),
          "min order=" + fmt(min_order, 4) + " density rel=" + fmt(rel, 3) + " engine int=" + fmt(engine_int, 3) +
              " oracle int=" + fmt(oracle_int, 3),
          t_rel, ok, sw.seconds()};
}

inline CheckRecord criterion_11(const Options& opt) {
  const double t_res = detail::tol(opt, 1e-8);
  const double t_e = detail::tol(opt, 1e-6);
  auto rng = detail::rng_for(opt, 11);
  detail::Stopwatch sw;
  int converged = 0, max_iter = 0;
  double worst_e = 0.0, worst_res = 0.0;
  for (int s = 0; s < 10; ++s) {
    const auto g = m4::random_block_metric(rng);
    const auto init = detail::noisy(m4::critical_connection(g), rng, 0.1);
    m4::SolverConfig cfg;
    cfg.tolerance = t_res;
    cfg.seed = opt.seed + static_cast<std::uint64_t>(s);
    const auto res = m4::solve(g, init, cfg);
    converged += res.report.converged ? 1 : 0;
    max_iter = std::max(max_iter, res.report.iterations);
    worst_e = std::max(worst_e, std::abs(res.report.action));
    worst_res = std::max(worst_res, res.report.residuals.total);
  }
  m4::SolverConfig cfg;
  cfg.tolerance = t_res;
  cfg.seed = opt.seed;
  const auto g0 = m4::solve(m4::paper_g0(), m4::paper_nabla0(), cfg);
  const bool g0_ok = !g0.report.converged || std::abs(g0.report.action) < t_e;
  const bool ok = converged == 10 && max_iter < 200 && worst_e < t_e && g0_ok;
  return {"11-solver", "every converged critical point has E = 0",
          "10/10 basin solves converge (< 200 it, |E| < " + fmt(t_e, 3) + "); any converged (g0, nabla0) endpoint has |E| < " +
              fmt(t_e, 3),
          std::to_string(converged) + "/10 converged max it=" + std::to_string(max_iter) + " max res=" +
              fmt(worst_res, 3) + " max|E|=" + fmt(worst_e, 3) + "; g0 start: " +
              (g0.report.converged ? "converged" : "not converged") + " it=" + std::to_string(g0.report.iterations) +
              " E=" + fmt(g0.report.action, 3),
          t_res, ok, sw.seconds()};
}

inline CheckRecord criterion_12(const Options& /*opt*/) {
  detail::Stopwatch sw;
  const auto inv = m4::block_inverse(m4::paper_counterexample_metric());
  const double gap = (inv(0, 1) - inv(1, 0)).norm();
  return {"12-counterexample-inverse-asymmetry", "g12 = g21 does not imply g^12 = g^21",
          "||g^12 - g^21|| > 1e-6", "||g^12 - g^21||=" + fmt(gap, 6), 1e-6, gap > 1e-6, sw.seconds()};
}

inline CheckRecord run_criterion(int n, const Options& opt) {
  static const std::function<CheckRecord(const Options&)> table[kCriteria] = {
      criterion_1, criterion_2, criterion_3, criterion_4,  criterion_5,  criterion_6,
      criterion_7, criterion_8, criterion_9, criterion_10, criterion_11, criterion_12};
  if (n < 1 || n > kCriteria) fail(ErrorKind::InvalidArgument, "no acceptance check " + std::to_string(n));
  try {
    return table[n - 1](opt);
  } catch (const std::exception& e) {
    return {"check-" + std::to_string(n), "", "completes", std::string("error: ") + e.what(), 0.0, false, 0.0};
  }
}

inline Report run_all(const Options& opt) {
  Report rep("verify-paper", opt.seed);
  for (int n = 1; n <= kCriteria; ++n) rep.add(run_criterion(n, opt));
  return rep;
}

}  // namespace ncg::verify
