// SPDX-License-Identifier: Apache-2.0
//
// Matrix-valued functions on the m-torus, C(T^m) (x) M_n(R), discretized on
// a periodic grid. The frame is m coordinate derivations (central finite
// differences, zero bracket) followed by n^2 - 1 inner derivations (zero
// action on central fields, sl(n) structure constants). Metrics are block
// diagonal: a classical block g_c (m x m) and a quantum block g_q.
#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ncgeom/classical_oracle.hpp"
#include "ncgeom/einstein_action.hpp"
#include "ncgeom/errors.hpp"
#include "ncgeom/geometry.hpp"
#include "ncgeom/lattice_grid.hpp"
#include "ncgeom/liealg.hpp"

namespace ncg::torus {

/// Pointwise real fields as a commutative coefficient ring. The trace is
/// Tr on M_n of f * 1_n integrated over the torus.
struct LatticeRing {
  using value_type = LatticeField;

  TorusGrid grid;
  int identity_trace = 1;

  LatticeField zero() const { return {std::vector<double>(grid.size(), 0.0)}; }
  LatticeField one() const { return {std::vector<double>(grid.size(), 1.0)}; }
  LatticeField add(const LatticeField& a, const LatticeField& b) const {
    LatticeField out = a;
    for (std::size_t p = 0; p < out.size(); ++p) out[p] += b[p];
    return out;
  }
  LatticeField sub(const LatticeField& a, const LatticeField& b) const {
    LatticeField out = a;
    for (std::size_t p = 0; p < out.size(); ++p) out[p] -= b[p];
    return out;
  }
  LatticeField mul(const LatticeField& a, const LatticeField& b) const {
    LatticeField out = a;
    for (std::size_t p = 0; p < out.size(); ++p) out[p] *= b[p];
    return out;
  }
  LatticeField scale(const LatticeField& a, double s) const {
    LatticeField out = a;
    for (double& v : out.values) v *= s;
    return out;
  }
  void accumulate(LatticeField& acc, const LatticeField& a, double s) const {
    for (std::size_t p = 0; p < acc.size(); ++p) acc[p] += s * a[p];
  }
  void accumulate_product(LatticeField& acc, const LatticeField& a, const LatticeField& b, double s) const {
    for (std::size_t p = 0; p < acc.size(); ++p) acc[p] += s * a[p] * b[p];
  }
  double trace(const LatticeField& a) const { return identity_trace * integrate(grid, a); }
  double max_abs(const LatticeField& a) const {
    double m = 0.0;
    for (double v : a.values) m = std::max(m, std::abs(v));
    return m;
  }

  Tensor2<LatticeField> invert(const Tensor2<LatticeField>& g) const {
    const std::size_t d = g.dim();
    const auto di = static_cast<Eigen::Index>(d);
    Tensor2<LatticeField> out(d, zero());
    Matrix local(di, di);
    for (std::size_t p = 0; p < grid.size(); ++p) {
      for (std::size_t a = 0; a < d; ++a)
        for (std::size_t b = 0; b < d; ++b) local(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = g(a, b)[p];
      Eigen::FullPivLU<Matrix> lu(local);
      if (!lu.isInvertible() || lu.rcond() < 1.0 / kMaxMetricCondition) {
        fail(ErrorKind::DegenerateMetric, "metric is singular at grid point " + grid.describe(p));
      }
      const Matrix inv = lu.inverse();
      for (std::size_t a = 0; a < d; ++a)
        for (std::size_t b = 0; b < d; ++b) out(a, b)[p] = inv(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
    }
    return out;
  }
};

using MetricFunction = std::function<Matrix(const Point&)>;

// Built-in metric families.

inline MetricFunction constant_field(Matrix value) {
  return [value = std::move(value)](const Point&) { return value; };
}

/// base + amplitude * sin(mode * x_axis) * direction
inline MetricFunction fourier_field(Matrix base, Matrix direction, double amplitude, int axis = 0, int mode = 1) {
  return [=](const Point& x) -> Matrix { return base + amplitude * std::sin(mode * x[axis]) * direction; };
}

/// exp(2 eps sin(x_axis)) * base
inline MetricFunction conformal_field(Matrix base, double eps, int axis = 0) {
  return [=](const Point& x) -> Matrix { return std::exp(2.0 * eps * std::sin(x[axis])) * base; };
}

struct TorusModel {
  TorusGrid grid;
  int n = 2;
  StructureTensor quantum_structure;
  Tensor2<LatticeField> classical;  // m x m
  Tensor2<LatticeField> quantum;    // (n^2 - 1) x (n^2 - 1)
  DerivativeOrder order = DerivativeOrder::Second;

  int m() const { return grid.dim(); }
  std::size_t quantum_dim() const { return quantum.dim(); }
  std::size_t frame_size() const { return classical.dim() + quantum.dim(); }

  Matrix classical_at(std::size_t p) const { return local(classical, p); }
  Matrix quantum_at(std::size_t p) const { return local(quantum, p); }

  Tensor2<LatticeField> full_metric() const {
    const std::size_t mc = classical.dim();
    const std::size_t d = frame_size();
    Tensor2<LatticeField> g(d, LatticeField{std::vector<double>(grid.size(), 0.0)});
    for (std::size_t a = 0; a < mc; ++a)
      for (std::size_t b = 0; b < mc; ++b) g(a, b) = classical(a, b);
    for (std::size_t a = 0; a < quantum.dim(); ++a)
      for (std::size_t b = 0; b < quantum.dim(); ++b) g(mc + a, mc + b) = quantum(a, b);
    return g;
  }

 private:
  static Matrix local(const Tensor2<LatticeField>& t, std::size_t p) {
    const auto d = static_cast<Eigen::Index>(t.dim());
    Matrix out(d, d);
    for (Eigen::Index a = 0; a < d; ++a)
      for (Eigen::Index b = 0; b < d; ++b) out(a, b) = t(a, b)[p];
    return out;
  }
};

namespace detail {

inline void check_block(const Matrix& g, const TorusGrid& grid, std::size_t p, const char* which) {
  const double scale = std::max(1.0, max_abs(g));
  if (!g.allFinite()) {
    fail(ErrorKind::InvalidArgument, std::string(which) + " metric is not finite at grid point " + grid.describe(p));
  }
  if ((g - g.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    fail(ErrorKind::InvalidArgument, std::string(which) + " metric is not symmetric at grid point " + grid.describe(p));
  }
  Eigen::FullPivLU<Matrix> lu(g);
  if (!lu.isInvertible() || lu.rcond() < 1.0 / kMaxMetricCondition) {
    fail(ErrorKind::DegenerateMetric, std::string(which) + " metric is singular at grid point " + grid.describe(p));
  }
}

inline void check_n(int n) {
  if (n < 2) fail(ErrorKind::InvalidDimension, "torus model: n must be >= 2");
}

}  // namespace detail

/// Materializes g_c and g_q on the grid; rejects a non-invertible block at
/// any point, reporting its location.
inline TorusModel build_model(int m, int n, int points_per_axis, const MetricFunction& classical,
                              const MetricFunction& quantum, DerivativeOrder order = DerivativeOrder::Second) {
  detail::check_n(n);
  TorusGrid grid(m, points_per_axis);
  const auto d = static_cast<std::size_t>(n * n - 1);
  const auto mc = static_cast<std::size_t>(m);
  TorusModel model{grid, n, structure_constants(sl_basis(n)),
                   Tensor2<LatticeField>(mc, LatticeField{std::vector<double>(grid.size())}),
                   Tensor2<LatticeField>(d, LatticeField{std::vector<double>(grid.size())}), order};
  for (std::size_t p = 0; p < grid.size(); ++p) {
    const Point x = grid.position(p);
    const Matrix gc = classical(x);
    const Matrix gq = quantum(x);
    if (gc.rows() != m || gc.cols() != m) fail(ErrorKind::ShapeMismatch, "classical metric must be m x m");
    if (static_cast<std::size_t>(gq.rows()) != d || static_cast<std::size_t>(gq.cols()) != d) {
      fail(ErrorKind::ShapeMismatch, "quantum metric must be (n^2-1) x (n^2-1)");
    }
    detail::check_block(gc, grid, p, "classical");
    detail::check_block(gq, grid, p, "quantum");
    for (std::size_t a = 0; a < mc; ++a)
      for (std::size_t b = 0; b < mc; ++b) model.classical(a, b)[p] = gc(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
    for (std::size_t a = 0; a < d; ++a)
      for (std::size_t b = 0; b < d; ++b) model.quantum(a, b)[p] = gq(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
  }
  return model;
}

/// Same, from a full (m + n^2 - 1)-square metric function, which must be
/// block diagonal (no classical/quantum cross terms).
inline TorusModel build_model(int m, int n, int points_per_axis, const MetricFunction& full,
                              DerivativeOrder order = DerivativeOrder::Second) {
  detail::check_n(n);
  const int d = n * n - 1;
  TorusGrid grid(m, points_per_axis);
  for (std::size_t p = 0; p < grid.size(); ++p) {
    const Matrix g = full(grid.position(p));
    if (g.rows() != m + d || g.cols() != m + d) fail(ErrorKind::ShapeMismatch, "full metric has the wrong size");
    const double cross = std::max(g.topRightCorner(m, d).cwiseAbs().maxCoeff(), g.bottomLeftCorner(d, m).cwiseAbs().maxCoeff());
    if (cross != 0.0) {
      fail(ErrorKind::InvalidArgument,
           "metric is not block diagonal (classical/quantum cross block nonzero at grid point " + grid.describe(p) + ")");
    }
  }
  auto classical = [&](const Point& x) -> Matrix { return full(x).topLeftCorner(m, m); };
  auto quantum = [&](const Point& x) -> Matrix { return full(x).bottomRightCorner(d, d); };
  return build_model(m, n, points_per_axis, classical, quantum, order);
}

/// Frame of the model: coordinate derivations, then inner derivations.
inline Frame<LatticeRing> lattice_frame(const TorusModel& model) {
  const std::size_t mc = static_cast<std::size_t>(model.m());
  const std::size_t d = model.frame_size();
  StructureTensor c(d);
  for (std::size_t r = 0; r < model.quantum_dim(); ++r)
    for (std::size_t l = 0; l < model.quantum_dim(); ++l)
      for (std::size_t p = 0; p < model.quantum_dim(); ++p) c(mc + r, mc + l, mc + p) = model.quantum_structure(r, l, p);
  std::vector<Frame<LatticeRing>::Action> actions(d);
  for (std::size_t a = 0; a < mc; ++a) {
    actions[a] = [grid = model.grid, axis = static_cast<int>(a), order = model.order](const LatticeField& f) {
      return derivative(grid, f, axis, order);
    };
  }
  return Frame<LatticeRing>(LatticeRing{model.grid, model.n}, std::move(c), std::move(actions));
}

/// Frame of the classical block alone (m coordinate derivations).
inline Frame<LatticeRing> classical_frame(const TorusModel& model) {
  const std::size_t mc = static_cast<std::size_t>(model.m());
  std::vector<Frame<LatticeRing>::Action> actions(mc);
  for (std::size_t a = 0; a < mc; ++a) {
    actions[a] = [grid = model.grid, axis = static_cast<int>(a), order = model.order](const LatticeField& f) {
      return derivative(grid, f, axis, order);
    };
  }
  return Frame<LatticeRing>(LatticeRing{model.grid, 1}, StructureTensor::zero(mc), std::move(actions));
}

namespace detail {

// -sqrt|det g| g^{jk} R_{kj} pointwise, for the Levi-Civita connection of g.
inline LatticeField einstein_density(const Tensor2<LatticeField>& g, const Frame<LatticeRing>& frame) {
  const auto& ring = frame.ring();
  const auto conn = koszul_levi_civita(g, frame);
  const auto ric = ricci_from_connection(conn, frame);
  const auto ginv = ring.invert(g);
  const std::size_t d = g.dim();
  LatticeField contracted = ring.zero();
  for (std::size_t j = 0; j < d; ++j)
    for (std::size_t k = 0; k < d; ++k) ring.accumulate_product(contracted, ginv(j, k), ric(k, j), 1.0);

  const auto di = static_cast<Eigen::Index>(d);
  Matrix local(di, di);
  LatticeField out = ring.zero();
  for (std::size_t p = 0; p < ring.grid.size(); ++p) {
    for (std::size_t a = 0; a < d; ++a)
      for (std::size_t b = 0; b < d; ++b) local(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = g(a, b)[p];
    out[p] = -std::sqrt(std::abs(local.determinant())) * contracted[p];
  }
  return out;
}

}  // namespace detail

/// Pointwise integrand of the total action (the 1/n of tau_g cancels Tr 1_n).
inline LatticeField action_density(const TorusModel& model) {
  return detail::einstein_density(model.full_metric(), lattice_frame(model));
}

/// Einstein action of the Levi-Civita connection of the full metric.
inline double total_action(const TorusModel& model) { return integrate(model.grid, action_density(model)); }

/// -S_c sqrt|det g_c| for the classical block alone.
inline LatticeField classical_density(const TorusModel& model) {
  return detail::einstein_density(model.classical, classical_frame(model));
}

/// Usual Einstein-Hilbert value -int S_c sqrt|det g_c| of the classical block.
inline double classical_action(const TorusModel& model) { return integrate(model.grid, classical_density(model)); }

inline double classical_volume(const TorusModel& model) {
  LatticeField f{std::vector<double>(model.grid.size())};
  for (std::size_t p = 0; p < model.grid.size(); ++p) f[p] = std::sqrt(std::abs(model.classical_at(p).determinant()));
  return integrate(model.grid, f);
}

inline bool quantum_block_is_constant(const TorusModel& model) {
  const Matrix g0 = model.quantum_at(0);
  const double tol = 1e-14 * std::max(1.0, max_abs(g0));
  for (std::size_t p = 1; p < model.grid.size(); ++p) {
    if ((model.quantum_at(p) - g0).cwiseAbs().maxCoeff() > tol) return false;
  }
  return true;
}

struct SplitAction {
  double classical = 0.0;             // sqrt|det g_q| E(g_c)
  double quantum = 0.0;               // E(g_q) vol(T^m, g_c)
  double quantum_volume_element = 0;  // sqrt|det g_q|
  double quantum_action = 0.0;        // E(g_q), Levi-Civita action on M_n
  double quantum_closed_form = 0.0;   // closed-form expression for E(g_q), reported only
  double volume = 0.0;                // vol(T^m, g_c)

  double total() const { return classical + quantum; }
};

/// Classical/quantum split for a g_q that is constant over the torus, each
/// term computed on its own: the classical one on the m-dimensional frame,
/// the quantum one on M_n(R) times the g_c volume.
inline SplitAction split_action_constant_gq(const TorusModel& model) {
  if (!quantum_block_is_constant(model)) {
    fail(ErrorKind::InvalidArgument, "split_action_constant_gq: quantum metric varies over the torus");
  }
  const CentreMetric gq(model.quantum_at(0));
  SplitAction s;
  s.quantum_volume_element = gq.sqrt_abs_det();
  s.volume = classical_volume(model);
  s.classical = s.quantum_volume_element * classical_action(model);
  s.quantum_action = levi_civita_action(gq, model.quantum_structure, model.n).value;
  s.quantum_closed_form =
      action_closed_form(gq, model.quantum_structure, killing_form(model.quantum_structure)).value;
  s.quantum = s.quantum_action * s.volume;
  return s;
}

inline std::vector<Matrix> classical_metric_points(const TorusModel& model) {
  std::vector<Matrix> out(model.grid.size());
  for (std::size_t p = 0; p < out.size(); ++p) out[p] = model.classical_at(p);
  return out;
}

/// Independent oracle for the classical block: int R_c sqrt|det g_c|.
inline double classical_eh_oracle(const TorusModel& model) {
  return classical_eh_oracle(model.grid, classical_metric_points(model));
}

// ---------------------------------------------------------------------------
// Grid refinement study.

struct TorusSetup {
  int m = 1;
  int n = 2;
  MetricFunction classical;
  MetricFunction quantum;
  DerivativeOrder order = DerivativeOrder::Second;
};

inline TorusModel build_model(const TorusSetup& setup, int points_per_axis) {
  return build_model(setup.m, setup.n, points_per_axis, setup.classical, setup.quantum, setup.order);
}

struct ConvergenceReport {
  std::vector<int> resolutions;
  std::vector<double> values;
  std::vector<double> differences;  // values[i] - values[i+1]
  double observed_order = std::numeric_limits<double>::quiet_NaN();
  bool exact = false;               // all values identical
};

/// total_action at each resolution; observed order from the last three.
inline ConvergenceReport grid_convergence(const TorusSetup& setup, const std::vector<int>& resolutions) {
  if (resolutions.size() < 3) fail(ErrorKind::InvalidArgument, "grid_convergence: need at least 3 resolutions");
  for (std::size_t i = 1; i < resolutions.size(); ++i) {
    if (resolutions[i] != 2 * resolutions[i - 1]) {
      fail(ErrorKind::InvalidArgument, "grid_convergence: resolutions must double");
    }
  }
  ConvergenceReport rep;
  rep.resolutions = resolutions;
  for (int n : resolutions) rep.values.push_back(total_action(build_model(setup, n)));
  for (std::size_t i = 0; i + 1 < rep.values.size(); ++i) rep.differences.push_back(rep.values[i] - rep.values[i + 1]);
  rep.exact = true;
  for (double d : rep.differences) rep.exact = rep.exact && d == 0.0;
  const std::size_t k = rep.differences.size();
  if (!rep.exact && rep.differences[k - 1] != 0.0) {
    rep.observed_order = std::log2(std::abs(rep.differences[k - 2] / rep.differences[k - 1]));
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Tabulated field files: header "m n N", then one line per grid point in
// row-major order with the lower triangle of g_c then of g_q, row by row
// ((0,0), (1,0), (1,1), (2,0), ...).

namespace detail {

inline void write_lower(std::ostream& os, const Matrix& g, bool& first) {
  for (Eigen::Index a = 0; a < g.rows(); ++a)
    for (Eigen::Index b = 0; b <= a; ++b) {
      if (!first) os << ' ';
      os << g(a, b);
      first = false;
    }
}

inline Matrix read_lower(const std::vector<double>& v, std::size_t& at, Eigen::Index d) {
  Matrix g(d, d);
  for (Eigen::Index a = 0; a < d; ++a)
    for (Eigen::Index b = 0; b <= a; ++b) {
      g(a, b) = v[at++];
      g(b, a) = g(a, b);
    }
  return g;
}

}  // namespace detail

inline void write_tabulated(std::ostream& os, const TorusModel& model) {
  const auto old_precision = os.precision(17);
  os << model.m() << ' ' << model.n << ' ' << model.grid.points_per_axis() << '\n';
  for (std::size_t p = 0; p < model.grid.size(); ++p) {
    bool first = true;
    detail::write_lower(os, model.classical_at(p), first);
    detail::write_lower(os, model.quantum_at(p), first);
    os << '\n';
  }
  os.precision(old_precision);
}

inline TorusModel read_tabulated(std::istream& is, DerivativeOrder order = DerivativeOrder::Second) {
  std::string line;
  std::size_t line_no = 0;
  auto next_line = [&]() -> bool {
    while (std::getline(is, line)) {
      ++line_no;
      if (line.find_first_not_of(" \t\r") != std::string::npos) return true;
    }
    return false;
  };
  if (!next_line()) fail(ErrorKind::Parse, "tabulated field: missing header line");
  int m = 0, n = 0, np = 0;
  {
    std::istringstream hs(line);
    std::string extra;
    if (!(hs >> m >> n >> np) || (hs >> extra)) fail(ErrorKind::Parse, "tabulated field: header must be 'm n N'");
  }
  detail::check_n(n);
  const TorusGrid grid(m, np);
  const int d = n * n - 1;
  const std::size_t per_line = static_cast<std::size_t>(m * (m + 1) / 2 + d * (d + 1) / 2);

  std::vector<Matrix> gc(grid.size()), gq(grid.size());
  std::vector<double> v;
  for (std::size_t p = 0; p < grid.size(); ++p) {
    if (!next_line()) {
      fail(ErrorKind::Parse, "tabulated field: expected " + std::to_string(grid.size()) + " data lines, got " + std::to_string(p));
    }
    std::istringstream ls(line);
    v.clear();
    std::string tok;
    while (ls >> tok) {
      std::size_t used = 0;
      double x = 0.0;
      try {
        x = std::stod(tok, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != tok.size()) fail(ErrorKind::Parse, "tabulated field: bad number '" + tok + "' on line " + std::to_string(line_no));
      v.push_back(x);
    }
    if (v.size() != per_line) {
      fail(ErrorKind::Parse, "tabulated field: line " + std::to_string(line_no) + " has " + std::to_string(v.size()) +
                                 " values, expected " + std::to_string(per_line));
    }
    std::size_t at = 0;
    gc[p] = detail::read_lower(v, at, m);
    gq[p] = detail::read_lower(v, at, d);
  }
  if (next_line()) fail(ErrorKind::Parse, "tabulated field: trailing data on line " + std::to_string(line_no));

  auto lookup = [&grid](const std::vector<Matrix>& table) {
    return [&grid, &table](const Point& x) -> Matrix {
      std::array<int, 3> c{0, 0, 0};
      for (int a = 0; a < grid.dim(); ++a) c[a] = static_cast<int>(std::lround(x[a] / grid.spacing()));
      return table[grid.index(c)];
    };
  };
  return build_model(m, n, np, lookup(gc), lookup(gq), order);
}

}  // namespace ncg::torus
