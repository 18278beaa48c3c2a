// SPDX-License-Identifier: Apache-2.0
//
// Textbook coordinate computation of the scalar curvature of a metric on
// the m-torus. Kept free of the frame/ring engine so that it can serve as
// an independent check of it.
#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "ncgeom/errors.hpp"
#include "ncgeom/lattice_grid.hpp"

namespace ncg::torus {

/// Pointwise S sqrt|det g| for g given per grid point (size grid.size(),
/// each m x m).
///   Gamma^a_{bc} = 1/2 g^{ad} (d_b g_{dc} + d_c g_{db} - d_d g_{bc})
///   Ric_{bd}     = d_a Gamma^a_{bd} - d_d Gamma^a_{ab}
///                + Gamma^a_{ae} Gamma^e_{bd} - Gamma^a_{de} Gamma^e_{ab}
///   S            = g^{bd} Ric_{bd}
inline std::vector<double> classical_scalar_density_oracle(const TorusGrid& grid,
                                                           const std::vector<Eigen::MatrixXd>& g) {
  const int m = grid.dim();
  const std::size_t np = grid.size();
  if (g.size() != np) fail(ErrorKind::ShapeMismatch, "oracle: one metric per grid point required");
  const double h = grid.spacing();

  auto d_axis = [&](const std::vector<double>& f, int axis) {
    std::vector<double> out(np);
    for (std::size_t p = 0; p < np; ++p) {
      out[p] = (f[grid.neighbor(p, axis, 1)] - f[grid.neighbor(p, axis, -1)]) / (2.0 * h);
    }
    return out;
  };
  auto flat = [m](int a, int b) { return static_cast<std::size_t>(a * m + b); };
  auto flat3 = [m](int a, int b, int c) { return static_cast<std::size_t>((a * m + b) * m + c); };

  std::vector<Eigen::MatrixXd> ginv(np);
  std::vector<double> sqrt_det(np);
  for (std::size_t p = 0; p < np; ++p) {
    const double det = g[p].determinant();
    if (!(std::abs(det) > 1e-12)) fail(ErrorKind::DegenerateMetric, "oracle: degenerate metric at " + grid.describe(p));
    ginv[p] = g[p].inverse();
    sqrt_det[p] = std::sqrt(std::abs(det));
  }

  // dg[c][a][b] = d_c g_ab
  std::vector<std::vector<double>> comp(static_cast<std::size_t>(m * m), std::vector<double>(np));
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b)
      for (std::size_t p = 0; p < np; ++p) comp[flat(a, b)][p] = g[p](a, b);
  std::vector<std::vector<double>> dg(static_cast<std::size_t>(m * m * m));
  for (int c = 0; c < m; ++c)
    for (int a = 0; a < m; ++a)
      for (int b = 0; b < m; ++b) dg[flat3(c, a, b)] = d_axis(comp[flat(a, b)], c);

  // chr[a][b][c] = Gamma^a_{bc}
  std::vector<std::vector<double>> chr(static_cast<std::size_t>(m * m * m), std::vector<double>(np, 0.0));
  for (std::size_t p = 0; p < np; ++p)
    for (int a = 0; a < m; ++a)
      for (int b = 0; b < m; ++b)
        for (int c = 0; c < m; ++c) {
          double s = 0.0;
          for (int d = 0; d < m; ++d) {
            s += ginv[p](a, d) * (dg[flat3(b, d, c)][p] + dg[flat3(c, d, b)][p] - dg[flat3(d, b, c)][p]);
          }
          chr[flat3(a, b, c)][p] = 0.5 * s;
        }

  // dchr[e][a][b][c] = d_e Gamma^a_{bc}
  std::vector<std::vector<std::vector<double>>> dchr(static_cast<std::size_t>(m));
  for (int e = 0; e < m; ++e) {
    dchr[e].resize(static_cast<std::size_t>(m * m * m));
    for (std::size_t t = 0; t < chr.size(); ++t) dchr[e][t] = d_axis(chr[t], e);
  }

  std::vector<double> out(np);
  for (std::size_t p = 0; p < np; ++p) {
    double scalar = 0.0;
    for (int b = 0; b < m; ++b)
      for (int d = 0; d < m; ++d) {
        double ric = 0.0;
        for (int a = 0; a < m; ++a) {
          ric += dchr[a][flat3(a, b, d)][p] - dchr[d][flat3(a, a, b)][p];
          for (int e = 0; e < m; ++e) {
            ric += chr[flat3(a, a, e)][p] * chr[flat3(e, b, d)][p] - chr[flat3(a, d, e)][p] * chr[flat3(e, a, b)][p];
          }
        }
        scalar += ginv[p](b, d) * ric;
      }
    out[p] = scalar * sqrt_det[p];
  }
  return out;
}

/// Integral of S sqrt|det g| over the torus (periodic trapezoid).
inline double classical_eh_oracle(const TorusGrid& grid, const std::vector<Eigen::MatrixXd>& g) {
  const auto density = classical_scalar_density_oracle(grid, g);
  double s = 0.0;
  for (double v : density) s += v;
  return s * grid.cell_volume();
}

}  // namespace ncg::torus
