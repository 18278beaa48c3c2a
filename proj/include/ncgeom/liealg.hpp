// SPDX-License-Identifier: Apache-2.0
//
// Matrix Lie algebra substrate: traceless generator sets, commutators,
// structure constants and the Killing form.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "ncgeom/errors.hpp"
#include "ncgeom/tensor.hpp"

namespace ncg {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

inline double max_abs(const Matrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

inline double condition_number(const Matrix& m) {
  Eigen::JacobiSVD<Matrix> svd(m);
  const auto& s = svd.singularValues();
  if (s.size() == 0) return 0.0;
  const double smin = s(s.size() - 1);
  return smin == 0.0 ? INFINITY : s(0) / smin;
}

inline Matrix commutator(const Matrix& a, const Matrix& b) {
  if (a.rows() != a.cols() || b.rows() != b.cols() || a.rows() != b.rows()) {
    fail(ErrorKind::ShapeMismatch, "commutator: operands must be square and of equal size");
  }
  return a * b - b * a;
}

/// Frobenius pairing tr(a^T b).
inline double frobenius(const Matrix& a, const Matrix& b) { return (a.array() * b.array()).sum(); }

/// Ordered, linearly independent set of traceless n x n generators.
/// Usually a basis of sl(n, R), but any generator set of a matrix Lie
/// subalgebra is accepted (e.g. the two so(2) generators of the M4 model).
class DerivationBasis {
 public:
  static constexpr double kMaxGramCondition = 1e10;

  explicit DerivationBasis(std::vector<Matrix> generators) : generators_(std::move(generators)) {
    if (generators_.empty()) fail(ErrorKind::InvalidDimension, "DerivationBasis: no generators");
    const auto n = generators_.front().rows();
    if (n < 1) fail(ErrorKind::InvalidDimension, "DerivationBasis: empty matrices");
    for (const auto& e : generators_) {
      if (e.rows() != n || e.cols() != n) {
        fail(ErrorKind::ShapeMismatch, "DerivationBasis: generators differ in size");
      }
      if (!e.allFinite()) fail(ErrorKind::InvalidArgument, "DerivationBasis: non-finite entry");
      const double scale = std::max(1.0, max_abs(e));
      if (std::abs(e.trace()) > 1e-12 * scale) {
        fail(ErrorKind::InvalidArgument, "DerivationBasis: generator is not traceless");
      }
    }
    if (condition_number(gram()) > kMaxGramCondition) {
      fail(ErrorKind::DegenerateBasis, "DerivationBasis: generators are linearly dependent");
    }
  }

  std::size_t size() const noexcept { return generators_.size(); }
  Eigen::Index matrix_size() const noexcept { return generators_.front().rows(); }
  const Matrix& operator[](std::size_t i) const { return generators_[i]; }
  const std::vector<Matrix>& generators() const noexcept { return generators_; }

  /// Gram matrix of the Frobenius pairing.
  Matrix gram() const {
    const auto d = static_cast<Eigen::Index>(generators_.size());
    Matrix g(d, d);
    for (Eigen::Index i = 0; i < d; ++i)
      for (Eigen::Index j = 0; j < d; ++j) g(i, j) = frobenius(generators_[i], generators_[j]);
    return g;
  }

 private:
  std::vector<Matrix> generators_;
};

/// Standard basis of sl(n, R): off-diagonal units e_ab in lexicographic
/// (a, b) order, then diag differences e_aa - e_{a+1,a+1}.
inline DerivationBasis sl_basis(int n) {
  if (n < 2) fail(ErrorKind::InvalidDimension, "sl_basis: n must be >= 2, got " + std::to_string(n));
  std::vector<Matrix> gens;
  gens.reserve(static_cast<std::size_t>(n * n - 1));
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      if (a == b) continue;
      Matrix e = Matrix::Zero(n, n);
      e(a, b) = 1.0;
      gens.push_back(std::move(e));
    }
  }
  for (int a = 0; a + 1 < n; ++a) {
    Matrix e = Matrix::Zero(n, n);
    e(a, a) = 1.0;
    e(a + 1, a + 1) = -1.0;
    gens.push_back(std::move(e));
  }
  return DerivationBasis(std::move(gens));
}

/// c(r, l, p) = c^r_{lp} with [E_l, E_p] = c^r_{lp} E_r.
class StructureTensor {
 public:
  StructureTensor() = default;
  explicit StructureTensor(std::size_t dim) : c_(dim, 0.0) {}

  static StructureTensor zero(std::size_t dim) { return StructureTensor(dim); }

  std::size_t dim() const noexcept { return c_.dim(); }
  double& operator()(std::size_t r, std::size_t l, std::size_t p) { return c_(r, l, p); }
  double operator()(std::size_t r, std::size_t l, std::size_t p) const { return c_(r, l, p); }

  double max_abs() const {
    double m = 0.0;
    for (double v : c_.flat()) m = std::max(m, std::abs(v));
    return m;
  }
  bool is_abelian() const { return max_abs() == 0.0; }

 private:
  Tensor3<double> c_;
};

struct KillingMatrix {
  Matrix k;
};

inline StructureTensor structure_constants(const DerivationBasis& basis) {
  const std::size_t d = basis.size();
  const Matrix gram = basis.gram();
  Eigen::FullPivLU<Matrix> lu(gram);
  if (!lu.isInvertible()) fail(ErrorKind::DegenerateBasis, "structure_constants: singular Gram matrix");

  StructureTensor c(d);
  Vector rhs(static_cast<Eigen::Index>(d));
  for (std::size_t l = 0; l < d; ++l) {
    for (std::size_t p = 0; p < d; ++p) {
      const Matrix bracket = commutator(basis[l], basis[p]);
      for (std::size_t r = 0; r < d; ++r) rhs(static_cast<Eigen::Index>(r)) = frobenius(basis[r], bracket);
      const Vector coeff = lu.solve(rhs);

      Matrix unexplained = bracket;
      for (std::size_t r = 0; r < d; ++r) unexplained -= coeff(static_cast<Eigen::Index>(r)) * basis[r];
      const double scale = std::max(1.0, bracket.norm());
      if (unexplained.norm() > 1e-10 * scale) {
        fail(ErrorKind::DegenerateBasis,
             "structure_constants: generators are not closed under the commutator");
      }
      for (std::size_t r = 0; r < d; ++r) c(r, l, p) = coeff(static_cast<Eigen::Index>(r));
    }
  }
  return c;
}

/// K_{jp} = sum_{r,s} c^r_{js} c^s_{pr} = tr(ad E_j o ad E_p).
inline KillingMatrix killing_form(const StructureTensor& c) {
  const std::size_t d = c.dim();
  Matrix k = Matrix::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
  for (std::size_t j = 0; j < d; ++j)
    for (std::size_t p = 0; p < d; ++p) {
      double s = 0.0;
      for (std::size_t r = 0; r < d; ++r)
        for (std::size_t q = 0; q < d; ++q) s += c(r, j, q) * c(q, p, r);
      k(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(p)) = s;
    }
  return {k};
}

/// max over (m, l, p, q) of |c^s_{pq} c^m_{ls} + c^s_{ql} c^m_{ps} + c^s_{lp} c^m_{qs}|.
inline double jacobi_residual(const StructureTensor& c) {
  const std::size_t d = c.dim();
  double worst = 0.0;
  for (std::size_t m = 0; m < d; ++m)
    for (std::size_t l = 0; l < d; ++l)
      for (std::size_t p = 0; p < d; ++p)
        for (std::size_t q = 0; q < d; ++q) {
          double s = 0.0;
          for (std::size_t t = 0; t < d; ++t) {
            s += c(t, p, q) * c(m, l, t) + c(t, q, l) * c(m, p, t) + c(t, l, p) * c(m, q, t);
          }
          worst = std::max(worst, std::abs(s));
        }
  return worst;
}

inline double antisymmetry_residual(const StructureTensor& c) {
  const std::size_t d = c.dim();
  double worst = 0.0;
  for (std::size_t r = 0; r < d; ++r)
    for (std::size_t l = 0; l < d; ++l)
      for (std::size_t p = 0; p < d; ++p) worst = std::max(worst, std::abs(c(r, l, p) + c(r, p, l)));
  return worst;
}

/// max |K_{rm} c^r_{lj} + K_{jr} c^r_{lm}|.
inline double ad_invariance_residual(const KillingMatrix& killing, const StructureTensor& c) {
  const auto& k = killing.k;
  const std::size_t d = c.dim();
  double worst = 0.0;
  for (std::size_t l = 0; l < d; ++l)
    for (std::size_t j = 0; j < d; ++j)
      for (std::size_t m = 0; m < d; ++m) {
        double s = 0.0;
        for (std::size_t r = 0; r < d; ++r) {
          const auto ri = static_cast<Eigen::Index>(r);
          s += k(ri, static_cast<Eigen::Index>(m)) * c(r, l, j) +
               k(static_cast<Eigen::Index>(j), ri) * c(r, l, m);
        }
        worst = std::max(worst, std::abs(s));
      }
  return worst;
}

/// Rebuilds [E_l, E_p] as c^r_{lp} E_r.
inline Matrix expand_bracket(const StructureTensor& c, const DerivationBasis& basis, std::size_t l,
                             std::size_t p) {
  const auto n = basis.matrix_size();
  Matrix out = Matrix::Zero(n, n);
  for (std::size_t r = 0; r < basis.size(); ++r) out += c(r, l, p) * basis[r];
  return out;
}

}  // namespace ncg
