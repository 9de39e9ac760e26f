#include "infnoise/sym_matrix.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "infnoise/errors.hpp"

namespace infnoise {

namespace {

void require_same_order(const SymMatrix& a, const SymMatrix& b, const char* op) {
  if (a.order() != b.order()) {
    throw ConfigError(std::string(op) + ": order mismatch (" +
                      std::to_string(a.order()) + " vs " + std::to_string(b.order()) + ")");
  }
}

}  // namespace

SymMatrix::SymMatrix(Eigen::Index order) {
  if (order < 1) throw ConfigError("SymMatrix: order must be >= 1");
  data_ = Eigen::MatrixXd::Zero(order, order);
}

SymMatrix SymMatrix::identity(Eigen::Index order) {
  SymMatrix m(order);
  m.data_ = Eigen::MatrixXd::Identity(order, order);
  return m;
}

SymMatrix SymMatrix::from_upper(const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols()) throw ConfigError("SymMatrix::from_upper: matrix not square");
  SymMatrix out(m.rows());
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    for (Eigen::Index i = 0; i <= j; ++i) {
      out.data_(i, j) = m(i, j);
      out.data_(j, i) = m(i, j);
    }
  }
  return out;
}

SymMatrix SymMatrix::from_dense(const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols()) throw ConfigError("SymMatrix::from_dense: matrix not square");
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    for (Eigen::Index i = 0; i < j; ++i) {
      if (m(i, j) != m(j, i)) {
        throw ConfigError("SymMatrix::from_dense: asymmetric at (" + std::to_string(i) +
                          "," + std::to_string(j) + ")");
      }
    }
  }
  SymMatrix out(m.rows());
  out.data_ = m;
  return out;
}

void SymMatrix::set(Eigen::Index i, Eigen::Index j, double value) {
  data_(i, j) = value;
  data_(j, i) = value;
}

SymMatrix SymMatrix::operator-(const SymMatrix& other) const {
  require_same_order(*this, other, "SymMatrix::operator-");
  SymMatrix out(order());
  out.data_ = data_ - other.data_;
  return out;
}

SymMatrix SymMatrix::operator+(const SymMatrix& other) const {
  require_same_order(*this, other, "SymMatrix::operator+");
  SymMatrix out(order());
  out.data_ = data_ + other.data_;
  return out;
}

SymMatrix SymMatrix::scaled(double factor) const {
  SymMatrix out(order());
  out.data_ = factor * data_;
  return out;
}

SpectralSummary eigh(const SymMatrix& m) {
  const Eigen::Index n = m.order();
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i <= j; ++i) {
      if (!std::isfinite(m(i, j))) {
        throw ConfigError("eigh: non-finite entry at (" + std::to_string(i) + "," +
                          std::to_string(j) + ")");
      }
    }
  }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m.dense());
  if (solver.info() != Eigen::Success) {
    throw PropertyViolation("eigh: eigensolver did not converge");
  }

  // Solver returns ascending order; re-sort descending, stable in the
  // solver's index order for exact ties.
  std::vector<Eigen::Index> idx(static_cast<std::size_t>(n));
  std::iota(idx.begin(), idx.end(), 0);
  const Eigen::VectorXd& raw = solver.eigenvalues();
  std::stable_sort(idx.begin(), idx.end(),
                   [&raw](Eigen::Index a, Eigen::Index b) { return raw(a) > raw(b); });

  SpectralSummary out;
  out.eigenvalues.resize(n);
  out.eigenvectors.resize(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    out.eigenvalues(k) = raw(idx[static_cast<std::size_t>(k)]);
    Eigen::VectorXd v = solver.eigenvectors().col(idx[static_cast<std::size_t>(k)]);
    // Sign convention: largest-magnitude coordinate positive.
    Eigen::Index imax = 0;
    v.cwiseAbs().maxCoeff(&imax);
    if (v(imax) < 0.0) v = -v;
    out.eigenvectors.col(k) = v;
  }
  out.gaps.resize(n > 1 ? n - 1 : 0);
  for (Eigen::Index k = 0; k + 1 < n; ++k) {
    out.gaps(k) = out.eigenvalues(k) - out.eigenvalues(k + 1);
  }

  const double ortho = (out.eigenvectors.transpose() * out.eigenvectors -
                        Eigen::MatrixXd::Identity(n, n))
                           .norm();
  if (ortho > 1e-10 * static_cast<double>(n)) {
    throw PropertyViolation("eigh: eigenvector orthonormality residual " +
                            std::to_string(ortho) + " exceeds tolerance");
  }
  const double mnorm = m.dense().norm();
  const double recon = (m.dense() - out.eigenvectors * out.eigenvalues.asDiagonal() *
                                        out.eigenvectors.transpose())
                           .norm();
  if (recon > 1e-8 * std::max(mnorm, 1e-300)) {
    throw PropertyViolation("eigh: reconstruction residual " + std::to_string(recon) +
                            " exceeds 1e-8 * ||m||_F");
  }
  return out;
}

double frobenius_norm(const SymMatrix& m) { return m.dense().norm(); }

double operator_norm(const SymMatrix& m) {
  const SpectralSummary s = eigh(m);
  return s.eigenvalues.cwiseAbs().maxCoeff();
}

double hadamard_trace(const SymMatrix& a, const SymMatrix& b) {
  require_same_order(a, b, "hadamard_trace");
  double sum = 0.0;
  for (Eigen::Index i = 0; i < a.order(); ++i) sum += a(i, i) * b(i, i);
  return sum;
}

Eigen::MatrixXd centering_matrix(Eigen::Index n) {
  if (n < 1) throw ConfigError("centering_matrix: n must be >= 1");
  const double inv = 1.0 / static_cast<double>(n);
  return Eigen::MatrixXd::Identity(n, n) -
         Eigen::MatrixXd::Constant(n, n, inv);
}

Eigen::MatrixXd center_conjugate(const SymMatrix& m, bool left, bool right) {
  Eigen::MatrixXd out = m.dense();
  if (left) {
    // H M = M with column means removed from each column (row-mean sweep).
    const Eigen::RowVectorXd col_means = out.colwise().mean();
    out.rowwise() -= col_means;
  }
  if (right) {
    const Eigen::VectorXd row_means = out.rowwise().mean();
    out.colwise() -= row_means;
  }
  return out;
}

SymMatrix center_both(const SymMatrix& m) {
  return SymMatrix::from_upper(center_conjugate(m, true, true));
}

}  // namespace infnoise
