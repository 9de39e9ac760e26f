#pragma once

#include <Eigen/Dense>

#include <cstdint>

namespace infnoise {

// Dense symmetric matrix. Symmetry is enforced by construction: set()
// writes both triangles, and the factory functions mirror the upper
// triangle, so entries(i,j) == entries(j,i) holds exactly. Immutable
// use after construction is thread-safe.
class SymMatrix {
 public:
  explicit SymMatrix(Eigen::Index order);

  static SymMatrix identity(Eigen::Index order);
  // Keeps the upper triangle (i <= j) of `m` and mirrors it.
  static SymMatrix from_upper(const Eigen::MatrixXd& m);
  // Requires m(i,j) == m(j,i) bit-exactly; throws otherwise.
  static SymMatrix from_dense(const Eigen::MatrixXd& m);

  Eigen::Index order() const { return data_.rows(); }
  double operator()(Eigen::Index i, Eigen::Index j) const { return data_(i, j); }
  void set(Eigen::Index i, Eigen::Index j, double value);

  const Eigen::MatrixXd& dense() const { return data_; }

  SymMatrix operator-(const SymMatrix& other) const;
  SymMatrix operator+(const SymMatrix& other) const;
  SymMatrix scaled(double factor) const;

 private:
  Eigen::MatrixXd data_;
};

// Sorted eigendecomposition. eigenvalues descending, eigenvectors in
// matching columns with the largest-magnitude coordinate of each column
// forced positive, gaps(i) = eigenvalues(i) - eigenvalues(i+1).
struct SpectralSummary {
  Eigen::VectorXd eigenvalues;
  Eigen::MatrixXd eigenvectors;
  Eigen::VectorXd gaps;
};

// Symmetric eigendecomposition. Throws ConfigError naming the entry if the
// input has a non-finite value, and PropertyViolation if the solver output
// fails the orthonormality (1e-10 * n) or reconstruction (1e-8 * ||m||_F)
// tolerances.
SpectralSummary eigh(const SymMatrix& m);

double frobenius_norm(const SymMatrix& m);

// Largest singular value = max |eigenvalue|; computed from eigh.
double operator_norm(const SymMatrix& m);

// trace(a o b) = sum_i a(i,i) * b(i,i).
double hadamard_trace(const SymMatrix& a, const SymMatrix& b);

// H = Id - 11'/n.
Eigen::MatrixXd centering_matrix(Eigen::Index n);

// H^a M H^b with a = left, b = right. The one-sided results are not
// symmetric, hence the dense return type; use center_both for H M H.
Eigen::MatrixXd center_conjugate(const SymMatrix& m, bool left, bool right);

// H M H as a SymMatrix (upper triangle mirrored after the product).
SymMatrix center_both(const SymMatrix& m);

}  // namespace infnoise
