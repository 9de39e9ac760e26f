#pragma once

#include <Eigen/Dense>

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "infnoise/sampling.hpp"
#include "infnoise/sym_matrix.hpp"

namespace infnoise {

enum class KernelFamily {
  EuclideanDistance,  // entries f(||X_i - X_j||^2) / n
  DotProduct,         // entries f(X_i' X_j) / n
};

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

namespace kernel_funcs {
struct Gaussian { double s = 1.0; };                 // f(x) = exp(-s x)
struct Exponential { double s = 1.0; };              // f(x) = exp(-s sqrt(max(x,0)))
struct Affine { double a = 1.0; double b = 0.0; };   // f(x) = a x + b
struct Table {                                       // linear interpolation, clamped ends
  std::vector<double> xs;
  std::vector<double> ys;
};
using Any = std::variant<Gaussian, Exponential, Affine, Table>;
}  // namespace kernel_funcs

// A scalar kernel with a declared Lipschitz constant, an optional domain
// interval, and an accumulated argument shift (shift_kernel composes by
// adding to the shift, so specs stay serializable).
class KernelSpec {
 public:
  static KernelSpec gaussian(double s, KernelFamily family = KernelFamily::EuclideanDistance,
                             std::optional<Interval> domain = std::nullopt);
  // The slope of exp(-s sqrt(x)) diverges at 0, so a domain with lo > 0 is
  // required to declare a finite Lipschitz constant.
  static KernelSpec exponential(double s, Interval domain);
  static KernelSpec affine(double a, double b,
                           KernelFamily family = KernelFamily::EuclideanDistance,
                           std::optional<Interval> domain = std::nullopt);
  static KernelSpec table(std::vector<double> xs, std::vector<double> ys,
                          KernelFamily family = KernelFamily::EuclideanDistance);

  KernelFamily family() const { return family_; }
  const kernel_funcs::Any& func() const { return func_; }
  double shift() const { return shift_; }
  double lipschitz_const() const { return lipschitz_; }
  const std::optional<Interval>& domain() const { return domain_; }

  double operator()(double x) const;  // evaluates f(x + shift)

  // Max finite-difference slope over a uniform grid of the declared domain
  // must not exceed 1.05 * lipschitz_const. True when no domain is declared.
  bool validate_lipschitz(int grid_points = 10000) const;

  bool in_domain(double x) const;  // pre-shift argument check

 private:
  KernelSpec() = default;
  KernelFamily family_ = KernelFamily::EuclideanDistance;
  kernel_funcs::Any func_ = kernel_funcs::Gaussian{1.0};
  double lipschitz_ = 1.0;
  std::optional<Interval> domain_;
  double shift_ = 0.0;

  friend KernelSpec shift_kernel(const KernelSpec& k, double nu);
  friend KernelSpec kernel_from_parts(KernelFamily family, kernel_funcs::Any func,
                                      double lipschitz, std::optional<Interval> domain,
                                      double shift);
};

// f_nu(x) = f(x + 2 nu); Lipschitz constant unchanged, domain shifted by -2 nu.
KernelSpec shift_kernel(const KernelSpec& k, double nu);

// Reassembles a spec from serialized parts (config round trips).
KernelSpec kernel_from_parts(KernelFamily family, kernel_funcs::Any func, double lipschitz,
                             std::optional<Interval> domain, double shift);

struct KernelMatrixResult {
  SymMatrix matrix;
  long out_of_domain = 0;  // args outside the declared domain, counted over
                           // unordered off-diagonal pairs (plus the diagonal
                           // for the dot-product family)
};

// M_f from the observed cloud X.
KernelMatrixResult kernel_matrix(const DataSet& ds, const KernelSpec& k);

// Same construction applied to the signal part Y (no noise, no shift).
KernelMatrixResult pure_signal_matrix(const DataSet& ds, const KernelSpec& k);

// Diagonal convention for the approximating matrices: f(0)/n primary;
// DiagShifted uses f(2 nu)/n (equivalent up to 2 nu C0 / n).
enum class ApproxDiagonal { FZero, FShifted };

// Off-diagonal f(||Y_i - Y_j||^2 + 2 nu)/n.
SymMatrix approx_matrix_spherical(const DataSet& ds, const KernelSpec& k,
                                  ApproxDiagonal diag = ApproxDiagonal::FZero);

// Off-diagonal f(||Y_i - Y_j||^2 + nu (R_i^2 + R_j^2))/n; identical to the
// spherical matrix (bitwise) when all R_i = 1.
SymMatrix approx_matrix_elliptical(const DataSet& ds, const KernelSpec& k,
                                   ApproxDiagonal diag = ApproxDiagonal::FZero);

// Off-diagonal f(Y_i' Y_j)/n, diagonal f(||Y_i||^2 + nu R_i^2)/n.
SymMatrix approx_matrix_dotproduct(const DataSet& ds, const KernelSpec& k);

// The interval the observed kernel arguments land in with probability
// tending to 1: [W_p + 2 nu r_inf^2 - eta, M_p + 2 nu r_sup^2 + eta] for the
// distance family (W_p taken as 0) and the symmetric dot-product analog.
// Absent when the signal support is unbounded.
std::optional<Interval> concentration_interval(const DataSet& ds, KernelFamily family, double eta);

// Attaches the concentration interval as the kernel's domain when none is
// declared, so out-of-domain counting tracks the concentration event.
KernelSpec with_concentration_interval(const KernelSpec& k, const DataSet& ds, double eta);

// L(i,j) = -M(i,j) off-diagonal, row sum of off-diagonal entries on the
// diagonal, so L 1 = 0.
SymMatrix laplacian(const SymMatrix& m);

// N_L = D^{-1/2} L D^{-1/2} with D = diag(L); requires positive diagonal.
SymMatrix normalized_laplacian(const SymMatrix& m);

// Pairwise squared distances of rows (exact zeros on the diagonal).
Eigen::MatrixXd pairwise_sq_dists(const Eigen::MatrixXd& rows);

}  // namespace infnoise
