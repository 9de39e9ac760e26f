#pragma once

#include <Eigen/Dense>

#include <vector>

#include "infnoise/kernels.hpp"
#include "infnoise/sampling.hpp"
#include "infnoise/sym_matrix.hpp"

namespace infnoise {

struct PrincipalAngles {
  int k = 0;
  Eigen::VectorXd angles;  // ascending, in [0, pi/2]
  // λ_k of the first input is separated from λ_{k+1} by at least
  // separation_frac * |λ_1|; angle assertions should be skipped otherwise.
  bool separated = false;
  // sin(top angle) * (λ_k - λ_{k+1}) / ||m - mt||_op: a diagnostic for the
  // sin-theta bound (reported, never asserted — the bound's constant is
  // existential). 0 when the gap or the perturbation vanishes.
  double davis_kahan_ratio = 0.0;

  double top_angle() const { return angles.size() ? angles(angles.size() - 1) : 0.0; }
};

struct SpectralGapReport {
  double frob_gap = 0.0;
  double op_gap = 0.0;
  Eigen::VectorXd eig_devs;                 // |λ_i(m) - λ_i(mt)|
  std::vector<PrincipalAngles> top_k_angles;
  std::vector<int> gap_locations;           // i where λ_i - λ_{i+1} >= threshold
};

// Norm gaps, per-index eigenvalue deviations (Weyl is asserted internally:
// max dev <= op_gap + 1e-10), and principal angles between top-k eigenspaces
// for each requested k.
SpectralGapReport compare_spectra(const SymMatrix& m, const SymMatrix& mt,
                                  const std::vector<int>& ks,
                                  double separation_frac = 0.05);

// Principal angles between the spans of the top-k columns of two orthonormal
// sets: acos of the singular values of V_k' W_k.
Eigen::VectorXd principal_angles(const Eigen::MatrixXd& v, const Eigen::MatrixXd& w, int k);

struct GaussianRescaleReport {
  // max off-diagonal |Mtilde(i,j) - exp(-2 nu s) Mpure(i,j)|; an algebraic
  // identity, <= 1e-12 always.
  double max_entry_dev = 0.0;
  // |<v1(M), v1(Mpure)>| with eigh's sign convention applied.
  double eigvec_alignment = 0.0;
};

// Spherical radii only (throws otherwise: the rescaling property fails for
// elliptical noise).
GaussianRescaleReport gaussian_rescale_check(const DataSet& ds, double s);

// S = D Mpure D with D(i,i) = exp(-s nu R_i^2); the off-diagonal equals the
// elliptical approximating matrix for the Gaussian kernel exactly. (With the
// usual normalization nu = 1 this is the textbook D(i,i) = exp(-s R_i^2).)
SymMatrix elliptical_dmd_matrix(const DataSet& ds, double s);

struct EigenvalueUnderestimation {
  int index = 0;
  double lambda_pure = 0.0;
  double lambda_approx = 0.0;
  bool separated = false;
  bool underestimated = false;      // λ_i(Mtilde) <= λ_i(Mpure) + 1e-12
  bool within_diag_bound = false;   // |λ_i(Mtilde) - e^{-2 nu s} λ_i(Mpure)|
                                    //   <= |e^{-2 nu s} - 1| / n + 1e-10
};

struct UnderestimationReport {
  double diag_correction_bound = 0.0;
  std::vector<EigenvalueUnderestimation> per_index;
};

// For the Gaussian kernel with spherical noise, Mtilde = e^{-2 nu s} Mpure
// + (1 - e^{-2 nu s})/n Id, so separated positive eigenvalues of the pure
// matrix are underestimated, up to the diagonal-correction bound.
UnderestimationReport eigenvalue_underestimation_check(const DataSet& ds, double s,
                                                       double separation_frac = 0.05);

}  // namespace infnoise
