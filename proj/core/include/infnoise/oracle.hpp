#pragma once

#include <Eigen/Dense>

#include "infnoise/sampling.hpp"
#include "infnoise/sym_matrix.hpp"

namespace infnoise {

// Inputs for the quadratic-form second-moment formula: gamma has iid
// entries with mean 0, variance sigma2, fourth moment kappa4.
struct MomentParams {
  double sigma2 = 1.0;
  double kappa4 = 3.0;
  SymMatrix matrix{1};

  void validate() const;  // sigma2 > 0, kappa4 >= sigma2^2
};

// E((gamma' M gamma)^2) =
//   sigma2^2 (2 trace(M^2) + trace(M)^2) + (kappa4 - 3 sigma2^2) trace(M o M).
double quadform_second_moment(const MomentParams& params);

// var(||Z_i - Z_j||^2) = 8 trace(Sigma^2) + 2 (mu4 - 3) trace(Sigma o Sigma).
double pairdiff_variance(const SymMatrix& sigma, double mu4);

// B = C0^2 [ trace(Sigma^2)/p^2 + ||Sigma||_op C1 / p ]. The universal
// constant in front is existential and is never asserted; only this
// bracket's scaling is.
double eq1_bracket(double c0, double c1, const SigmaStats& stats, double p);

struct InterpointDecomposition {
  double alpha = 0.0;      // (R_i Z_i - R_j Z_j)'(Y_i - Y_j) / sqrt(p)
  double beta = 0.0;       // ||R_i Z_i - R_j Z_j||^2 / p - nu (R_i^2 + R_j^2)
  double total_dev = 0.0;  // ||X_i-X_j||^2 - [||Y_i-Y_j||^2 + nu (R_i^2+R_j^2)]
};

// The identity total_dev == 2 alpha + beta is asserted within 1e-10.
InterpointDecomposition interpoint_decomposition(const DataSet& ds, int i, int j);

struct RateParams {
  double b = 2.0;     // concentration exponent, in (0, 2]
  double c0 = 1.0;    // concentration rate, > 0
  double Cc = 2.0;    // concentration prefactor C
  double eps = 1.0;   // epsilon > 0 in the log factor
  double n = 2.0;
  double p = 1.0;
  double M_p = 1.0;   // signal diameter bound
  double R_inf = 1.0;
  double R_sup = 1.0;  // upper radius bound; >= 1
  double nu = 1.0;

  void validate() const;
};

struct RateQuantities {
  double r0 = 0.0;
  double r1 = 0.0;
  double u_p = 0.0;
  double kappa_b = 0.0;
};

// r0 = R_sup sqrt(M_p) p^{-1/2} L^{1/b} (2/c0)^{1/b},
// r1 = 2 R_sup (2/c0)^{1/b} L^{1/b} p^{-1/2},
// u_p = max(sqrt(M_p), R_sup) R_sup L^{1/b} p^{-1/2},
// kappa_b = 32 C / (b c0^{2/b}) Gamma(2/b),
// with L = log n + (log n)^eps.
RateQuantities rate_quantities(const RateParams& rp);

struct InterpointDev {
  double distance_form = 0.0;  // max over i != j
  double dot_form = 0.0;       // max over all (i,j) incl. diagonal
};

// max |  ||X_i-X_j||^2 - [||Y_i-Y_j||^2 + nu (R_i^2+R_j^2)] |  and
// max | X_i'X_j - (Y_i'Y_j + delta_ij nu R_i^2) |.
InterpointDev max_interpoint_dev(const DataSet& ds);

}  // namespace infnoise
