#include "infnoise/oracle.hpp"

#include <cmath>
#include <string>

#include "infnoise/errors.hpp"
#include "infnoise/kernels.hpp"

namespace infnoise {

void MomentParams::validate() const {
  if (!(sigma2 > 0.0)) throw ConfigError("quadform: sigma2 must be > 0");
  if (kappa4 < sigma2 * sigma2) {
    throw ConfigError("quadform: kappa4 must be >= sigma2^2 (moment inequality)");
  }
}

double quadform_second_moment(const MomentParams& params) {
  params.validate();
  const Eigen::MatrixXd& m = params.matrix.dense();
  const double trace_m = m.trace();
  const double trace_m2 = m.squaredNorm();  // trace(M^2) = ||M||_F^2 for symmetric M
  const double trace_had = hadamard_trace(params.matrix, params.matrix);
  const double s4 = params.sigma2 * params.sigma2;
  return s4 * (2.0 * trace_m2 + trace_m * trace_m) +
         (params.kappa4 - 3.0 * s4) * trace_had;
}

double pairdiff_variance(const SymMatrix& sigma, double mu4) {
  const double trace_s2 = sigma.dense().squaredNorm();
  const double trace_had = hadamard_trace(sigma, sigma);
  return 8.0 * trace_s2 + 2.0 * (mu4 - 3.0) * trace_had;
}

double eq1_bracket(double c0, double c1, const SigmaStats& stats, double p) {
  if (c0 < 0.0 || c1 < 0.0 || stats.trace_sq_over_p2 < 0.0 || stats.op_norm < 0.0 ||
      !(p > 0.0)) {
    throw ConfigError("eq1_bracket: all inputs must be nonnegative with p > 0");
  }
  return c0 * c0 * (stats.trace_sq_over_p2 + stats.op_norm * c1 / p);
}

InterpointDecomposition interpoint_decomposition(const DataSet& ds, int i, int j) {
  if (i == j) throw ConfigError("interpoint_decomposition: requires i != j");
  if (i < 0 || j < 0 || i >= ds.n || j >= ds.n) {
    throw ConfigError("interpoint_decomposition: index out of range");
  }
  const double p = static_cast<double>(ds.p);
  const Eigen::RowVectorXd w = ds.R(i) * ds.Z.row(i) - ds.R(j) * ds.Z.row(j);
  const Eigen::RowVectorXd y = ds.Y.row(i) - ds.Y.row(j);
  const double shift = ds.nu * (ds.R(i) * ds.R(i) + ds.R(j) * ds.R(j));

  InterpointDecomposition out;
  out.alpha = w.dot(y) / std::sqrt(p);
  out.beta = w.squaredNorm() / p - shift;
  out.total_dev =
      (ds.X.row(i) - ds.X.row(j)).squaredNorm() - (y.squaredNorm() + shift);
  const double residual = std::abs(out.total_dev - (2.0 * out.alpha + out.beta));
  if (residual > 1e-10) {
    throw PropertyViolation("interpoint_decomposition: identity total_dev = 2 alpha + beta "
                            "violated by " + std::to_string(residual));
  }
  return out;
}

void RateParams::validate() const {
  if (!(b > 0.0)) throw ConfigError("rate_quantities: b must be > 0");
  if (b > 2.0) throw ConfigError("rate_quantities: b must be <= 2");
  if (!(c0 > 0.0)) throw ConfigError("rate_quantities: c0 must be > 0");
  if (!(eps > 0.0)) throw ConfigError("rate_quantities: eps must be > 0");
  if (!(R_sup >= 1.0)) throw ConfigError("rate_quantities: R_sup must be >= 1");
  if (!(n > 1.0)) throw ConfigError("rate_quantities: n must be > 1");
  if (!(p > 0.0)) throw ConfigError("rate_quantities: p must be > 0");
  if (M_p < 0.0) throw ConfigError("rate_quantities: M_p must be >= 0");
}

RateQuantities rate_quantities(const RateParams& rp) {
  rp.validate();
  const double log_n = std::log(rp.n);
  const double log_factor = std::pow(log_n + std::pow(log_n, rp.eps), 1.0 / rp.b);
  const double c_factor = std::pow(2.0 / rp.c0, 1.0 / rp.b);
  const double inv_sqrt_p = 1.0 / std::sqrt(rp.p);

  RateQuantities out;
  out.r0 = rp.R_sup * std::sqrt(rp.M_p) * inv_sqrt_p * log_factor * c_factor;
  out.r1 = 2.0 * rp.R_sup * c_factor * log_factor * inv_sqrt_p;
  out.u_p = std::max(std::sqrt(rp.M_p), rp.R_sup) * rp.R_sup * log_factor * inv_sqrt_p;
  out.kappa_b =
      32.0 * rp.Cc / (rp.b * std::pow(rp.c0, 2.0 / rp.b)) * std::tgamma(2.0 / rp.b);
  return out;
}

InterpointDev max_interpoint_dev(const DataSet& ds) {
  InterpointDev out;
  const Eigen::MatrixXd dx = pairwise_sq_dists(ds.X);
  const Eigen::MatrixXd dy = pairwise_sq_dists(ds.Y);
  for (int i = 0; i < ds.n; ++i) {
    for (int j = i + 1; j < ds.n; ++j) {
      const double shift = ds.nu * (ds.R(i) * ds.R(i) + ds.R(j) * ds.R(j));
      out.distance_form =
          std::max(out.distance_form, std::abs(dx(i, j) - (dy(i, j) + shift)));
    }
  }
  for (int i = 0; i < ds.n; ++i) {
    for (int j = i; j < ds.n; ++j) {
      const double predicted = ds.Y.row(i).dot(ds.Y.row(j)) +
                               (i == j ? ds.nu * ds.R(i) * ds.R(i) : 0.0);
      const double observed = ds.X.row(i).dot(ds.X.row(j));
      out.dot_form = std::max(out.dot_form, std::abs(observed - predicted));
    }
  }
  return out;
}

}  // namespace infnoise
