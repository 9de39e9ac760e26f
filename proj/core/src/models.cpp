#include "infnoise/models.hpp"

#include <cmath>
#include <string>

#include "infnoise/errors.hpp"

namespace infnoise {

namespace {

// Largest eigenvalue and related PSD checks for a candidate Sigma.
void check_psd(const Eigen::MatrixXd& s, bool unit_diagonal) {
  if (s.rows() != s.cols()) throw ConfigError("sigma: matrix not square");
  const double scale = std::max(1.0, s.cwiseAbs().maxCoeff());
  if ((s - s.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw ConfigError("sigma: matrix not symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -1e-10 * scale) {
    throw ConfigError("sigma: matrix not positive semidefinite (min eigenvalue " +
                      std::to_string(es.eigenvalues().minCoeff()) + ")");
  }
  if (unit_diagonal) {
    for (Eigen::Index i = 0; i < s.rows(); ++i) {
      if (std::abs(s(i, i) - 1.0) > 1e-12) {
        throw ConfigError("sigma: gaussian_copula requires a correlation matrix "
                          "(unit diagonal); diagonal entry " +
                          std::to_string(i) + " is " + std::to_string(s(i, i)));
      }
    }
  }
}

}  // namespace

bool NoiseModel::uses_sigma() const {
  return family == NoiseFamily::GaussianLike || family == NoiseFamily::ScaledSphere ||
         family == NoiseFamily::GaussianCopula;
}

void NoiseModel::validate() const {
  if (dimension < 0) throw ConfigError("noise: dimension must be >= 0");
  if (!uses_sigma()) {
    if (sigma.has_value()) {
      throw ConfigError("noise: this family takes no sigma matrix");
    }
    if (sigma_scale != 1.0) {
      throw ConfigError("noise: this family takes no sigma_scale");
    }
  } else if (sigma.has_value()) {
    check_psd(*sigma, family == NoiseFamily::GaussianCopula);
    if (dimension > 0 && sigma->rows() != dimension) {
      throw ConfigError("noise: sigma order " + std::to_string(sigma->rows()) +
                        " does not match dimension " + std::to_string(dimension));
    }
  } else {
    if (sigma_scale < 0.0) throw ConfigError("noise: sigma_scale must be >= 0");
    if (family == NoiseFamily::GaussianCopula && sigma_scale != 1.0) {
      throw ConfigError("noise: gaussian_copula sigma must have unit diagonal");
    }
  }
  if (family == NoiseFamily::LpBall) {
    if (!(b_exponent >= 1.0 && b_exponent <= 2.0)) {
      throw ConfigError("noise: lp_ball b_exponent must lie in [1,2], got " +
                        std::to_string(b_exponent));
    }
  }
}

NoiseModel NoiseModel::with_dimension(int p) const {
  NoiseModel out = *this;
  if (out.dimension == 0) out.dimension = p;
  if (out.dimension != p) {
    throw ConfigError("noise: model dimension " + std::to_string(out.dimension) +
                      " does not match requested p=" + std::to_string(p));
  }
  out.validate();
  return out;
}

Eigen::MatrixXd NoiseModel::sigma_dense() const {
  if (!uses_sigma()) throw ConfigError("noise: family has no sigma");
  if (dimension <= 0) throw ConfigError("noise: dimension not set");
  if (sigma.has_value()) return *sigma;
  return sigma_scale * Eigen::MatrixXd::Identity(dimension, dimension);
}

double NoiseModel::nu() const {
  if (dimension <= 0) throw ConfigError("noise: dimension not set");
  const double p = static_cast<double>(dimension);
  switch (family) {
    case NoiseFamily::GaussianLike:
    case NoiseFamily::ScaledSphere:
      return sigma.has_value() ? sigma->trace() / p : sigma_scale;
    case NoiseFamily::SphereUniform:
      return 1.0;  // ||Z|| = sqrt(p) surely
    case NoiseFamily::LpBall: {
      // E v1^2 for v uniform in the unit l^b ball, via the Beta moment of
      // |g_i|^b / sum |g_j|^b with generalized-normal g:
      //   E v1^2 = Gamma(3/b) Gamma(p/b) / (Gamma(1/b) Gamma((p+2)/b)) * p/(p+2)
      // and Z = p^{1/b} v, so nu = p^{2/b} E v1^2.
      const double b = b_exponent;
      const double log_ev2 = std::lgamma(3.0 / b) + std::lgamma(p / b) -
                             std::lgamma(1.0 / b) - std::lgamma((p + 2.0) / b) +
                             std::log(p / (p + 2.0));
      return std::exp(2.0 / b * std::log(p) + log_ev2);
    }
    case NoiseFamily::GaussianCopula:
      return 1.0 / 12.0;  // coordinates are Uniform(-1/2, 1/2) marginally
  }
  throw ConfigError("noise: unknown family");
}

double NoiseModel::entry_mu4() const {
  switch (entry_law) {
    case EntryLaw::StandardNormal:
      return 3.0;
    case EntryLaw::TwoPoint:
      return 1.0;
  }
  throw ConfigError("noise: unknown entry law");
}

std::optional<SigmaStats> NoiseModel::sigma_stats() const {
  if (!uses_sigma() && family != NoiseFamily::SphereUniform) return std::nullopt;
  if (dimension <= 0) throw ConfigError("noise: dimension not set");
  const double p = static_cast<double>(dimension);
  SigmaStats out;
  if (family == NoiseFamily::SphereUniform) {
    // cov(sqrt(p) v) = Id exactly, so the effective Sigma is the identity.
    out.trace_sq_over_p2 = 1.0 / p;
    out.op_norm = 1.0;
    return out;
  }
  if (sigma.has_value()) {
    out.trace_sq_over_p2 = (sigma->array() * sigma->array()).sum() / (p * p);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(*sigma, Eigen::EigenvaluesOnly);
    out.op_norm = es.eigenvalues().cwiseAbs().maxCoeff();
  } else {
    out.trace_sq_over_p2 = sigma_scale * sigma_scale / p;
    out.op_norm = sigma_scale;
  }
  return out;
}

ConcentrationParams NoiseModel::concentration() const {
  ConcentrationParams out;
  const double op = uses_sigma() ? sigma_stats()->op_norm : 1.0;
  switch (family) {
    case NoiseFamily::GaussianLike:
      // Gaussian measure: b = 2, c0 = 1 / (2 ||Sigma||_op). Declared for the
      // standard-normal entry law; the two-point law concentrates at least
      // as fast (bounded support) and reuses the same declared bound.
      out = {2.0, 1.0 / (2.0 * std::max(op, 1e-300)), 2.0};
      break;
    case NoiseFamily::SphereUniform:
      out = {2.0, 0.25, 2.0};
      break;
    case NoiseFamily::ScaledSphere:
      out = {2.0, 0.25 / std::max(op, 1e-300), 2.0};
      break;
    case NoiseFamily::LpBall:
      // Schechtman-Zinn constants depend only on b; declared conservatively.
      out = {4.0, 0.125, b_exponent};
      break;
    case NoiseFamily::GaussianCopula:
      // Phi is 1/sqrt(2 pi)-Lipschitz, composed with the Gaussian bound.
      out = {2.0, std::acos(-1.0) / std::max(op, 1e-300), 2.0};
      break;
  }
  return out;
}

void RadiusModel::validate() const {
  if (family == RadiusFamily::ConstantOne) {
    if (r_inf != 1.0 || r_sup != 1.0) {
      throw ConfigError("radii: constant_one requires r_inf = r_sup = 1");
    }
    return;
  }
  if (!(r_inf > 0.0)) throw ConfigError("radii: r_inf must be > 0");
  if (r_inf > r_sup) {
    throw ConfigError("radii: r_inf " + std::to_string(r_inf) + " exceeds r_sup " +
                      std::to_string(r_sup));
  }
  if (effective_r_sup() < 1.0) {
    throw ConfigError("radii: upper bound R_inf(p) must be >= 1 "
                      "(effective bound is " + std::to_string(effective_r_sup()) + ")");
  }
}

double RadiusModel::second_moment_raw() const {
  switch (family) {
    case RadiusFamily::ConstantOne:
      return 1.0;
    case RadiusFamily::UniformInterval:
      return (r_inf * r_inf + r_inf * r_sup + r_sup * r_sup) / 3.0;
    case RadiusFamily::TwoPoint:
      return 0.5 * (r_inf * r_inf + r_sup * r_sup);
  }
  throw ConfigError("radii: unknown family");
}

double RadiusModel::scale_factor() const {
  if (!normalize_second_moment) return 1.0;
  return 1.0 / std::sqrt(second_moment_raw());
}

void SignalModel::validate() const {
  if (scale <= 0.0 && family != SignalFamily::FixedCloud) {
    throw ConfigError("signal: scale must be > 0");
  }
  switch (family) {
    case SignalFamily::FixedCloud:
      if (!points.has_value() || points->rows() < 1) {
        throw ConfigError("signal: fixed_cloud requires a nonempty points array");
      }
      if (ambient_dim > 0 && points->cols() != ambient_dim) {
        throw ConfigError("signal: fixed_cloud points have " +
                          std::to_string(points->cols()) + " columns, expected " +
                          std::to_string(ambient_dim));
      }
      break;
    case SignalFamily::CircleEmbed:
      if (intrinsic_dim != 1) throw ConfigError("signal: circle_embed has intrinsic_dim 1");
      if (ambient_dim > 0 && ambient_dim < 2) {
        throw ConfigError("signal: circle_embed needs ambient_dim >= 2");
      }
      break;
    case SignalFamily::SphereEmbed:
      if (intrinsic_dim < 1) throw ConfigError("signal: sphere_embed needs intrinsic_dim >= 1");
      if (ambient_dim > 0 && ambient_dim < intrinsic_dim + 1) {
        throw ConfigError("signal: sphere_embed needs ambient_dim >= intrinsic_dim + 1");
      }
      break;
    case SignalFamily::GaussianLowrank:
      if (intrinsic_dim < 1) throw ConfigError("signal: gaussian_lowrank needs intrinsic_dim >= 1");
      if (ambient_dim > 0 && ambient_dim < intrinsic_dim) {
        throw ConfigError("signal: gaussian_lowrank needs ambient_dim >= intrinsic_dim");
      }
      break;
  }
}

SignalModel SignalModel::with_ambient(int p) const {
  SignalModel out = *this;
  if (out.ambient_dim == 0) out.ambient_dim = p;
  if (out.ambient_dim != p) {
    throw ConfigError("signal: ambient_dim " + std::to_string(out.ambient_dim) +
                      " does not match requested p=" + std::to_string(p));
  }
  out.validate();
  return out;
}

Eigen::RowVectorXd SignalModel::mean(int p) const {
  if (family == SignalFamily::FixedCloud) {
    return points->colwise().mean();
  }
  return Eigen::RowVectorXd::Zero(p);
}

double SignalModel::c1_bound() const {
  switch (family) {
    case SignalFamily::FixedCloud: {
      const Eigen::RowVectorXd a = points->colwise().mean();
      double worst = 0.0;
      for (Eigen::Index i = 0; i < points->rows(); ++i) {
        worst = std::max(worst, (points->row(i) - a).squaredNorm());
      }
      return worst;
    }
    case SignalFamily::CircleEmbed:
    case SignalFamily::SphereEmbed:
      return scale * scale;
    case SignalFamily::GaussianLowrank:
      return scale * scale * static_cast<double>(intrinsic_dim);
  }
  throw ConfigError("signal: unknown family");
}

std::optional<double> SignalModel::dot_bound() const {
  switch (family) {
    case SignalFamily::FixedCloud: {
      double worst = 0.0;
      for (Eigen::Index i = 0; i < points->rows(); ++i) {
        worst = std::max(worst, points->row(i).squaredNorm());
      }
      return worst;
    }
    case SignalFamily::CircleEmbed:
    case SignalFamily::SphereEmbed:
      return scale * scale;
    case SignalFamily::GaussianLowrank:
      return std::nullopt;
  }
  throw ConfigError("signal: unknown family");
}

std::optional<double> SignalModel::diameter_sq_bound() const {
  switch (family) {
    case SignalFamily::FixedCloud: {
      double worst = 0.0;
      for (Eigen::Index i = 0; i < points->rows(); ++i) {
        for (Eigen::Index j = i + 1; j < points->rows(); ++j) {
          worst = std::max(worst, (points->row(i) - points->row(j)).squaredNorm());
        }
      }
      return worst;
    }
    case SignalFamily::CircleEmbed:
    case SignalFamily::SphereEmbed:
      return 4.0 * scale * scale;
    case SignalFamily::GaussianLowrank:
      return std::nullopt;  // unbounded support
  }
  throw ConfigError("signal: unknown family");
}

}  // namespace infnoise
