#include "infnoise/sampling.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "infnoise/errors.hpp"
#include "infnoise/rng.hpp"

namespace infnoise {

namespace {

double standard_normal_cdf(double x) {
  return 0.5 * std::erfc(-x / std::numbers::sqrt2);
}

// Symmetric PSD square root; tiny negative eigenvalues are clamped to 0.
Eigen::MatrixXd psd_sqrt(const Eigen::MatrixXd& s) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s);
  if (es.info() != Eigen::Success) {
    throw PropertyViolation("psd_sqrt: eigensolver did not converge");
  }
  Eigen::VectorXd lam = es.eigenvalues().cwiseMax(0.0);
  return es.eigenvectors() * lam.cwiseSqrt().asDiagonal() * es.eigenvectors().transpose();
}

double draw_entry(RandomStream& rs, EntryLaw law) {
  switch (law) {
    case EntryLaw::StandardNormal:
      return rs.normal();
    case EntryLaw::TwoPoint:
      return rs.rademacher();
  }
  throw ConfigError("sample_noise: unknown entry law");
}

}  // namespace

Eigen::MatrixXd sample_noise(const NoiseModel& model, int n, std::uint64_t seed) {
  model.validate();
  const int p = model.dimension;
  if (p <= 0) throw ConfigError("sample_noise: model dimension not set");
  if (n < 0) throw ConfigError("sample_noise: n must be >= 0");

  Eigen::MatrixXd out(n, p);

  // Materialize the mixing factor once; per-row work stays independent.
  Eigen::MatrixXd root;
  bool use_root = false;
  if (model.uses_sigma()) {
    if (model.sigma.has_value()) {
      root = psd_sqrt(*model.sigma);
      use_root = true;
    } else if (model.sigma_scale != 1.0) {
      root = std::sqrt(model.sigma_scale) * Eigen::MatrixXd::Identity(p, p);
      use_root = true;
    }
  }

  const double sqrt_p = std::sqrt(static_cast<double>(p));
  for (int i = 0; i < n; ++i) {
    RandomStream rs = RandomStream::substream(seed, static_cast<std::uint64_t>(i));
    Eigen::VectorXd row(p);
    switch (model.family) {
      case NoiseFamily::GaussianLike: {
        for (int k = 0; k < p; ++k) row(k) = draw_entry(rs, model.entry_law);
        if (use_root) row = root * row;
        break;
      }
      case NoiseFamily::SphereUniform: {
        for (int k = 0; k < p; ++k) row(k) = rs.normal();
        row *= sqrt_p / row.norm();
        break;
      }
      case NoiseFamily::ScaledSphere: {
        for (int k = 0; k < p; ++k) row(k) = rs.normal();
        row *= sqrt_p / row.norm();
        if (use_root) row = root * row;
        break;
      }
      case NoiseFamily::LpBall: {
        // v = (sign_k G_k^{1/b})_k / (sum_k G_k + W)^{1/b} is uniform in the
        // unit l^b ball when G_k ~ Gamma(1/b) and W ~ Exp(1).
        const double b = model.b_exponent;
        double total = 0.0;
        for (int k = 0; k < p; ++k) {
          const double g = rs.gamma(1.0 / b);
          const double sign = rs.rademacher();
          row(k) = sign * std::pow(g, 1.0 / b);
          total += g;
        }
        total += rs.exponential();
        row *= std::pow(static_cast<double>(p) / total, 1.0 / b);
        break;
      }
      case NoiseFamily::GaussianCopula: {
        for (int k = 0; k < p; ++k) row(k) = rs.normal();
        if (use_root) row = root * row;
        for (int k = 0; k < p; ++k) row(k) = standard_normal_cdf(row(k)) - 0.5;
        break;
      }
    }
    out.row(i) = row.transpose();
  }
  return out;
}

Eigen::VectorXd sample_radii(const RadiusModel& model, int n, std::uint64_t seed) {
  model.validate();
  if (n < 0) throw ConfigError("sample_radii: n must be >= 0");
  Eigen::VectorXd out(n);
  const double scale = model.scale_factor();
  for (int i = 0; i < n; ++i) {
    RandomStream rs = RandomStream::substream(seed, static_cast<std::uint64_t>(i));
    double r = 1.0;
    switch (model.family) {
      case RadiusFamily::ConstantOne:
        r = 1.0;
        break;
      case RadiusFamily::UniformInterval:
        r = model.r_inf + (model.r_sup - model.r_inf) * rs.uniform();
        break;
      case RadiusFamily::TwoPoint:
        r = rs.uniform() < 0.5 ? model.r_inf : model.r_sup;
        break;
    }
    out(i) = scale * r;
  }
  return out;
}

Eigen::MatrixXd sample_signal(const SignalModel& model, int n, std::uint64_t seed) {
  model.validate();
  const int p = model.ambient_dim;
  if (p <= 0) throw ConfigError("sample_signal: ambient_dim not set");
  if (n < 0) throw ConfigError("sample_signal: n must be >= 0");

  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n, p);
  for (int i = 0; i < n; ++i) {
    RandomStream rs = RandomStream::substream(seed, static_cast<std::uint64_t>(i));
    switch (model.family) {
      case SignalFamily::FixedCloud: {
        const Eigen::Index row = static_cast<Eigen::Index>(i % model.points->rows());
        out.row(i) = model.points->row(row);
        break;
      }
      case SignalFamily::CircleEmbed: {
        const double theta = 2.0 * std::numbers::pi * rs.uniform();
        out(i, 0) = model.scale * std::cos(theta);
        out(i, 1) = model.scale * std::sin(theta);
        break;
      }
      case SignalFamily::SphereEmbed: {
        const int d1 = model.intrinsic_dim + 1;
        Eigen::VectorXd g(d1);
        for (int k = 0; k < d1; ++k) g(k) = rs.normal();
        g *= model.scale / g.norm();
        out.row(i).head(d1) = g.transpose();
        break;
      }
      case SignalFamily::GaussianLowrank: {
        for (int k = 0; k < model.intrinsic_dim; ++k) out(i, k) = model.scale * rs.normal();
        break;
      }
    }
  }
  return out;
}

Eigen::MatrixXd combine_information_noise(const Eigen::MatrixXd& Y,
                                          const Eigen::MatrixXd& Z,
                                          const Eigen::VectorXd& R) {
  if (Y.rows() != Z.rows() || Y.cols() != Z.cols() || R.size() != Y.rows()) {
    throw ConfigError("combine_information_noise: dimension mismatch (Y " +
                      std::to_string(Y.rows()) + "x" + std::to_string(Y.cols()) + ", Z " +
                      std::to_string(Z.rows()) + "x" + std::to_string(Z.cols()) + ", R " +
                      std::to_string(R.size()) + ")");
  }
  const double inv_sqrt_p = 1.0 / std::sqrt(static_cast<double>(Y.cols()));
  Eigen::MatrixXd X = Y;
  for (Eigen::Index i = 0; i < Y.rows(); ++i) {
    X.row(i) += (R(i) * inv_sqrt_p) * Z.row(i);
  }
  return X;
}

void DataSet::validate() const {
  if (n != Y.rows() || n != Z.rows() || n != X.rows() || n != R.size()) {
    throw ConfigError("dataset: row counts disagree with n");
  }
  if (p != Y.cols() || p != Z.cols() || p != X.cols()) {
    throw ConfigError("dataset: column counts disagree with p");
  }
  if (!(nu >= 0.0)) throw ConfigError("dataset: nu must be >= 0");
  const Eigen::MatrixXd rebuilt = combine_information_noise(Y, Z, R);
  const double dev = (X - rebuilt).cwiseAbs().maxCoeff();
  if (dev > 1e-12) {
    throw ConfigError("dataset: X deviates from Y + diag(R) Z / sqrt(p) by " +
                      std::to_string(dev));
  }
}

DataSet assemble_dataset(const SignalModel& signal, const NoiseModel& noise,
                         const RadiusModel& radii, int n, std::uint64_t seed) {
  if (n < 1) throw ConfigError("assemble_dataset: n must be >= 1");
  const SignalModel sig = signal.ambient_dim == 0 && noise.dimension > 0
                              ? signal.with_ambient(noise.dimension)
                              : signal;
  sig.validate();
  const int p = sig.ambient_dim;
  if (p <= 0) throw ConfigError("assemble_dataset: ambient dimension not set");
  const NoiseModel noi = noise.with_dimension(p);
  radii.validate();

  DataSet ds;
  ds.n = n;
  ds.p = p;
  ds.Y = sample_signal(sig, n, derive_seed(seed, 1));
  ds.Z = sample_noise(noi, n, derive_seed(seed, 2));
  ds.R = sample_radii(radii, n, derive_seed(seed, 3));
  ds.X = combine_information_noise(ds.Y, ds.Z, ds.R);
  ds.nu = noi.nu();
  ds.sigma_stats = noi.sigma_stats();
  ds.concentration = noi.concentration();
  ds.diameter_sq_bound = sig.diameter_sq_bound();
  ds.dot_bound = sig.dot_bound();
  ds.c1_bound = sig.c1_bound();
  ds.spherical_radii = radii.is_spherical();
  ds.r_inf = radii.effective_r_inf();
  ds.r_sup = radii.effective_r_sup();
  return ds;
}

}  // namespace infnoise
