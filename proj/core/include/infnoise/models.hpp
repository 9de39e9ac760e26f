#pragma once

#include <Eigen/Dense>

#include <optional>

namespace infnoise {

enum class NoiseFamily {
  GaussianLike,    // Sigma^{1/2} U, U iid mean 0 / variance 1 entries
  SphereUniform,   // sqrt(p) * v, v uniform on the unit l2 sphere
  ScaledSphere,    // Gamma * sqrt(p) * v, Gamma Gamma' = Sigma
  LpBall,          // p^{1/b} * v, v uniform in the unit l^b ball, b in [1,2]
  GaussianCopula,  // Phi(N_i) - 1/2, N multivariate normal with correlation Sigma
};

enum class EntryLaw {
  StandardNormal,  // fourth moment 3
  TwoPoint,        // +/-1 equiprobable, fourth moment 1
};

struct SigmaStats {
  double trace_sq_over_p2 = 0.0;  // trace(Sigma^2) / p^2
  double op_norm = 0.0;           // ||Sigma||_op
};

// Tail bound parameters: P(|F(Z) - mu_F| > r) <= C exp(-c0 r^b) for every
// 1-Lipschitz F.
struct ConcentrationParams {
  double C = 2.0;
  double c0 = 0.5;
  double b = 2.0;
};

class NoiseModel {
 public:
  NoiseFamily family = NoiseFamily::GaussianLike;
  int dimension = 0;  // p; 0 means "adopt the grid dimension"
  // Sigma = sigma matrix when present, else sigma_scale * Id. Families that
  // take no Sigma (sphere_uniform, lp_ball) reject both.
  std::optional<Eigen::MatrixXd> sigma;
  double sigma_scale = 1.0;
  EntryLaw entry_law = EntryLaw::StandardNormal;
  double b_exponent = 2.0;  // lp_ball only

  void validate() const;  // throws ConfigError
  NoiseModel with_dimension(int p) const;

  double nu() const;  // E ||Z||^2 / p, closed form per family
  double entry_mu4() const;
  std::optional<SigmaStats> sigma_stats() const;
  ConcentrationParams concentration() const;
  bool uses_sigma() const;
  Eigen::MatrixXd sigma_dense() const;  // materialized Sigma (uses_sigma only)
};

enum class RadiusFamily {
  ConstantOne,
  UniformInterval,
  TwoPoint,  // atoms {r_inf, r_sup} with equal weight
};

class RadiusModel {
 public:
  RadiusFamily family = RadiusFamily::ConstantOne;
  double r_inf = 1.0;
  double r_sup = 1.0;
  bool normalize_second_moment = false;

  void validate() const;
  double second_moment_raw() const;  // E R^2 before normalization
  double scale_factor() const;       // applied when normalize_second_moment
  double effective_r_inf() const { return scale_factor() * r_inf; }
  double effective_r_sup() const { return scale_factor() * r_sup; }
  bool is_spherical() const { return family == RadiusFamily::ConstantOne; }
};

enum class SignalFamily {
  FixedCloud,
  CircleEmbed,
  SphereEmbed,
  GaussianLowrank,
};

class SignalModel {
 public:
  SignalFamily family = SignalFamily::CircleEmbed;
  int intrinsic_dim = 1;
  int ambient_dim = 0;  // 0 means "adopt the grid dimension"
  double scale = 1.0;
  std::optional<Eigen::MatrixXd> points;  // fixed_cloud rows

  void validate() const;
  SignalModel with_ambient(int p) const;

  Eigen::RowVectorXd mean(int p) const;  // the centering vector a
  double c1_bound() const;               // bound on E ||Y - a||^2
  std::optional<double> diameter_sq_bound() const;  // M_p when support is bounded
  // Bound on max |Y_i' Y_j| (the dot-product M_p); absent for unbounded
  // support.
  std::optional<double> dot_bound() const;
};

}  // namespace infnoise
