#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <optional>

#include "infnoise/models.hpp"

namespace infnoise {

// Row i of every sampler is drawn from substream (seed, i), so outputs are
// bit-identical whether rows are generated serially or in parallel, and the
// first n rows of an (n+k)-row draw equal the n-row draw.
Eigen::MatrixXd sample_noise(const NoiseModel& model, int n, std::uint64_t seed);
Eigen::VectorXd sample_radii(const RadiusModel& model, int n, std::uint64_t seed);
Eigen::MatrixXd sample_signal(const SignalModel& model, int n, std::uint64_t seed);

// One observed point cloud X = Y + diag(R) Z / sqrt(p) plus the model
// metadata downstream checks need.
struct DataSet {
  int n = 0;
  int p = 0;
  Eigen::MatrixXd Y;
  Eigen::MatrixXd Z;
  Eigen::VectorXd R;
  Eigen::MatrixXd X;
  double nu = 0.0;
  std::optional<SigmaStats> sigma_stats;
  std::optional<ConcentrationParams> concentration;
  std::optional<double> diameter_sq_bound;
  std::optional<double> dot_bound;
  double c1_bound = 0.0;
  bool spherical_radii = false;  // all R_i == 1
  double r_inf = 1.0;            // radius model bounds, [r_inf, r_sup]
  double r_sup = 1.0;

  // Checks X == Y + diag(R) Z / sqrt(p) within 1e-12 and nu >= 0.
  void validate() const;
};

// Component seeds are derived as derive_seed(seed, k) with k = 1 (signal),
// 2 (noise), 3 (radii).
DataSet assemble_dataset(const SignalModel& signal, const NoiseModel& noise,
                         const RadiusModel& radii, int n, std::uint64_t seed);

// Rebuilds X from (Y, Z, R); used by loaders that carry raw arrays.
Eigen::MatrixXd combine_information_noise(const Eigen::MatrixXd& Y,
                                          const Eigen::MatrixXd& Z,
                                          const Eigen::VectorXd& R);

}  // namespace infnoise
