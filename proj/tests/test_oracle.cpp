#include <doctest.h>

#include <cmath>
#include <vector>

#include "infnoise/errors.hpp"
#include "infnoise/oracle.hpp"
#include "infnoise/rng.hpp"

using namespace infnoise;

namespace {

SymMatrix diag_matrix(const std::vector<double>& values) {
  SymMatrix m(static_cast<Eigen::Index>(values.size()));
  for (std::size_t i = 0; i < values.size(); ++i) {
    m.set(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i), values[i]);
  }
  return m;
}

SymMatrix random_psd(int n, std::uint64_t seed) {
  RandomStream rs(seed);
  Eigen::MatrixXd b(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) b(i, j) = rs.normal();
  }
  return SymMatrix::from_upper(b * b.transpose() / static_cast<double>(n));
}

// Monte-Carlo estimate of E((gamma' M gamma)^2) with iid entries.
struct McEstimate {
  double mean;
  double se;
};

McEstimate mc_quadform(const SymMatrix& m, bool two_point, int draws, std::uint64_t seed) {
  const Eigen::MatrixXd& dense = m.dense();
  const int n = static_cast<int>(m.order());
  RandomStream rs(seed);
  Eigen::VectorXd g(n);
  double sum = 0.0, sum_sq = 0.0;
  for (int k = 0; k < draws; ++k) {
    for (int i = 0; i < n; ++i) g(i) = two_point ? rs.rademacher() : rs.normal();
    const double q = g.dot(dense * g);
    const double v = q * q;
    sum += v;
    sum_sq += v * v;
  }
  const double mean = sum / draws;
  const double var = (sum_sq - sum * sum / draws) / (draws - 1.0);
  return {mean, std::sqrt(var / draws)};
}

DataSet manual_dataset(const Eigen::MatrixXd& y, const Eigen::MatrixXd& z,
                       const Eigen::VectorXd& r, double nu) {
  DataSet ds;
  ds.n = static_cast<int>(y.rows());
  ds.p = static_cast<int>(y.cols());
  ds.Y = y;
  ds.Z = z;
  ds.R = r;
  ds.X = combine_information_noise(y, z, r);
  ds.nu = nu;
  ds.validate();
  return ds;
}

}  // namespace

TEST_SUITE("oracle") {

TEST_CASE("quadform second moment: Gaussian identity case") {
  // E((gamma' gamma)^2) for standard normal gamma in R^3 is E(chi^2_3)^2 = 15.
  MomentParams params{1.0, 3.0, SymMatrix::identity(3)};
  CHECK(quadform_second_moment(params) == 15.0);
}

TEST_CASE("quadform second moment: two-point law on the identity is exactly p^2") {
  for (int p : {2, 5, 7}) {
    MomentParams params{1.0, 1.0, SymMatrix::identity(p)};
    CHECK(quadform_second_moment(params) == static_cast<double>(p) * p);
  }
}

TEST_CASE("quadform second moment: diag(1,2) with Gaussian entries") {
  MomentParams params{1.0, 3.0, diag_matrix({1.0, 2.0})};
  CHECK(quadform_second_moment(params) == 19.0);  // 2*5 + 9
  const McEstimate mc = mc_quadform(params.matrix, false, 100000, 5);
  CHECK(std::abs(19.0 - mc.mean) <= 4.0 * mc.se);
}

TEST_CASE("quadform rejects impossible moments") {
  CHECK_THROWS_AS(quadform_second_moment(MomentParams{1.0, 0.5, SymMatrix::identity(2)}),
                  ConfigError);
  CHECK_THROWS_AS(quadform_second_moment(MomentParams{0.0, 1.0, SymMatrix::identity(2)}),
                  ConfigError);
}

TEST_CASE("pairdiff variance closed forms") {
  CHECK(pairdiff_variance(SymMatrix::identity(10), 3.0) == 80.0);
  CHECK(pairdiff_variance(SymMatrix::identity(10), 1.0) == 40.0);  // 8p - 4p
  CHECK(pairdiff_variance(SymMatrix(10), 3.0) == 0.0);
}

TEST_CASE("pairdiff variance agrees with the quadform route") {
  // Z_i - Z_j = Sigma^{1/2} Gamma with Gamma entries of variance 2 and
  // fourth moment 2 mu4 + 6; the variance of Gamma' Sigma Gamma must match.
  for (std::uint64_t seed : {1, 2, 3}) {
    const SymMatrix sigma = random_psd(5, seed);
    for (double mu4 : {3.0, 1.0}) {
      MomentParams params{2.0, 2.0 * mu4 + 6.0, sigma};
      const double second = quadform_second_moment(params);
      const double mean = 2.0 * sigma.dense().trace();
      const double via_quadform = second - mean * mean;
      CHECK(pairdiff_variance(sigma, mu4) ==
            doctest::Approx(via_quadform).epsilon(1e-12));
    }
  }
}

TEST_CASE("eq1_bracket arithmetic") {
  CHECK(eq1_bracket(1.0, 1.0, SigmaStats{1e-4, 1.0}, 100.0) ==
        doctest::Approx(0.0101).epsilon(1e-14));
  CHECK(eq1_bracket(0.0, 1.0, SigmaStats{1e-4, 1.0}, 100.0) == 0.0);
  const double ratio = eq1_bracket(1.0, 1.0, SigmaStats{2.5e-5, 1.0}, 200.0) /
                       eq1_bracket(1.0, 1.0, SigmaStats{1e-4, 1.0}, 100.0);
  CHECK(ratio == doctest::Approx(0.005025 / 0.0101).epsilon(1e-12));
}

TEST_CASE("eq1_bracket halves when p doubles in the op-norm regime") {
  const double b1 = eq1_bracket(2.0, 3.0, SigmaStats{1e-9, 1.0}, 500.0);
  const double b2 = eq1_bracket(2.0, 3.0, SigmaStats{1e-9, 1.0}, 1000.0);
  CHECK(b2 / b1 == doctest::Approx(0.5).epsilon(0.01));
}

TEST_CASE("interpoint decomposition with zero noise vectors") {
  RandomStream rs(6);
  Eigen::MatrixXd y(2, 5);
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 5; ++j) y(i, j) = rs.normal();
  }
  Eigen::VectorXd r(2);
  r << 1.0, 2.0;
  DataSet ds = manual_dataset(y, Eigen::MatrixXd::Zero(2, 5), r, 0.7);
  const InterpointDecomposition d = interpoint_decomposition(ds, 0, 1);
  CHECK(d.alpha == 0.0);
  CHECK(d.beta == -0.7 * (1.0 + 4.0));
  CHECK(d.total_dev == doctest::Approx(-3.5).epsilon(1e-14));
}

TEST_CASE("interpoint decomposition with coincident signal points") {
  RandomStream rs(8);
  Eigen::MatrixXd z(2, 6);
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 6; ++j) z(i, j) = rs.normal();
  }
  Eigen::MatrixXd y(2, 6);
  y.row(0).setConstant(0.3);
  y.row(1).setConstant(0.3);
  DataSet ds = manual_dataset(y, z, Eigen::VectorXd::Ones(2), 1.0);
  CHECK(interpoint_decomposition(ds, 0, 1).alpha == 0.0);
}

TEST_CASE("interpoint decomposition identity holds on sampled data") {
  SignalModel circle;
  circle.family = SignalFamily::CircleEmbed;
  circle.ambient_dim = 50;
  NoiseModel noise;
  noise.family = NoiseFamily::GaussianLike;
  noise.dimension = 50;
  RadiusModel two;
  two.family = RadiusFamily::TwoPoint;
  two.r_inf = 0.6;
  two.r_sup = 1.4;
  const DataSet ds = assemble_dataset(circle, noise, two, 10, 91);
  for (int i = 0; i < ds.n; ++i) {
    for (int j = 0; j < ds.n; ++j) {
      if (i == j) continue;
      const InterpointDecomposition d = interpoint_decomposition(ds, i, j);
      const double direct = (ds.X.row(i) - ds.X.row(j)).squaredNorm() -
                            ((ds.Y.row(i) - ds.Y.row(j)).squaredNorm() +
                             ds.nu * (ds.R(i) * ds.R(i) + ds.R(j) * ds.R(j)));
      CHECK(std::abs(d.total_dev - direct) <= 1e-12);
      CHECK(std::abs(d.total_dev - (2.0 * d.alpha + d.beta)) <= 1e-10);
    }
  }
  CHECK_THROWS_AS(interpoint_decomposition(ds, 3, 3), ConfigError);
}

TEST_CASE("rate quantities worked example") {
  RateParams rp;
  rp.b = 2.0;
  rp.c0 = 1.0;
  rp.eps = 1.0;
  rp.n = std::exp(1.0);  // log n = 1
  rp.p = 100.0;
  rp.M_p = 1.0;
  rp.R_sup = 1.0;
  const RateQuantities q = rate_quantities(rp);
  CHECK(q.r0 == doctest::Approx(0.2).epsilon(1e-12));
  CHECK(q.r1 == doctest::Approx(0.4).epsilon(1e-12));  // 2 * r0 when M_p = 1
  CHECK(q.u_p == doctest::Approx(std::sqrt(2.0) / 10.0).epsilon(1e-12));
}

TEST_CASE("u_p scales as p^{-1/2}") {
  RateParams rp;
  rp.n = 50.0;
  rp.p = 1e4;
  const double a = rate_quantities(rp).u_p;
  rp.p = 1e6;
  const double b = rate_quantities(rp).u_p;
  CHECK(b / a == doctest::Approx(0.1).epsilon(1e-12));
}

TEST_CASE("kappa_b worked example and p-independence") {
  RateParams rp;
  rp.b = 2.0;
  rp.c0 = 1.0;
  rp.Cc = 1.0;
  rp.n = 10.0;
  rp.p = 100.0;
  CHECK(rate_quantities(rp).kappa_b == doctest::Approx(16.0).epsilon(1e-12));
  const double at_p100 = rate_quantities(rp).kappa_b;
  rp.p = 10000.0;
  CHECK(rate_quantities(rp).kappa_b == at_p100);
}

TEST_CASE("rate quantities decrease strictly in p") {
  RateParams rp;
  rp.b = 1.5;
  rp.c0 = 0.25;
  rp.n = 100.0;
  rp.M_p = 4.0;
  rp.R_sup = 1.4;
  rp.p = 200.0;
  const RateQuantities lo = rate_quantities(rp);
  rp.p = 400.0;
  const RateQuantities hi = rate_quantities(rp);
  CHECK(hi.r0 < lo.r0);
  CHECK(hi.r1 < lo.r1);
  CHECK(hi.u_p < lo.u_p);
}

TEST_CASE("rate quantities reject b <= 0") {
  RateParams rp;
  rp.b = 0.0;
  CHECK_THROWS_AS(rate_quantities(rp), ConfigError);
  rp.b = -1.0;
  CHECK_THROWS_AS(rate_quantities(rp), ConfigError);
}

TEST_CASE("max interpoint deviation vanishes without noise") {
  RandomStream rs(3);
  Eigen::MatrixXd y(4, 8);
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 8; ++j) y(i, j) = rs.normal();
  }
  DataSet ds = manual_dataset(y, Eigen::MatrixXd::Zero(4, 8), Eigen::VectorXd::Ones(4), 0.0);
  const InterpointDev dev = max_interpoint_dev(ds);
  CHECK(dev.distance_form == 0.0);
  CHECK(dev.dot_form == 0.0);
}

TEST_CASE("max interpoint deviation matches the decomposition on n = 2") {
  RandomStream rs(10);
  Eigen::MatrixXd y(2, 4), z(2, 4);
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 4; ++j) {
      y(i, j) = rs.normal();
      z(i, j) = rs.normal();
    }
  }
  Eigen::VectorXd r(2);
  r << 1.0, 2.0;
  DataSet ds = manual_dataset(y, z, r, 0.5);
  const InterpointDecomposition d = interpoint_decomposition(ds, 0, 1);
  CHECK(max_interpoint_dev(ds).distance_form ==
        doctest::Approx(std::abs(d.total_dev)).epsilon(1e-13));
}

TEST_CASE("quadform matches Monte-Carlo for random PSD matrices, both laws") {
  // Lighter version of the acceptance criterion (fewer draws).
  for (std::uint64_t seed : {11, 12}) {
    const SymMatrix m = random_psd(4, seed);
    for (bool two_point : {false, true}) {
      MomentParams params{1.0, two_point ? 1.0 : 3.0, m};
      const double expected = quadform_second_moment(params);
      const McEstimate mc = mc_quadform(m, two_point, 200000, 900 + seed);
      CHECK(std::abs(expected - mc.mean) <= 4.0 * mc.se);
    }
  }
}

}  // TEST_SUITE
