#include <doctest.h>

#include <cmath>

#include "infnoise/errors.hpp"
#include "infnoise/rng.hpp"
#include "infnoise/sym_matrix.hpp"

using namespace infnoise;

namespace {

SymMatrix diag2(double a, double b) {
  SymMatrix m(2);
  m.set(0, 0, a);
  m.set(1, 1, b);
  return m;
}

SymMatrix random_symmetric(int n, std::uint64_t seed) {
  RandomStream rs(seed);
  SymMatrix m(n);
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) m.set(i, j, 2.0 * rs.uniform() - 1.0);
  }
  return m;
}

}  // namespace

TEST_SUITE("linalg") {

TEST_CASE("eigh diagonal case") {
  const SpectralSummary s = eigh(diag2(2.0, 1.0));
  CHECK(s.eigenvalues(0) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(s.eigenvalues(1) == doctest::Approx(1.0).epsilon(1e-14));
  // Standard basis up to sign; the sign convention fixes them positive.
  CHECK(std::abs(s.eigenvectors(0, 0)) == doctest::Approx(1.0));
  CHECK(s.eigenvectors(0, 0) > 0.0);
  CHECK(std::abs(s.eigenvectors(1, 1)) == doctest::Approx(1.0));
  CHECK(s.eigenvectors(1, 1) > 0.0);
  CHECK(s.gaps(0) == doctest::Approx(1.0));
}

TEST_CASE("eigh exchange matrix") {
  SymMatrix m(2);
  m.set(0, 1, 1.0);
  const SpectralSummary s = eigh(m);
  CHECK(s.eigenvalues(0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(s.eigenvalues(1) == doctest::Approx(-1.0).epsilon(1e-14));
}

TEST_CASE("eigh reconstruction on a random 6x6, seed 7") {
  const SymMatrix m = random_symmetric(6, 7);
  const SpectralSummary s = eigh(m);
  const Eigen::MatrixXd rebuilt =
      s.eigenvectors * s.eigenvalues.asDiagonal() * s.eigenvectors.transpose();
  CHECK((m.dense() - rebuilt).norm() <= 1e-8 * m.dense().norm());
  CHECK((s.eigenvectors.transpose() * s.eigenvectors - Eigen::MatrixXd::Identity(6, 6))
            .norm() <= 1e-10 * 6);
}

TEST_CASE("eigh is deterministic and sign-fixed") {
  const SymMatrix m = random_symmetric(8, 123);
  const SpectralSummary a = eigh(m);
  const SpectralSummary b = eigh(m);
  CHECK(a.eigenvectors == b.eigenvectors);
  CHECK(a.eigenvalues == b.eigenvalues);
  for (int k = 0; k < 8; ++k) {
    Eigen::Index imax = 0;
    a.eigenvectors.col(k).cwiseAbs().maxCoeff(&imax);
    CHECK(a.eigenvectors(imax, k) > 0.0);
  }
}

TEST_CASE("eigh rejects non-finite entries with the offending index") {
  SymMatrix m(3);
  m.set(0, 1, std::nan(""));
  CHECK_THROWS_WITH_AS(eigh(m), doctest::Contains("(0,1)"), ConfigError);
}

TEST_CASE("frobenius norm examples") {
  CHECK(frobenius_norm(diag2(3.0, 4.0)) == doctest::Approx(5.0).epsilon(1e-15));
  CHECK(frobenius_norm(SymMatrix(4)) == 0.0);
  SymMatrix m(2);
  m.set(0, 0, 1.0);
  m.set(0, 1, 2.0);
  m.set(1, 1, 1.0);
  CHECK(frobenius_norm(m) == doctest::Approx(std::sqrt(10.0)).epsilon(1e-15));
}

TEST_CASE("operator norm examples") {
  CHECK(operator_norm(diag2(3.0, -4.0)) == doctest::Approx(4.0).epsilon(1e-14));
  CHECK(operator_norm(SymMatrix(3)) == 0.0);
  SymMatrix ex(2);
  ex.set(0, 1, 1.0);
  CHECK(operator_norm(ex) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("hadamard trace examples") {
  const SymMatrix d = diag2(1.0, 2.0);
  CHECK(hadamard_trace(d, d) == 5.0);

  SymMatrix m(2);
  m.set(0, 0, 1.0);
  m.set(1, 1, 1.0);
  m.set(0, 1, 9.0);
  CHECK(hadamard_trace(m, m) == 2.0);  // off-diagonals do not enter

  SymMatrix d3(3);
  d3.set(0, 0, 1.0);
  d3.set(1, 1, 2.0);
  d3.set(2, 2, 3.0);
  CHECK(hadamard_trace(d3, SymMatrix::identity(3)) == 6.0);

  CHECK_THROWS_AS(hadamard_trace(d, d3), ConfigError);
}

TEST_CASE("center_conjugate examples") {
  SymMatrix ones(3);
  for (int i = 0; i < 3; ++i) {
    for (int j = i; j < 3; ++j) ones.set(i, j, 1.0);
  }
  CHECK(center_both(ones).dense().cwiseAbs().maxCoeff() <= 1e-15);

  const SymMatrix m = random_symmetric(4, 99);
  CHECK(center_conjugate(m, false, false) == m.dense());

  // H diag(1,1) H = H since H is an idempotent projector.
  const Eigen::MatrixXd c = center_conjugate(SymMatrix::identity(2), true, true);
  CHECK(c(0, 0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(c(0, 1) == doctest::Approx(-0.5).epsilon(1e-15));
  CHECK(c(1, 0) == doctest::Approx(-0.5).epsilon(1e-15));
  CHECK(c(1, 1) == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("one-sided centering removes the matching means") {
  const SymMatrix m = random_symmetric(5, 17);
  const Eigen::MatrixXd left = center_conjugate(m, true, false);
  CHECK(left.colwise().sum().cwiseAbs().maxCoeff() <= 1e-12);
  const Eigen::MatrixXd right = center_conjugate(m, false, true);
  CHECK(right.rowwise().sum().cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("operator norm bounded by frobenius norm") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const SymMatrix m = random_symmetric(2 + static_cast<int>(seed % 9), 1000 + seed);
    CHECK(operator_norm(m) <= frobenius_norm(m) + 1e-12);
  }
}

TEST_CASE("centering matrix has operator norm 1") {
  for (int n : {2, 3, 10, 50}) {
    const SymMatrix h = SymMatrix::from_dense(centering_matrix(n));
    CHECK(std::abs(operator_norm(h) - 1.0) <= 1e-12);
  }
}

TEST_CASE("frobenius norm squared equals sum of squared eigenvalues") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const SymMatrix m = random_symmetric(3 + static_cast<int>(seed), 2000 + seed);
    const SpectralSummary s = eigh(m);
    const double fro_sq = frobenius_norm(m) * frobenius_norm(m);
    CHECK(fro_sq ==
          doctest::Approx(s.eigenvalues.squaredNorm()).epsilon(1e-8));
  }
}

TEST_CASE("center_both is idempotent") {
  const SymMatrix m = random_symmetric(7, 31);
  const SymMatrix once = center_both(m);
  const SymMatrix twice = center_both(once);
  CHECK((once.dense() - twice.dense()).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("center_both annihilates the all-ones vector") {
  const SymMatrix m = random_symmetric(6, 47);
  const SymMatrix c = center_both(m);
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(6);
  CHECK((c.dense() * ones).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK((ones.transpose() * c.dense()).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("from_dense rejects asymmetric input") {
  Eigen::MatrixXd m(2, 2);
  m << 1.0, 2.0, 3.0, 4.0;
  CHECK_THROWS_AS(SymMatrix::from_dense(m), ConfigError);
}

}  // TEST_SUITE
