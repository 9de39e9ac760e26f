#include "infnoise/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "infnoise/errors.hpp"

namespace infnoise {

namespace {

void require_spherical(const DataSet& ds, const char* op) {
  for (Eigen::Index i = 0; i < ds.R.size(); ++i) {
    if (ds.R(i) != 1.0) {
      throw ConfigError(std::string(op) +
                        ": requires spherical radii (all R_i = 1); R(" +
                        std::to_string(i) + ") = " + std::to_string(ds.R(i)));
    }
  }
}

}  // namespace

Eigen::VectorXd principal_angles(const Eigen::MatrixXd& v, const Eigen::MatrixXd& w, int k) {
  if (k < 1 || k > v.cols() || k > w.cols()) {
    throw ConfigError("principal_angles: k out of range");
  }
  const Eigen::MatrixXd overlap =
      v.leftCols(k).transpose() * w.leftCols(k);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(overlap);
  Eigen::VectorXd angles(k);
  for (int i = 0; i < k; ++i) {
    const double c = std::clamp(svd.singularValues()(i), 0.0, 1.0);
    angles(i) = std::acos(c);
  }
  std::sort(angles.data(), angles.data() + angles.size());
  return angles;
}

SpectralGapReport compare_spectra(const SymMatrix& m, const SymMatrix& mt,
                                  const std::vector<int>& ks, double separation_frac) {
  if (m.order() != mt.order()) {
    throw ConfigError("compare_spectra: order mismatch (" + std::to_string(m.order()) +
                      " vs " + std::to_string(mt.order()) + ")");
  }
  const Eigen::Index n = m.order();
  const SymMatrix diff = m - mt;

  SpectralGapReport rep;
  rep.frob_gap = frobenius_norm(diff);
  rep.op_gap = operator_norm(diff);

  const SpectralSummary sm = eigh(m);
  const SpectralSummary st = eigh(mt);
  rep.eig_devs = (sm.eigenvalues - st.eigenvalues).cwiseAbs();

  const double max_dev = n > 0 ? rep.eig_devs.maxCoeff() : 0.0;
  if (max_dev > rep.op_gap + 1e-10) {
    throw PropertyViolation("compare_spectra: Weyl inequality violated (max eigenvalue "
                            "deviation " + std::to_string(max_dev) + " > op gap " +
                            std::to_string(rep.op_gap) + " + 1e-10)");
  }

  const double head = std::abs(sm.eigenvalues(0));
  const double threshold = separation_frac * head;
  for (Eigen::Index i = 0; i + 1 < n; ++i) {
    if (threshold > 0.0 && sm.gaps(i) >= threshold) {
      rep.gap_locations.push_back(static_cast<int>(i));
    }
  }

  for (int k : ks) {
    PrincipalAngles pa;
    pa.k = k;
    pa.angles = principal_angles(sm.eigenvectors, st.eigenvectors, k);
    pa.separated =
        k < n ? (threshold > 0.0 && sm.gaps(k - 1) >= threshold) : true;
    if (k < n && rep.op_gap > 0.0) {
      pa.davis_kahan_ratio = std::sin(pa.top_angle()) * sm.gaps(k - 1) / rep.op_gap;
    }
    rep.top_k_angles.push_back(std::move(pa));
  }
  return rep;
}

GaussianRescaleReport gaussian_rescale_check(const DataSet& ds, double s) {
  if (!(s > 0.0)) throw ConfigError("gaussian_rescale_check: s must be > 0");
  require_spherical(ds, "gaussian_rescale_check");

  const KernelSpec kern = KernelSpec::gaussian(s);
  const SymMatrix approx = approx_matrix_spherical(ds, kern);
  const SymMatrix pure = pure_signal_matrix(ds, kern).matrix;
  const double factor = std::exp(-2.0 * ds.nu * s);

  GaussianRescaleReport rep;
  for (Eigen::Index i = 0; i < approx.order(); ++i) {
    for (Eigen::Index j = i + 1; j < approx.order(); ++j) {
      rep.max_entry_dev =
          std::max(rep.max_entry_dev, std::abs(approx(i, j) - factor * pure(i, j)));
    }
  }

  const SymMatrix observed = kernel_matrix(ds, kern).matrix;
  const SpectralSummary so = eigh(observed);
  const SpectralSummary sp = eigh(pure);
  rep.eigvec_alignment = std::abs(so.eigenvectors.col(0).dot(sp.eigenvectors.col(0)));
  return rep;
}

SymMatrix elliptical_dmd_matrix(const DataSet& ds, double s) {
  if (!(s > 0.0)) throw ConfigError("elliptical_dmd_matrix: s must be > 0");
  const SymMatrix pure = pure_signal_matrix(ds, KernelSpec::gaussian(s)).matrix;
  const Eigen::Index n = pure.order();
  Eigen::VectorXd d(n);
  for (Eigen::Index i = 0; i < n; ++i) d(i) = std::exp(-s * ds.nu * ds.R(i) * ds.R(i));
  SymMatrix out(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i; j < n; ++j) {
      out.set(i, j, d(i) * pure(i, j) * d(j));
    }
  }
  return out;
}

UnderestimationReport eigenvalue_underestimation_check(const DataSet& ds, double s,
                                                       double separation_frac) {
  if (!(s > 0.0)) throw ConfigError("eigenvalue_underestimation_check: s must be > 0");
  require_spherical(ds, "eigenvalue_underestimation_check");

  const KernelSpec kern = KernelSpec::gaussian(s);
  const SymMatrix pure = pure_signal_matrix(ds, kern).matrix;
  const SymMatrix approx = approx_matrix_spherical(ds, kern);
  const SpectralSummary sp = eigh(pure);
  const SpectralSummary sa = eigh(approx);

  const Eigen::Index n = pure.order();
  const double factor = std::exp(-2.0 * ds.nu * s);
  UnderestimationReport rep;
  rep.diag_correction_bound = std::abs(factor - 1.0) / static_cast<double>(n);

  const double head = std::abs(sp.eigenvalues(0));
  const double threshold = separation_frac * head;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!(sp.eigenvalues(i) > 0.0)) continue;
    const double gap_above = i == 0 ? std::numeric_limits<double>::infinity() : sp.gaps(i - 1);
    const double gap_below = i + 1 < n ? sp.gaps(i) : std::numeric_limits<double>::infinity();
    EigenvalueUnderestimation item;
    item.index = static_cast<int>(i);
    item.lambda_pure = sp.eigenvalues(i);
    item.lambda_approx = sa.eigenvalues(i);
    item.separated = threshold > 0.0 && std::min(gap_above, gap_below) >= threshold;
    item.underestimated = sa.eigenvalues(i) <= sp.eigenvalues(i) + 1e-12;
    item.within_diag_bound =
        std::abs(sa.eigenvalues(i) - factor * sp.eigenvalues(i)) <=
        rep.diag_correction_bound + 1e-10;
    rep.per_index.push_back(item);
  }
  return rep;
}

}  // namespace infnoise
