#include "infnoise/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "infnoise/errors.hpp"

namespace infnoise {

namespace {

double eval_func(const kernel_funcs::Any& f, double x) {
  return std::visit(
      [x](const auto& fn) -> double {
        using T = std::decay_t<decltype(fn)>;
        if constexpr (std::is_same_v<T, kernel_funcs::Gaussian>) {
          return std::exp(-fn.s * x);
        } else if constexpr (std::is_same_v<T, kernel_funcs::Exponential>) {
          return std::exp(-fn.s * std::sqrt(std::max(x, 0.0)));
        } else if constexpr (std::is_same_v<T, kernel_funcs::Affine>) {
          return fn.a * x + fn.b;
        } else {
          const auto& xs = fn.xs;
          const auto& ys = fn.ys;
          if (x <= xs.front()) return ys.front();
          if (x >= xs.back()) return ys.back();
          const auto it = std::upper_bound(xs.begin(), xs.end(), x);
          const std::size_t j = static_cast<std::size_t>(it - xs.begin());
          const double t = (x - xs[j - 1]) / (xs[j] - xs[j - 1]);
          return ys[j - 1] + t * (ys[j] - ys[j - 1]);
        }
      },
      f);
}

}  // namespace

KernelSpec KernelSpec::gaussian(double s, KernelFamily family, std::optional<Interval> domain) {
  if (!(s > 0.0)) throw ConfigError("kernel: gaussian scale s must be > 0");
  KernelSpec k;
  k.family_ = family;
  k.func_ = kernel_funcs::Gaussian{s};
  k.domain_ = domain;
  // |f'(x)| = s exp(-s x) peaks at the left end of the domain (x >= 0 when
  // no domain is declared).
  const double lo = domain.has_value() ? domain->lo : 0.0;
  k.lipschitz_ = lo < 0.0 ? s * std::exp(-s * lo) : s;
  return k;
}

KernelSpec KernelSpec::exponential(double s, Interval domain) {
  if (!(s > 0.0)) throw ConfigError("kernel: exponential scale s must be > 0");
  if (!(domain.lo > 0.0)) {
    throw ConfigError("kernel: exponential kernel requires a domain with lo > 0");
  }
  KernelSpec k;
  k.family_ = KernelFamily::EuclideanDistance;
  k.func_ = kernel_funcs::Exponential{s};
  k.domain_ = domain;
  const double lo = domain.lo;
  k.lipschitz_ = s / (2.0 * std::sqrt(lo)) * std::exp(-s * std::sqrt(lo));
  return k;
}

KernelSpec KernelSpec::affine(double a, double b, KernelFamily family,
                              std::optional<Interval> domain) {
  KernelSpec k;
  k.family_ = family;
  k.func_ = kernel_funcs::Affine{a, b};
  k.domain_ = domain;
  k.lipschitz_ = std::abs(a);
  return k;
}

KernelSpec KernelSpec::table(std::vector<double> xs, std::vector<double> ys,
                             KernelFamily family) {
  if (xs.size() < 2 || xs.size() != ys.size()) {
    throw ConfigError("kernel: table needs matching grid/values with >= 2 knots");
  }
  for (std::size_t i = 1; i < xs.size(); ++i) {
    if (!(xs[i] > xs[i - 1])) throw ConfigError("kernel: table grid must be increasing");
  }
  KernelSpec k;
  k.family_ = family;
  double worst = 0.0;
  for (std::size_t i = 1; i < xs.size(); ++i) {
    worst = std::max(worst, std::abs((ys[i] - ys[i - 1]) / (xs[i] - xs[i - 1])));
  }
  k.domain_ = Interval{xs.front(), xs.back()};
  k.func_ = kernel_funcs::Table{std::move(xs), std::move(ys)};
  k.lipschitz_ = worst;
  return k;
}

double KernelSpec::operator()(double x) const { return eval_func(func_, x + shift_); }

bool KernelSpec::in_domain(double x) const {
  if (!domain_.has_value()) return true;
  return x >= domain_->lo && x <= domain_->hi;
}

bool KernelSpec::validate_lipschitz(int grid_points) const {
  if (!domain_.has_value()) return true;
  if (grid_points < 2) throw ConfigError("kernel: validate_lipschitz needs >= 2 grid points");
  const double lo = domain_->lo;
  const double hi = domain_->hi;
  if (!(hi > lo)) return true;
  const double step = (hi - lo) / static_cast<double>(grid_points - 1);
  double prev = (*this)(lo);
  if (!std::isfinite(prev)) return false;
  double worst = 0.0;
  for (int i = 1; i < grid_points; ++i) {
    const double x = lo + step * static_cast<double>(i);
    const double cur = (*this)(x);
    if (!std::isfinite(cur)) return false;
    worst = std::max(worst, std::abs(cur - prev) / step);
    prev = cur;
  }
  return worst <= 1.05 * lipschitz_;
}

KernelSpec shift_kernel(const KernelSpec& k, double nu) {
  if (!(nu >= 0.0)) throw ConfigError("shift_kernel: nu must be >= 0");
  KernelSpec out = k;
  out.shift_ = k.shift_ + 2.0 * nu;
  if (out.domain_.has_value()) {
    out.domain_ = Interval{out.domain_->lo - 2.0 * nu, out.domain_->hi - 2.0 * nu};
  }
  return out;
}

KernelSpec kernel_from_parts(KernelFamily family, kernel_funcs::Any func, double lipschitz,
                             std::optional<Interval> domain, double shift) {
  KernelSpec k;
  k.family_ = family;
  k.func_ = std::move(func);
  k.lipschitz_ = lipschitz;
  k.domain_ = domain;
  k.shift_ = shift;
  return k;
}

Eigen::MatrixXd pairwise_sq_dists(const Eigen::MatrixXd& rows) {
  const Eigen::Index n = rows.rows();
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double v = (rows.row(i) - rows.row(j)).squaredNorm();
      d(i, j) = v;
      d(j, i) = v;
    }
  }
  return d;
}

namespace {

// Shared builder for the Euclidean-distance family: entry (i,j) is
// f(dist_sq(i,j) + shift(i,j)) / n off-diagonal. Counting of out-of-domain
// arguments is per unordered pair.
template <typename ShiftFn>
KernelMatrixResult build_distance_matrix(const Eigen::MatrixXd& cloud, const KernelSpec& k,
                                         double diag_arg, ShiftFn&& shift) {
  const Eigen::Index n = cloud.rows();
  const double inv_n = 1.0 / static_cast<double>(n);
  KernelMatrixResult out{SymMatrix(n), 0};
  const Eigen::MatrixXd d = pairwise_sq_dists(cloud);
  const double diag_value = k(diag_arg) * inv_n;
  for (Eigen::Index i = 0; i < n; ++i) {
    out.matrix.set(i, i, diag_value);
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double arg = d(i, j) + shift(i, j);
      if (!k.in_domain(arg)) ++out.out_of_domain;
      out.matrix.set(i, j, k(arg) * inv_n);
    }
  }
  return out;
}

KernelMatrixResult build_dot_matrix(const Eigen::MatrixXd& cloud, const KernelSpec& k) {
  const Eigen::Index n = cloud.rows();
  const double inv_n = 1.0 / static_cast<double>(n);
  KernelMatrixResult out{SymMatrix(n), 0};
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i; j < n; ++j) {
      const double arg = cloud.row(i).dot(cloud.row(j));
      if (!k.in_domain(arg)) ++out.out_of_domain;
      out.matrix.set(i, j, k(arg) * inv_n);
    }
  }
  return out;
}

KernelMatrixResult build_from_cloud(const Eigen::MatrixXd& cloud, const KernelSpec& k) {
  if (k.family() == KernelFamily::EuclideanDistance) {
    return build_distance_matrix(cloud, k, 0.0, [](Eigen::Index, Eigen::Index) { return 0.0; });
  }
  return build_dot_matrix(cloud, k);
}

}  // namespace

KernelMatrixResult kernel_matrix(const DataSet& ds, const KernelSpec& k) {
  return build_from_cloud(ds.X, k);
}

KernelMatrixResult pure_signal_matrix(const DataSet& ds, const KernelSpec& k) {
  return build_from_cloud(ds.Y, k);
}

SymMatrix approx_matrix_spherical(const DataSet& ds, const KernelSpec& k,
                                  ApproxDiagonal diag) {
  if (k.family() != KernelFamily::EuclideanDistance) {
    throw ConfigError("approx_matrix_spherical: kernel family must be euclidean_distance");
  }
  const double two_nu = 2.0 * ds.nu;
  const double diag_arg = diag == ApproxDiagonal::FZero ? 0.0 : two_nu;
  return build_distance_matrix(ds.Y, k, diag_arg,
                               [two_nu](Eigen::Index, Eigen::Index) { return two_nu; })
      .matrix;
}

SymMatrix approx_matrix_elliptical(const DataSet& ds, const KernelSpec& k,
                                   ApproxDiagonal diag) {
  if (k.family() != KernelFamily::EuclideanDistance) {
    throw ConfigError("approx_matrix_elliptical: kernel family must be euclidean_distance");
  }
  const double nu = ds.nu;
  const Eigen::VectorXd& r = ds.R;
  const double diag_arg = diag == ApproxDiagonal::FZero ? 0.0 : 2.0 * nu;
  return build_distance_matrix(
             ds.Y, k, diag_arg,
             [nu, &r](Eigen::Index i, Eigen::Index j) {
               return nu * (r(i) * r(i) + r(j) * r(j));
             })
      .matrix;
}

SymMatrix approx_matrix_dotproduct(const DataSet& ds, const KernelSpec& k) {
  if (k.family() != KernelFamily::DotProduct) {
    throw ConfigError("approx_matrix_dotproduct: kernel family must be dot_product");
  }
  const Eigen::Index n = ds.Y.rows();
  const double inv_n = 1.0 / static_cast<double>(n);
  SymMatrix out(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double diag_arg = ds.Y.row(i).squaredNorm() + ds.nu * ds.R(i) * ds.R(i);
    out.set(i, i, k(diag_arg) * inv_n);
    for (Eigen::Index j = i + 1; j < n; ++j) {
      out.set(i, j, k(ds.Y.row(i).dot(ds.Y.row(j))) * inv_n);
    }
  }
  return out;
}

std::optional<Interval> concentration_interval(const DataSet& ds, KernelFamily family,
                                         double eta) {
  if (!(eta > 0.0)) throw ConfigError("concentration_interval: eta must be > 0");
  if (family == KernelFamily::EuclideanDistance) {
    if (!ds.diameter_sq_bound.has_value()) return std::nullopt;
    const double lo = 2.0 * ds.nu * ds.r_inf * ds.r_inf - eta;
    const double hi = *ds.diameter_sq_bound + 2.0 * ds.nu * ds.r_sup * ds.r_sup + eta;
    return Interval{lo, hi};
  }
  if (!ds.dot_bound.has_value()) return std::nullopt;
  const double reach = *ds.dot_bound + eta + ds.r_sup * ds.r_sup * ds.nu;
  return Interval{-reach, reach};
}

KernelSpec with_concentration_interval(const KernelSpec& k, const DataSet& ds, double eta) {
  if (k.domain().has_value()) return k;
  const std::optional<Interval> domain = concentration_interval(ds, k.family(), eta);
  if (!domain.has_value()) return k;
  return kernel_from_parts(k.family(), k.func(), k.lipschitz_const(), domain, k.shift());
}

SymMatrix laplacian(const SymMatrix& m) {
  const Eigen::Index n = m.order();
  SymMatrix out(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    double row_sum = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (j == i) continue;
      row_sum += m(i, j);
      if (j > i) out.set(i, j, -m(i, j));
    }
    out.set(i, i, row_sum);
  }
  return out;
}

SymMatrix normalized_laplacian(const SymMatrix& m) {
  const SymMatrix lap = laplacian(m);
  const Eigen::Index n = lap.order();
  Eigen::VectorXd inv_sqrt(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!(lap(i, i) > 0.0)) {
      throw ConfigError("normalized_laplacian: Laplacian diagonal entry " +
                        std::to_string(i) + " is " + std::to_string(lap(i, i)) +
                        "; must be > 0");
    }
    inv_sqrt(i) = 1.0 / std::sqrt(lap(i, i));
  }
  SymMatrix out(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    out.set(i, i, 1.0);
    for (Eigen::Index j = i + 1; j < n; ++j) {
      out.set(i, j, lap(i, j) * inv_sqrt(i) * inv_sqrt(j));
    }
  }
  return out;
}

}  // namespace infnoise
