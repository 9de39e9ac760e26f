#include "infnoise/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <map>
#include <mutex>
#include <set>
#include <string>
#include <thread>

#include <nlohmann/json.hpp>

#include "infnoise/errors.hpp"
#include "infnoise/oracle.hpp"
#include "infnoise/rng.hpp"
#include "infnoise/spectral.hpp"

namespace infnoise {

namespace {

using nlohmann::json;

constexpr const char* kCheckNames[] = {
    "frobenius_gap", "operator_gap",     "weyl",      "interpoint", "dotproduct",
    "gaussian_rescale", "laplacian",     "centering", "subspace_angles",
};

// 17 significant digits: round-trip exact for IEEE doubles.
std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

struct TrialExtras {
  double rescale_alignment = 0.0;
  bool rescale_identity_ok = true;
  bool has_rescale = false;
};

}  // namespace

std::string check_name(CheckKind kind) {
  return kCheckNames[static_cast<int>(kind)];
}

CheckKind check_from_name(const std::string& name) {
  for (int i = 0; i < 9; ++i) {
    if (name == kCheckNames[i]) return static_cast<CheckKind>(i);
  }
  throw ConfigError("checks: unknown check name '" + name + "'");
}

void ExperimentConfig::validate() const {
  if (grid.empty()) throw ConfigError("grid: must be nonempty");
  if (replications < 1) throw ConfigError("replications: must be >= 1");
  for (const auto& [n, p] : grid) {
    if (n < 2) throw ConfigError("grid: n must be >= 2, got " + std::to_string(n));
    if (p < 1) throw ConfigError("grid: p must be >= 1, got " + std::to_string(p));
    if (!allow_large && (p > 8000 || n > 500)) {
      throw ConfigError("grid: desk-scale guardrail p <= 8000, n <= 500 exceeded at (" +
                        std::to_string(n) + "," + std::to_string(p) +
                        "); set allow_large to override");
    }
  }
  if (!(eta > 0.0)) throw ConfigError("eta: must be > 0");
  if (subspace_k1 < 1 || subspace_k2 < subspace_k1) {
    throw ConfigError("subspace ks: need 1 <= k1 <= k2");
  }
  signal.validate();
  noise.validate();
  radii.validate();
  if (!kernel.validate_lipschitz()) {
    throw ConfigError("kernel: declared lipschitz_const fails the sampled-slope "
                      "validation over the declared domain");
  }
  if (checks.count(CheckKind::GaussianRescale)) {
    if (!radii.is_spherical()) {
      throw ConfigError("checks: gaussian_rescale requires constant_one radii");
    }
    if (!std::holds_alternative<kernel_funcs::Gaussian>(kernel.func())) {
      throw ConfigError("checks: gaussian_rescale requires the gaussian kernel");
    }
  }
}

std::uint64_t trial_seed(std::uint64_t base_seed, std::size_t grid_index,
                         std::size_t replication) {
  return derive_seed(derive_seed(base_seed, grid_index), replication);
}

namespace {

TrialRecord run_trial(const ExperimentConfig& cfg, std::size_t grid_index,
                      std::size_t replication, TrialExtras& extras) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto [n, p] = cfg.grid[grid_index];

  TrialRecord rec;
  rec.n = n;
  rec.p = p;
  rec.replication = static_cast<int>(replication);
  rec.seed = trial_seed(cfg.base_seed, grid_index, replication);

  const DataSet ds =
      assemble_dataset(cfg.signal.with_ambient(p), cfg.noise.with_dimension(p),
                       cfg.radii, n, rec.seed);

  // Out-of-domain counting uses the declared domain, or I_p(eta)/J_p(eta)
  // derived from the models when none was declared.
  const KernelSpec counting_kernel = with_concentration_interval(cfg.kernel, ds, cfg.eta);
  const KernelMatrixResult observed = kernel_matrix(ds, counting_kernel);
  rec.out_of_domain_count = observed.out_of_domain;
  const SymMatrix approx = cfg.kernel.family() == KernelFamily::EuclideanDistance
                               ? approx_matrix_elliptical(ds, cfg.kernel)
                               : approx_matrix_dotproduct(ds, cfg.kernel);
  const SymMatrix diff = observed.matrix - approx;

  const bool need_op = cfg.checks.count(CheckKind::OperatorGap) ||
                       cfg.checks.count(CheckKind::Weyl) ||
                       cfg.checks.count(CheckKind::Centering);

  if (cfg.checks.count(CheckKind::FrobeniusGap)) {
    const double f = frobenius_norm(diff);
    rec.frob_gap_sq = f * f;
  }
  if (need_op) {
    rec.op_gap = operator_norm(diff);
  }
  if (cfg.checks.count(CheckKind::Weyl) || cfg.checks.count(CheckKind::SubspaceAngles)) {
    const SpectralGapReport rep = compare_spectra(
        observed.matrix, approx, {cfg.subspace_k1, cfg.subspace_k2}, cfg.separation_frac);
    // compare_spectra throws on Weyl violation; reaching here means ok.
    rec.weyl_ok = true;
    if (cfg.checks.count(CheckKind::SubspaceAngles)) {
      rec.top_angle_k1 = rep.top_k_angles[0].top_angle();
      rec.top_angle_k2 = rep.top_k_angles[1].top_angle();
    }
  }
  if (cfg.checks.count(CheckKind::Interpoint) || cfg.checks.count(CheckKind::DotProduct)) {
    const InterpointDev dev = max_interpoint_dev(ds);
    if (cfg.checks.count(CheckKind::Interpoint)) rec.max_interpoint_dev = dev.distance_form;
    if (cfg.checks.count(CheckKind::DotProduct)) rec.max_dotproduct_dev = dev.dot_form;
  }
  if (ds.sigma_stats.has_value()) {
    rec.bracket_B =
        eq1_bracket(cfg.kernel.lipschitz_const(), ds.c1_bound, *ds.sigma_stats,
                    static_cast<double>(p));
  }
  if (cfg.checks.count(CheckKind::GaussianRescale)) {
    const double s = std::get<kernel_funcs::Gaussian>(cfg.kernel.func()).s;
    const GaussianRescaleReport rep = gaussian_rescale_check(ds, s);
    extras.has_rescale = true;
    extras.rescale_alignment = rep.eigvec_alignment;
    extras.rescale_identity_ok = rep.max_entry_dev <= 1e-12;
    if (!extras.rescale_identity_ok) {
      throw PropertyViolation(
          "gaussian_rescale: exact identity violated (max entry dev " +
          std::to_string(rep.max_entry_dev) + " > 1e-12) at grid index " +
          std::to_string(grid_index));
    }
  }
  if (cfg.checks.count(CheckKind::Laplacian)) {
    for (const SymMatrix* mat : {&observed.matrix, &approx}) {
      const SymMatrix lap = laplacian(*mat);
      const double residual =
          (lap.dense() * Eigen::VectorXd::Ones(lap.order())).cwiseAbs().maxCoeff();
      if (residual > 1e-12) {
        throw PropertyViolation("laplacian: L 1 != 0 (residual " +
                                std::to_string(residual) + ")");
      }
      const SymMatrix norm_lap = normalized_laplacian(*mat);
      for (Eigen::Index i = 0; i < norm_lap.order(); ++i) {
        if (norm_lap(i, i) != 1.0) {
          throw PropertyViolation("normalized_laplacian: diagonal entry " +
                                  std::to_string(i) + " is not 1");
        }
      }
    }
  }
  if (cfg.checks.count(CheckKind::Centering)) {
    const double centered = operator_norm(center_both(diff));
    if (centered > rec.op_gap + 1e-12) {
      throw PropertyViolation("centering: ||H (M - Mt) H||_op " + std::to_string(centered) +
                              " exceeds ||M - Mt||_op " + std::to_string(rec.op_gap));
    }
  }

  const auto t1 = std::chrono::steady_clock::now();
  rec.wall_time_ms =
      std::chrono::duration_cast<std::chrono::duration<double, std::milli>>(t1 - t0).count();
  return rec;
}

void require_finite(const TrialRecord& r) {
  const double fields[] = {r.frob_gap_sq,        r.op_gap,      r.max_interpoint_dev,
                           r.max_dotproduct_dev, r.bracket_B,   r.top_angle_k1,
                           r.top_angle_k2,       r.wall_time_ms};
  const char* names[] = {"frob_gap_sq",        "op_gap",      "max_interpoint_dev",
                         "max_dotproduct_dev", "bracket_B",   "top_angle_k1",
                         "top_angle_k2",       "wall_time_ms"};
  for (int i = 0; i < 8; ++i) {
    if (!std::isfinite(fields[i])) {
      throw PropertyViolation(std::string("record: non-finite field ") + names[i]);
    }
  }
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& cfg, int threads) {
  cfg.validate();
  if (threads < 1) throw ConfigError("run_experiment: threads must be >= 1");

  const std::size_t n_grid = cfg.grid.size();
  const std::size_t reps = static_cast<std::size_t>(cfg.replications);
  const std::size_t total = n_grid * reps;

  std::vector<TrialRecord> records(total);
  std::vector<TrialExtras> extras(total);

  // Independent jobs, indexed results: the fold below is ordered by job
  // index, so the outcome is identical for any thread count.
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&]() {
    for (;;) {
      const std::size_t job = next.fetch_add(1);
      if (job >= total) return;
      const std::size_t gi = job / reps;
      const std::size_t rep = job % reps;
      const std::string ctx = " [grid point (" + std::to_string(cfg.grid[gi].first) + "," +
                              std::to_string(cfg.grid[gi].second) + "), replication " +
                              std::to_string(rep) + "]";
      try {
        records[job] = run_trial(cfg, gi, rep, extras[job]);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (failure) return;
        try {
          throw;
        } catch (const ConfigError& e) {
          failure = std::make_exception_ptr(ConfigError(e.what() + ctx));
        } catch (const PropertyViolation& e) {
          failure = std::make_exception_ptr(PropertyViolation(e.what() + ctx));
        } catch (const std::exception& e) {
          failure = std::make_exception_ptr(std::runtime_error(e.what() + ctx));
        } catch (...) {
          failure = std::current_exception();
        }
        return;
      }
    }
  };
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(threads));
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);

  for (const TrialRecord& r : records) require_finite(r);

  ExperimentResult out;
  out.records = std::move(records);

  for (std::size_t gi = 0; gi < n_grid; ++gi) {
    GridAggregate agg;
    agg.n = cfg.grid[gi].first;
    agg.p = cfg.grid[gi].second;
    agg.replications = cfg.replications;
    double sum = 0.0, sum_sq = 0.0;
    for (std::size_t rep = 0; rep < reps; ++rep) {
      const std::size_t job = gi * reps + rep;
      const TrialRecord& r = out.records[job];
      sum += r.frob_gap_sq;
      sum_sq += r.frob_gap_sq * r.frob_gap_sq;
      agg.mean_op_gap += r.op_gap;
      agg.mean_interpoint += r.max_interpoint_dev;
      agg.mean_dot += r.max_dotproduct_dev;
      agg.mean_bracket += r.bracket_B;
      agg.mean_top_angle_k1 += r.top_angle_k1;
      agg.mean_top_angle_k2 += r.top_angle_k2;
      agg.out_of_domain_total += r.out_of_domain_count;
      agg.weyl_all_ok = agg.weyl_all_ok && r.weyl_ok;
      if (extras[job].has_rescale) {
        agg.mean_rescale_alignment += extras[job].rescale_alignment;
        agg.rescale_identity_all_ok =
            agg.rescale_identity_all_ok && extras[job].rescale_identity_ok;
      }
    }
    const double m = static_cast<double>(reps);
    agg.mean_frob_gap_sq = sum / m;
    const double var = reps > 1 ? std::max(0.0, (sum_sq - sum * sum / m) / (m - 1.0)) : 0.0;
    agg.se_frob_gap_sq = reps > 1 ? std::sqrt(var / m) : 0.0;
    agg.mean_op_gap /= m;
    agg.mean_interpoint /= m;
    agg.mean_dot /= m;
    agg.mean_bracket /= m;
    agg.mean_top_angle_k1 /= m;
    agg.mean_top_angle_k2 /= m;
    agg.mean_rescale_alignment /= m;
    out.aggregate.per_grid.push_back(agg);
  }

  // Trend policy along fixed-n sweeps (frobenius check only): a soft
  // increase in p is flagged; increases beyond 2 SE at every consecutive
  // pair abort the run.
  if (cfg.checks.count(CheckKind::FrobeniusGap)) {
    std::set<int> seen_n;
    for (const GridAggregate& anchor : out.aggregate.per_grid) {
      if (!seen_n.insert(anchor.n).second) continue;
      std::vector<const GridAggregate*> sweep;
      for (const GridAggregate& g : out.aggregate.per_grid) {
        if (g.n == anchor.n) sweep.push_back(&g);
      }
      if (sweep.size() < 2) continue;
      std::sort(sweep.begin(), sweep.end(),
                [](const GridAggregate* x, const GridAggregate* y) { return x->p < y->p; });
      bool any_soft = false;
      bool all_hard = true;
      for (std::size_t i = 0; i + 1 < sweep.size(); ++i) {
        const double lhs = sweep[i + 1]->mean_frob_gap_sq;
        const double rhs = sweep[i]->mean_frob_gap_sq;
        const double se = std::sqrt(sweep[i]->se_frob_gap_sq * sweep[i]->se_frob_gap_sq +
                                    sweep[i + 1]->se_frob_gap_sq * sweep[i + 1]->se_frob_gap_sq);
        if (lhs > rhs) any_soft = true;
        if (!(lhs > rhs + 2.0 * se)) all_hard = false;
      }
      if (any_soft) out.aggregate.trend_flagged = true;
      if (all_hard) {
        throw PropertyViolation(
            "aggregate: mean frob_gap_sq increases in p beyond 2 SE at every "
            "consecutive pair of the fixed-n sweep (n = " +
            std::to_string(anchor.n) + ")");
      }
    }
  }

  // The fit needs >= 3 distinct positive brackets; skip silently otherwise.
  try {
    out.aggregate.fit = fit_constant(out.records);
  } catch (const ConfigError&) {
    out.aggregate.fit = std::nullopt;
  }
  return out;
}

FitResult fit_constant(const std::vector<TrialRecord>& records) {
  if (records.empty()) throw ConfigError("fit_constant: no records");

  struct Key {
    int n, p;
    bool operator<(const Key& o) const { return n != o.n ? n < o.n : p < o.p; }
  };
  std::map<Key, std::pair<double, double>> sums;  // key -> (sum gap, sum bracket)
  std::map<Key, int> counts;
  for (const TrialRecord& r : records) {
    const Key k{r.n, r.p};
    sums[k].first += r.frob_gap_sq;
    sums[k].second += r.bracket_B;
    counts[k] += 1;
  }

  std::vector<std::pair<double, double>> points;  // (bracket mean, gap mean)
  for (const auto& [key, s] : sums) {
    const double m = static_cast<double>(counts[key]);
    const double bracket = s.second / m;
    if (bracket > 0.0) points.emplace_back(bracket, s.first / m);
  }
  if (points.size() < 3) {
    throw ConfigError("fit_constant: need >= 3 distinct grid points with positive bracket_B");
  }
  double lo = points[0].first, hi = points[0].first;
  for (const auto& [b, g] : points) {
    lo = std::min(lo, b);
    hi = std::max(hi, b);
  }
  if (lo == hi) throw ConfigError("fit_constant: degenerate design (all brackets equal)");

  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (const auto& [b, g] : points) {
    sxy += b * g;
    sxx += b * b;
    syy += g * g;
  }
  FitResult fit;
  fit.C_hat = sxy / sxx;
  fit.r_squared = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  return fit;
}

std::string records_to_csv(const std::vector<TrialRecord>& records) {
  for (const TrialRecord& r : records) require_finite(r);
  std::string out =
      "n,p,replication,seed,frob_gap_sq,op_gap,max_interpoint_dev,max_dotproduct_dev,"
      "bracket_B,top_angle_k1,top_angle_k2,weyl_ok,out_of_domain_count,wall_time_ms\n";
  for (const TrialRecord& r : records) {
    out += std::to_string(r.n) + ',' + std::to_string(r.p) + ',' +
           std::to_string(r.replication) + ',' + std::to_string(r.seed) + ',' +
           format_double(r.frob_gap_sq) + ',' + format_double(r.op_gap) + ',' +
           format_double(r.max_interpoint_dev) + ',' + format_double(r.max_dotproduct_dev) +
           ',' + format_double(r.bracket_B) + ',' + format_double(r.top_angle_k1) + ',' +
           format_double(r.top_angle_k2) + ',' + (r.weyl_ok ? "1" : "0") + ',' +
           std::to_string(r.out_of_domain_count) + ',' + format_double(0.0) + '\n';
  }
  return out;
}

namespace {

json record_to_json(const TrialRecord& r) {
  return json{{"n", r.n},
              {"p", r.p},
              {"replication", r.replication},
              {"seed", r.seed},
              {"frob_gap_sq", r.frob_gap_sq},
              {"op_gap", r.op_gap},
              {"max_interpoint_dev", r.max_interpoint_dev},
              {"max_dotproduct_dev", r.max_dotproduct_dev},
              {"bracket_B", r.bracket_B},
              {"top_angle_k1", r.top_angle_k1},
              {"top_angle_k2", r.top_angle_k2},
              {"weyl_ok", r.weyl_ok},
              {"out_of_domain_count", r.out_of_domain_count},
              {"wall_time_ms", 0.0}};
}

json aggregate_json(const AggregateReport& aggregate) {
  json grids = json::array();
  for (const GridAggregate& g : aggregate.per_grid) {
    grids.push_back(json{{"n", g.n},
                         {"p", g.p},
                         {"replications", g.replications},
                         {"mean_frob_gap_sq", g.mean_frob_gap_sq},
                         {"se_frob_gap_sq", g.se_frob_gap_sq},
                         {"mean_op_gap", g.mean_op_gap},
                         {"mean_interpoint", g.mean_interpoint},
                         {"mean_dot", g.mean_dot},
                         {"mean_bracket", g.mean_bracket},
                         {"mean_top_angle_k1", g.mean_top_angle_k1},
                         {"mean_top_angle_k2", g.mean_top_angle_k2},
                         {"mean_rescale_alignment", g.mean_rescale_alignment},
                         {"out_of_domain_total", g.out_of_domain_total},
                         {"weyl_all_ok", g.weyl_all_ok},
                         {"rescale_identity_all_ok", g.rescale_identity_all_ok}});
  }
  json out{{"per_grid", grids}, {"trend_flagged", aggregate.trend_flagged}};
  if (aggregate.fit.has_value()) {
    out["fit"] = json{{"C_hat", aggregate.fit->C_hat},
                      {"r_squared", aggregate.fit->r_squared}};
  }
  return out;
}

}  // namespace

std::string report_to_json(const std::vector<TrialRecord>& records,
                           const AggregateReport& aggregate) {
  for (const TrialRecord& r : records) require_finite(r);
  json recs = json::array();
  for (const TrialRecord& r : records) recs.push_back(record_to_json(r));
  const json out{{"records", recs}, {"aggregate", aggregate_json(aggregate)}};
  return out.dump(2) + "\n";
}

std::string aggregate_to_json(const AggregateReport& aggregate) {
  return aggregate_json(aggregate).dump(2) + "\n";
}

void emit_report(const std::vector<TrialRecord>& records, const AggregateReport& aggregate,
                 OutputFormat format, const std::string& path) {
  if (records.empty()) throw ConfigError("emit_report: no records");
  const std::string payload = format == OutputFormat::Csv
                                  ? records_to_csv(records)
                                  : report_to_json(records, aggregate);
  {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("emit_report: cannot write " + path);
    out << payload;
    if (!out) throw std::runtime_error("emit_report: write failed for " + path);
  }
  if (format == OutputFormat::Csv) {
    const std::string agg_path = path + ".aggregate.json";
    std::ofstream out(agg_path, std::ios::binary);
    if (!out) throw std::runtime_error("emit_report: cannot write " + agg_path);
    out << aggregate_to_json(aggregate);
  }
}

std::vector<TrialRecord> parse_records_json(const std::string& text) {
  const json root = json::parse(text);
  std::vector<TrialRecord> out;
  for (const json& j : root.at("records")) {
    TrialRecord r;
    r.n = j.at("n").get<int>();
    r.p = j.at("p").get<int>();
    r.replication = j.at("replication").get<int>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.frob_gap_sq = j.at("frob_gap_sq").get<double>();
    r.op_gap = j.at("op_gap").get<double>();
    r.max_interpoint_dev = j.at("max_interpoint_dev").get<double>();
    r.max_dotproduct_dev = j.at("max_dotproduct_dev").get<double>();
    r.bracket_B = j.at("bracket_B").get<double>();
    r.top_angle_k1 = j.at("top_angle_k1").get<double>();
    r.top_angle_k2 = j.at("top_angle_k2").get<double>();
    r.weyl_ok = j.at("weyl_ok").get<bool>();
    r.out_of_domain_count = j.at("out_of_domain_count").get<long>();
    r.wall_time_ms = j.at("wall_time_ms").get<double>();
    out.push_back(r);
  }
  return out;
}

}  // namespace infnoise
