#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "infnoise/kernels.hpp"
#include "infnoise/models.hpp"

namespace infnoise {

enum class CheckKind {
  FrobeniusGap,
  OperatorGap,
  Weyl,
  Interpoint,
  DotProduct,
  GaussianRescale,
  Laplacian,
  Centering,
  SubspaceAngles,
};

std::string check_name(CheckKind kind);
CheckKind check_from_name(const std::string& name);  // throws ConfigError

enum class OutputFormat { Csv, Json };

struct ExperimentConfig {
  std::string name = "experiment";
  SignalModel signal;
  NoiseModel noise;
  RadiusModel radii;
  KernelSpec kernel = KernelSpec::gaussian(1.0);
  std::vector<std::pair<int, int>> grid;  // (n, p)
  int replications = 1;
  std::uint64_t base_seed = 0;
  std::set<CheckKind> checks = {CheckKind::FrobeniusGap, CheckKind::OperatorGap,
                                CheckKind::Weyl, CheckKind::SubspaceAngles};
  std::string output_path = "trials.csv";
  OutputFormat format = OutputFormat::Csv;
  double eta = 1.0;                // domain interval padding
  double separation_frac = 0.05;   // separated-eigenvalue policy
  int subspace_k1 = 1;
  int subspace_k2 = 2;
  bool allow_large = false;        // lifts the p <= 8000, n <= 500 guardrail

  void validate() const;  // throws ConfigError
};

// One (grid point, replication) measurement. Field order here freezes the
// CSV column order; new fields may only be appended.
struct TrialRecord {
  int n = 0;
  int p = 0;
  int replication = 0;
  std::uint64_t seed = 0;
  double frob_gap_sq = 0.0;
  double op_gap = 0.0;
  double max_interpoint_dev = 0.0;
  double max_dotproduct_dev = 0.0;
  double bracket_B = 0.0;
  double top_angle_k1 = 0.0;
  double top_angle_k2 = 0.0;
  bool weyl_ok = true;
  long out_of_domain_count = 0;
  // Diagnostic only: serialized as 0 so that emitted artifacts are
  // byte-identical across reruns and thread counts.
  double wall_time_ms = 0.0;
};

struct GridAggregate {
  int n = 0;
  int p = 0;
  int replications = 0;
  double mean_frob_gap_sq = 0.0;
  double se_frob_gap_sq = 0.0;
  double mean_op_gap = 0.0;
  double mean_interpoint = 0.0;
  double mean_dot = 0.0;
  double mean_bracket = 0.0;
  double mean_top_angle_k1 = 0.0;
  double mean_top_angle_k2 = 0.0;
  double mean_rescale_alignment = 0.0;  // gaussian_rescale check only
  long out_of_domain_total = 0;
  bool weyl_all_ok = true;
  bool rescale_identity_all_ok = true;
};

struct FitResult {
  double C_hat = 0.0;
  double r_squared = 0.0;
};

struct AggregateReport {
  std::vector<GridAggregate> per_grid;
  std::optional<FitResult> fit;  // present when the design supports it
  // Mean frob_gap_sq non-increasing in p along fixed-n sweeps (up to 2 SE);
  // soft violations are flagged here, violations beyond 2 SE at every
  // consecutive pair abort the run.
  bool trend_flagged = false;
};

struct ExperimentResult {
  std::vector<TrialRecord> records;
  AggregateReport aggregate;
};

// Stable trial-seed derivation: chained derive_seed(base, grid_index) then
// (., replication). Documented so external tooling can reproduce streams.
std::uint64_t trial_seed(std::uint64_t base_seed, std::size_t grid_index,
                         std::size_t replication);

// Runs one TrialRecord per (grid point x replication). Deterministic given
// (cfg, base_seed) regardless of thread count.
ExperimentResult run_experiment(const ExperimentConfig& cfg, int threads = 1);

// Least-squares slope through the origin of per-grid mean frob_gap_sq
// against mean bracket_B. Requires >= 3 distinct grid points with positive
// brackets and a non-degenerate design.
FitResult fit_constant(const std::vector<TrialRecord>& records);

// CSV: exact TrialRecord field names in declaration order, one row per
// record, floats with 17 significant digits. Non-finite fields make the
// emission fail (PropertyViolation).
std::string records_to_csv(const std::vector<TrialRecord>& records);
std::string report_to_json(const std::vector<TrialRecord>& records,
                           const AggregateReport& aggregate);
std::string aggregate_to_json(const AggregateReport& aggregate);

// Writes the report; csv format also writes <path>.aggregate.json.
void emit_report(const std::vector<TrialRecord>& records, const AggregateReport& aggregate,
                 OutputFormat format, const std::string& path);

// Parses records back from the JSON emitted by report_to_json.
std::vector<TrialRecord> parse_records_json(const std::string& text);

}  // namespace infnoise
