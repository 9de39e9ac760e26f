#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "infnoise/config_io.hpp"
#include "infnoise/errors.hpp"
#include "infnoise/experiment.hpp"

using namespace infnoise;

namespace {

ExperimentConfig small_config() {
  ExperimentConfig cfg;
  cfg.name = "small";
  cfg.signal.family = SignalFamily::CircleEmbed;
  cfg.noise.family = NoiseFamily::GaussianLike;
  cfg.radii = RadiusModel{};
  cfg.kernel = KernelSpec::gaussian(1.0);
  cfg.grid = {{12, 60}, {12, 120}};
  cfg.replications = 3;
  cfg.base_seed = 2024;
  cfg.checks = {CheckKind::FrobeniusGap, CheckKind::OperatorGap, CheckKind::Weyl,
                CheckKind::Interpoint,   CheckKind::DotProduct,  CheckKind::SubspaceAngles,
                CheckKind::Laplacian,    CheckKind::Centering,   CheckKind::GaussianRescale};
  return cfg;
}

const char* kSampleConfigJson = R"json({
  "name": "sample",
  "signal": {"family": "circle_embed", "scale": 1.0},
  "noise": {"family": "gaussian_like", "sigma": {"kind": "identity"}},
  "radii": {"family": "constant_one"},
  "kernel": {"family": "euclidean_distance", "func": {"kind": "gaussian", "s": 1.0}},
  "grid": [[10, 50]],
  "replications": 2,
  "base_seed": 7,
  "checks": ["frobenius_gap", "weyl", "interpoint"],
  "output": {"path": "sample.csv", "format": "csv"}
})json";

}  // namespace

TEST_SUITE("harness") {

TEST_CASE("zero-noise degenerate run has exactly zero gap") {
  ExperimentConfig cfg;
  cfg.signal.family = SignalFamily::CircleEmbed;
  cfg.noise.family = NoiseFamily::GaussianLike;
  cfg.noise.sigma_scale = 0.0;
  cfg.kernel = KernelSpec::gaussian(1.0);
  cfg.grid = {{10, 50}};
  cfg.replications = 1;
  cfg.checks = {CheckKind::FrobeniusGap, CheckKind::Weyl};
  const ExperimentResult res = run_experiment(cfg);
  REQUIRE(res.records.size() == 1);
  CHECK(res.records[0].frob_gap_sq == 0.0);
  CHECK(res.records[0].weyl_ok);
}

TEST_CASE("identical config and seed give byte-identical CSV, any thread count") {
  const ExperimentConfig cfg = small_config();
  const ExperimentResult a = run_experiment(cfg, 1);
  const ExperimentResult b = run_experiment(cfg, 1);
  const ExperimentResult c = run_experiment(cfg, 4);
  CHECK(records_to_csv(a.records) == records_to_csv(b.records));
  CHECK(records_to_csv(a.records) == records_to_csv(c.records));
  CHECK(report_to_json(a.records, a.aggregate) == report_to_json(c.records, c.aggregate));
}

TEST_CASE("trial seeds are a frozen function of (base, grid, replication)") {
  const std::uint64_t s = trial_seed(42, 1, 3);
  CHECK(s == trial_seed(42, 1, 3));
  CHECK(s != trial_seed(42, 1, 4));
  CHECK(s != trial_seed(42, 2, 3));
  CHECK(s != trial_seed(43, 1, 3));
  // Frozen value: the on-disk seed column must never silently change.
  CHECK(trial_seed(0, 0, 0) == 10157141306771104351ULL);
}

TEST_CASE("fit_constant recovers exact linear data") {
  std::vector<TrialRecord> records;
  int rep = 0;
  for (double bracket : {1e-3, 2e-3, 3e-3, 4e-3}) {
    TrialRecord r;
    r.n = 10;
    r.p = 100 + rep;
    r.replication = 0;
    r.bracket_B = bracket;
    r.frob_gap_sq = 2.0 * bracket;
    records.push_back(r);
    ++rep;
  }
  const FitResult fit = fit_constant(records);
  CHECK(fit.C_hat == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(fit.r_squared == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("fit_constant rejects degenerate designs") {
  std::vector<TrialRecord> one;
  TrialRecord r;
  r.n = 10;
  r.p = 100;
  r.bracket_B = 1.0;
  r.frob_gap_sq = 2.0;
  one.push_back(r);
  CHECK_THROWS_AS(fit_constant(one), ConfigError);

  std::vector<TrialRecord> equal;
  for (int k = 0; k < 3; ++k) {
    TrialRecord e;
    e.n = 10;
    e.p = 100 + k;
    e.bracket_B = 1.0;
    e.frob_gap_sq = 2.0;
    equal.push_back(e);
  }
  CHECK_THROWS_AS(fit_constant(equal), ConfigError);
}

TEST_CASE("csv emission: exact header, one line per record") {
  TrialRecord r;
  r.n = 5;
  r.p = 7;
  r.replication = 0;
  r.seed = 11;
  r.frob_gap_sq = 0.25;
  const std::string csv = records_to_csv({r});
  std::istringstream in(csv);
  std::string header, row, extra;
  std::getline(in, header);
  std::getline(in, row);
  CHECK_FALSE(std::getline(in, extra));
  CHECK(header ==
        "n,p,replication,seed,frob_gap_sq,op_gap,max_interpoint_dev,max_dotproduct_dev,"
        "bracket_B,top_angle_k1,top_angle_k2,weyl_ok,out_of_domain_count,wall_time_ms");
  CHECK(row.rfind("5,7,0,11,0.25,", 0) == 0);
}

TEST_CASE("json report round-trips records field for field") {
  const ExperimentConfig cfg = small_config();
  const ExperimentResult res = run_experiment(cfg, 2);
  const std::string text = report_to_json(res.records, res.aggregate);
  const std::vector<TrialRecord> parsed = parse_records_json(text);
  REQUIRE(parsed.size() == res.records.size());
  for (std::size_t i = 0; i < parsed.size(); ++i) {
    const TrialRecord& a = res.records[i];
    const TrialRecord& b = parsed[i];
    CHECK(a.n == b.n);
    CHECK(a.p == b.p);
    CHECK(a.replication == b.replication);
    CHECK(a.seed == b.seed);
    CHECK(a.frob_gap_sq == b.frob_gap_sq);
    CHECK(a.op_gap == b.op_gap);
    CHECK(a.max_interpoint_dev == b.max_interpoint_dev);
    CHECK(a.max_dotproduct_dev == b.max_dotproduct_dev);
    CHECK(a.bracket_B == b.bracket_B);
    CHECK(a.top_angle_k1 == b.top_angle_k1);
    CHECK(a.top_angle_k2 == b.top_angle_k2);
    CHECK(a.weyl_ok == b.weyl_ok);
    CHECK(a.out_of_domain_count == b.out_of_domain_count);
    CHECK(b.wall_time_ms == 0.0);  // timing never enters the artifact
  }
}

TEST_CASE("emission refuses non-finite records") {
  TrialRecord r;
  r.op_gap = std::nan("");
  CHECK_THROWS_AS(records_to_csv({r}), PropertyViolation);
  AggregateReport agg;
  CHECK_THROWS_AS(report_to_json({r}, agg), PropertyViolation);
}

TEST_CASE("config file parsing") {
  const ExperimentConfig cfg = parse_experiment_config(kSampleConfigJson);
  CHECK(cfg.name == "sample");
  CHECK(cfg.grid.size() == 1);
  CHECK(cfg.grid[0].first == 10);
  CHECK(cfg.grid[0].second == 50);
  CHECK(cfg.replications == 2);
  CHECK(cfg.base_seed == 7);
  CHECK(cfg.checks.count(CheckKind::FrobeniusGap) == 1);
  CHECK(cfg.checks.count(CheckKind::Weyl) == 1);
  CHECK(cfg.checks.count(CheckKind::Interpoint) == 1);
  CHECK(cfg.checks.size() == 3);
  CHECK(cfg.format == OutputFormat::Csv);

  const ExperimentResult res = run_experiment(cfg);
  CHECK(res.records.size() == 2);
}

TEST_CASE("config round trip through JSON") {
  const ExperimentConfig cfg = small_config();
  const ExperimentConfig back = parse_experiment_config(experiment_config_to_json(cfg));
  CHECK(back.name == cfg.name);
  CHECK(back.grid == cfg.grid);
  CHECK(back.base_seed == cfg.base_seed);
  CHECK(back.checks == cfg.checks);
  CHECK(back.replications == cfg.replications);
  // Same kernel: identical matrices from identical data.
  const ExperimentResult a = run_experiment(cfg);
  const ExperimentResult b = run_experiment(back);
  CHECK(records_to_csv(a.records) == records_to_csv(b.records));
}

TEST_CASE("unknown config keys are fatal") {
  CHECK_THROWS_WITH_AS(
      parse_experiment_config(R"({"name": "x", "grid": [[4, 8]], "mystery": 1})"),
      doctest::Contains("mystery"), ConfigError);
  CHECK_THROWS_AS(parse_experiment_config(R"({"grid": "oops"})"), ConfigError);
  CHECK_THROWS_WITH_AS(
      parse_experiment_config(
          R"({"signal": {"family": "circle_embed"},
              "noise": {"family": "gaussian_like"},
              "kernel": {"func": {"kind": "gaussian", "s": 1.0}},
              "grid": [[10, 50]],
              "checks": ["not_a_check"]})"),
      doctest::Contains("not_a_check"), ConfigError);
}

TEST_CASE("trial errors carry grid-point context") {
  ExperimentConfig cfg;
  cfg.signal.family = SignalFamily::FixedCloud;
  Eigen::MatrixXd pts = Eigen::MatrixXd::Zero(2, 30);
  pts(0, 0) = 1.0;
  pts(1, 0) = -1.0;
  cfg.signal.points = pts;
  cfg.signal.ambient_dim = 30;
  cfg.noise.family = NoiseFamily::GaussianLike;
  cfg.kernel = KernelSpec::gaussian(1.0);
  cfg.grid = {{10, 50}};  // mismatched with the 30-column cloud
  cfg.checks = {CheckKind::FrobeniusGap};
  CHECK_THROWS_WITH_AS(run_experiment(cfg), doctest::Contains("grid point"), ConfigError);
}

TEST_CASE("desk-scale guardrail") {
  ExperimentConfig cfg = small_config();
  cfg.checks = {CheckKind::FrobeniusGap};
  cfg.grid = {{10, 9000}};
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg.allow_large = true;
  CHECK_NOTHROW(cfg.validate());
  cfg.allow_large = false;
  cfg.grid = {{600, 100}};
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
}

TEST_CASE("gaussian_rescale check is rejected for incompatible configs") {
  ExperimentConfig cfg = small_config();
  cfg.radii.family = RadiusFamily::TwoPoint;
  cfg.radii.r_inf = 0.6;
  cfg.radii.r_sup = 1.4;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);

  ExperimentConfig cfg2 = small_config();
  cfg2.kernel = KernelSpec::affine(1.0, 0.0);
  CHECK_THROWS_AS(cfg2.validate(), ConfigError);
}

TEST_CASE("emit_report writes csv plus aggregate sidecar") {
  const ExperimentConfig cfg = small_config();
  const ExperimentResult res = run_experiment(cfg);
  const std::string dir = std::filesystem::temp_directory_path() / "infnoise_test_out";
  std::filesystem::create_directories(dir);
  const std::string csv_path = dir + "/trials.csv";
  emit_report(res.records, res.aggregate, OutputFormat::Csv, csv_path);
  CHECK(std::filesystem::exists(csv_path));
  CHECK(std::filesystem::exists(csv_path + ".aggregate.json"));

  const std::string json_path = dir + "/trials.json";
  emit_report(res.records, res.aggregate, OutputFormat::Json, json_path);
  std::ifstream in(json_path);
  std::stringstream ss;
  ss << in.rdbuf();
  const std::vector<TrialRecord> parsed = parse_records_json(ss.str());
  CHECK(parsed.size() == res.records.size());
  std::filesystem::remove_all(dir);
}

TEST_CASE("dataset files: model form and raw form") {
  const SpectraInput from_models = parse_dataset_file(R"({
    "signal": {"family": "circle_embed", "scale": 1.0},
    "noise": {"family": "sphere_uniform"},
    "radii": {"family": "constant_one"},
    "kernel": {"family": "euclidean_distance", "func": {"kind": "gaussian", "s": 0.5}},
    "n": 6,
    "p": 30,
    "seed": 99
  })");
  CHECK(from_models.dataset.n == 6);
  CHECK(from_models.dataset.nu == 1.0);
  from_models.dataset.validate();

  const SpectraInput raw = parse_dataset_file(R"({
    "Y": [[0.0, 0.0], [1.0, 0.0]],
    "Z": [[0.0, 0.0], [0.0, 0.0]],
    "R": [1.0, 1.0],
    "nu": 0.0,
    "kernel": {"family": "euclidean_distance", "func": {"kind": "affine", "a": 1.0, "b": 0.0}}
  })");
  CHECK(raw.dataset.n == 2);
  CHECK(raw.dataset.X == raw.dataset.Y);

  CHECK_THROWS_AS(parse_dataset_file(R"({
    "Y": [[0.0, 0.0]],
    "Z": [[1.0, 1.0]],
    "R": [1.0],
    "nu": 0.0,
    "X": [[5.0, 5.0]],
    "kernel": {"func": {"kind": "gaussian", "s": 1.0}}
  })"),
                  ConfigError);
}

TEST_CASE("kernel specs round-trip through JSON") {
  const KernelSpec shifted = shift_kernel(
      KernelSpec::gaussian(0.7, KernelFamily::EuclideanDistance, Interval{0.0, 12.0}), 0.9);
  const KernelSpec back = parse_kernel_json(kernel_to_json(shifted));
  CHECK(back.family() == shifted.family());
  CHECK(back.shift() == shifted.shift());
  CHECK(back.domain()->lo == shifted.domain()->lo);
  CHECK(back.domain()->hi == shifted.domain()->hi);
  for (double x : {0.0, 0.5, 3.0, 11.0}) CHECK(back(x) == shifted(x));

  const KernelSpec table = KernelSpec::table({0.0, 2.0}, {1.0, 0.0});
  const KernelSpec table_back = parse_kernel_json(kernel_to_json(table));
  CHECK(table_back(1.0) == table(1.0));
  CHECK(table_back.lipschitz_const() == table.lipschitz_const());
}

}  // TEST_SUITE
