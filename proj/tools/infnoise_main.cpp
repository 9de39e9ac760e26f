// Command-line harness: run / check / oracle / spectra.
//
// Exit codes: 0 success, 1 config error, 2 runtime failure,
// 3 acceptance-property violation.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "infnoise/config_io.hpp"
#include "infnoise/errors.hpp"
#include "infnoise/experiment.hpp"
#include "infnoise/oracle.hpp"
#include "infnoise/spectral.hpp"

namespace {

using infnoise::ConfigError;
using infnoise::PropertyViolation;
using nlohmann::json;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Relative output paths are resolved against INFNOISE_OUTPUT_DIR when set.
std::string resolve_output(const std::string& path) {
  const char* dir = std::getenv("INFNOISE_OUTPUT_DIR");
  if (dir == nullptr || *dir == '\0') return path;
  const std::filesystem::path p(path);
  if (p.is_absolute()) return path;
  return (std::filesystem::path(dir) / p).string();
}

// Mini-language for symmetric matrices on the command line:
// identity:N | diag:a,b,c | file:path (JSON 2d array).
infnoise::SymMatrix parse_matrix_arg(const std::string& spec) {
  const auto colon = spec.find(':');
  if (colon == std::string::npos) {
    throw ConfigError("matrix: expected identity:N, diag:a,b,... or file:path");
  }
  const std::string kind = spec.substr(0, colon);
  const std::string rest = spec.substr(colon + 1);
  if (kind == "identity") {
    return infnoise::SymMatrix::identity(std::stol(rest));
  }
  if (kind == "diag") {
    std::vector<double> vals;
    std::stringstream ss(rest);
    std::string tok;
    while (std::getline(ss, tok, ',')) vals.push_back(std::stod(tok));
    if (vals.empty()) throw ConfigError("matrix: diag needs at least one value");
    infnoise::SymMatrix m(static_cast<Eigen::Index>(vals.size()));
    for (std::size_t i = 0; i < vals.size(); ++i) {
      m.set(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i), vals[i]);
    }
    return m;
  }
  if (kind == "file") {
    const json j = json::parse(read_file(rest));
    if (!j.is_array() || j.empty() || !j[0].is_array()) {
      throw ConfigError("matrix file: expected a JSON 2d array");
    }
    const Eigen::Index n = static_cast<Eigen::Index>(j.size());
    Eigen::MatrixXd m(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      if (static_cast<Eigen::Index>(j[i].size()) != n) {
        throw ConfigError("matrix file: must be square");
      }
      for (Eigen::Index k = 0; k < n; ++k) m(i, k) = j[i][k].get<double>();
    }
    return infnoise::SymMatrix::from_upper(m);
  }
  throw ConfigError("matrix: unknown spec kind '" + kind + "'");
}

int run_command(const std::string& config_path, int threads, bool check_only) {
  const infnoise::ExperimentConfig cfg =
      infnoise::parse_experiment_config(read_file(config_path));
  if (check_only) {
    std::cout << "config ok: " << cfg.name << " (" << cfg.grid.size()
              << " grid points x " << cfg.replications << " replications)\n";
    return 0;
  }
  const infnoise::ExperimentResult result = infnoise::run_experiment(cfg, threads);
  const std::string out_path = resolve_output(cfg.output_path);
  infnoise::emit_report(result.records, result.aggregate, cfg.format, out_path);

  double total_ms = 0.0;
  for (const auto& r : result.records) total_ms += r.wall_time_ms;
  std::cerr << cfg.name << ": " << result.records.size() << " trials in " << total_ms
            << " ms\n";
  for (const auto& g : result.aggregate.per_grid) {
    std::cerr << "  (n=" << g.n << ", p=" << g.p
              << ") mean frob_gap_sq=" << g.mean_frob_gap_sq
              << " se=" << g.se_frob_gap_sq << " weyl_ok=" << (g.weyl_all_ok ? "yes" : "no")
              << "\n";
  }
  if (result.aggregate.fit.has_value()) {
    std::cerr << "  fitted C = " << result.aggregate.fit->C_hat
              << " (r^2 = " << result.aggregate.fit->r_squared << ")\n";
  }
  if (result.aggregate.trend_flagged) {
    std::cerr << "  note: frob_gap_sq trend in p not monotone (within 2 SE)\n";
  }
  std::cout << out_path << "\n";
  return 0;
}

void attach_oracle(CLI::App& app) {
  CLI::App* oracle = app.add_subcommand("oracle", "evaluate a single oracle formula");
  oracle->require_subcommand(1);

  auto* quad = oracle->add_subcommand("quadform", "E((gamma' M gamma)^2)");
  auto sigma2 = std::make_shared<double>(1.0);
  auto kappa4 = std::make_shared<double>(3.0);
  auto matrix = std::make_shared<std::string>("identity:1");
  quad->add_option("--sigma2", *sigma2, "entry variance");
  quad->add_option("--kappa4", *kappa4, "entry fourth moment");
  quad->add_option("--matrix", *matrix, "identity:N | diag:a,b,... | file:path")->required();
  quad->callback([sigma2, kappa4, matrix]() {
    infnoise::MomentParams params{*sigma2, *kappa4, parse_matrix_arg(*matrix)};
    std::cout << json{{"value", infnoise::quadform_second_moment(params)}}.dump() << "\n";
  });

  auto* pair = oracle->add_subcommand("pairdiff", "var(||Z_i - Z_j||^2)");
  auto mu4 = std::make_shared<double>(3.0);
  auto sigma = std::make_shared<std::string>();
  pair->add_option("--mu4", *mu4, "entry fourth moment");
  pair->add_option("--sigma", *sigma, "identity:N | diag:a,b,... | file:path")->required();
  pair->callback([mu4, sigma]() {
    std::cout << json{{"value",
                       infnoise::pairdiff_variance(parse_matrix_arg(*sigma), *mu4)}}
                     .dump()
              << "\n";
  });

  auto* bracket = oracle->add_subcommand("bracket", "Frobenius-error bracket");
  auto bc0 = std::make_shared<double>(1.0);
  auto bc1 = std::make_shared<double>(1.0);
  auto btr = std::make_shared<double>(0.0);
  auto bop = std::make_shared<double>(1.0);
  auto bp = std::make_shared<double>(1.0);
  bracket->add_option("--c0", *bc0, "kernel Lipschitz constant C0");
  bracket->add_option("--c1", *bc1, "signal second-moment bound C1");
  bracket->add_option("--trace-sq-over-p2", *btr, "trace(Sigma^2)/p^2")->required();
  bracket->add_option("--op-norm", *bop, "||Sigma||_op");
  bracket->add_option("--p", *bp, "dimension p")->required();
  bracket->callback([bc0, bc1, btr, bop, bp]() {
    const infnoise::SigmaStats stats{*btr, *bop};
    std::cout << json{{"value", infnoise::eq1_bracket(*bc0, *bc1, stats, *bp)}}.dump()
              << "\n";
  });

  auto* rates = oracle->add_subcommand("rates", "r0, r1, u_p, kappa_b");
  auto rp = std::make_shared<infnoise::RateParams>();
  rates->add_option("--b", rp->b, "concentration exponent");
  rates->add_option("--c0", rp->c0, "concentration rate");
  rates->add_option("--C", rp->Cc, "concentration prefactor");
  rates->add_option("--eps", rp->eps, "epsilon in the log factor");
  rates->add_option("--n", rp->n, "number of points")->required();
  rates->add_option("--p", rp->p, "dimension")->required();
  rates->add_option("--mp", rp->M_p, "signal diameter bound M_p");
  rates->add_option("--rsup", rp->R_sup, "radius upper bound R_inf(p)");
  rates->add_option("--rinf", rp->R_inf, "radius lower bound r_inf(p)");
  rates->add_option("--nu", rp->nu, "noise energy nu");
  rates->callback([rp]() {
    const infnoise::RateQuantities q = infnoise::rate_quantities(*rp);
    std::cout << json{{"r0", q.r0}, {"r1", q.r1}, {"u_p", q.u_p}, {"kappa_b", q.kappa_b}}
                     .dump()
              << "\n";
  });
}

int spectra_command(const std::string& dataset_path, const std::vector<int>& ks) {
  const infnoise::SpectraInput input =
      infnoise::parse_dataset_file(read_file(dataset_path));
  const infnoise::DataSet& ds = input.dataset;

  const infnoise::KernelMatrixResult observed = infnoise::kernel_matrix(ds, input.kernel);
  const infnoise::SymMatrix approx =
      input.kernel.family() == infnoise::KernelFamily::EuclideanDistance
          ? infnoise::approx_matrix_elliptical(ds, input.kernel)
          : infnoise::approx_matrix_dotproduct(ds, input.kernel);

  const std::vector<int> use_ks = ks.empty() ? std::vector<int>{1, 2} : ks;
  const infnoise::SpectralGapReport rep =
      infnoise::compare_spectra(observed.matrix, approx, use_ks);
  const infnoise::InterpointDev dev = infnoise::max_interpoint_dev(ds);

  json angles = json::array();
  for (const auto& pa : rep.top_k_angles) {
    json vals = json::array();
    for (Eigen::Index i = 0; i < pa.angles.size(); ++i) vals.push_back(pa.angles(i));
    angles.push_back(json{{"k", pa.k},
                          {"angles", vals},
                          {"separated", pa.separated},
                          {"davis_kahan_ratio", pa.davis_kahan_ratio}});
  }
  json out{{"n", ds.n},
           {"p", ds.p},
           {"nu", ds.nu},
           {"frob_gap", rep.frob_gap},
           {"op_gap", rep.op_gap},
           {"max_eig_dev", rep.eig_devs.size() ? rep.eig_devs.maxCoeff() : 0.0},
           {"max_interpoint_dev", dev.distance_form},
           {"max_dotproduct_dev", dev.dot_form},
           {"out_of_domain_count", observed.out_of_domain},
           {"gap_locations", rep.gap_locations},
           {"top_k_angles", angles}};
  std::cout << out.dump(2) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"information-plus-noise kernel random matrix harness"};
  app.require_subcommand(1);

  std::string run_config;
  int threads = 1;
  CLI::App* run = app.add_subcommand("run", "run a full experiment from a config file");
  run->add_option("config", run_config, "JSON experiment config")->required();
  run->add_option("--threads", threads, "worker threads (output is thread-count invariant)");

  std::string check_config;
  CLI::App* check = app.add_subcommand("check", "validate a config file without running");
  check->add_option("config", check_config, "JSON experiment config")->required();

  attach_oracle(app);

  std::string dataset_path;
  std::vector<int> ks;
  CLI::App* spectra = app.add_subcommand("spectra", "one-off spectral comparison");
  spectra->add_option("dataset", dataset_path, "JSON dataset file")->required();
  spectra->add_option("--ks", ks, "subspace sizes for principal angles");

  try {
    app.parse(argc, argv);
    if (run->parsed()) return run_command(run_config, threads, false);
    if (check->parsed()) return run_command(check_config, 1, true);
    if (spectra->parsed()) return spectra_command(dataset_path, ks);
    return 0;  // oracle subcommands run via callbacks
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const PropertyViolation& e) {
    std::cerr << "property violation: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
