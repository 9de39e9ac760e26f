#include "infnoise/config_io.hpp"

#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "infnoise/errors.hpp"

namespace infnoise {

namespace {

using nlohmann::json;

void require_keys(const json& obj, const std::string& where,
                  const std::set<std::string>& allowed) {
  if (!obj.is_object()) throw ConfigError(where + ": expected an object");
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.count(key)) {
      throw ConfigError(where + ": unknown key '" + key + "'");
    }
  }
}

Eigen::MatrixXd parse_matrix(const json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) throw ConfigError(where + ": expected a nonempty 2d array");
  const std::size_t rows = j.size();
  const std::size_t cols = j[0].is_array() ? j[0].size() : 0;
  if (cols == 0) throw ConfigError(where + ": expected a 2d array");
  Eigen::MatrixXd m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i) {
    if (!j[i].is_array() || j[i].size() != cols) {
      throw ConfigError(where + ": ragged rows");
    }
    for (std::size_t k = 0; k < cols; ++k) m(i, k) = j[i][k].get<double>();
  }
  return m;
}

Eigen::VectorXd parse_vector(const json& j, const std::string& where) {
  if (!j.is_array()) throw ConfigError(where + ": expected an array");
  Eigen::VectorXd v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) v(i) = j[i].get<double>();
  return v;
}

json matrix_to_json(const Eigen::MatrixXd& m) {
  json out = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    out.push_back(row);
  }
  return out;
}

NoiseFamily noise_family_from_name(const std::string& s) {
  if (s == "gaussian_like") return NoiseFamily::GaussianLike;
  if (s == "sphere_uniform") return NoiseFamily::SphereUniform;
  if (s == "scaled_sphere") return NoiseFamily::ScaledSphere;
  if (s == "lp_ball") return NoiseFamily::LpBall;
  if (s == "gaussian_copula") return NoiseFamily::GaussianCopula;
  throw ConfigError("noise.family: unknown family '" + s + "'");
}

std::string noise_family_name(NoiseFamily f) {
  switch (f) {
    case NoiseFamily::GaussianLike: return "gaussian_like";
    case NoiseFamily::SphereUniform: return "sphere_uniform";
    case NoiseFamily::ScaledSphere: return "scaled_sphere";
    case NoiseFamily::LpBall: return "lp_ball";
    case NoiseFamily::GaussianCopula: return "gaussian_copula";
  }
  throw ConfigError("noise.family: unknown enum value");
}

NoiseModel parse_noise(const json& j) {
  require_keys(j, "noise",
               {"family", "dimension", "sigma", "sigma_scale", "entry_law", "b_exponent"});
  NoiseModel m;
  m.family = noise_family_from_name(j.at("family").get<std::string>());
  if (j.contains("dimension")) m.dimension = j["dimension"].get<int>();
  if (j.contains("sigma")) {
    const json& s = j["sigma"];
    require_keys(s, "noise.sigma", {"kind", "scale", "values"});
    const std::string kind = s.at("kind").get<std::string>();
    if (kind == "identity") {
      // default sigma_scale = 1
    } else if (kind == "scaled_identity") {
      m.sigma_scale = s.at("scale").get<double>();
    } else if (kind == "diagonal") {
      const Eigen::VectorXd d = parse_vector(s.at("values"), "noise.sigma.values");
      m.sigma = Eigen::MatrixXd(d.asDiagonal());
    } else if (kind == "dense") {
      m.sigma = parse_matrix(s.at("values"), "noise.sigma.values");
    } else {
      throw ConfigError("noise.sigma.kind: unknown kind '" + kind + "'");
    }
  }
  if (j.contains("sigma_scale")) m.sigma_scale = j["sigma_scale"].get<double>();
  if (j.contains("entry_law")) {
    const std::string law = j["entry_law"].get<std::string>();
    if (law == "standard_normal") m.entry_law = EntryLaw::StandardNormal;
    else if (law == "two_point") m.entry_law = EntryLaw::TwoPoint;
    else throw ConfigError("noise.entry_law: unknown law '" + law + "'");
  }
  if (j.contains("b_exponent")) m.b_exponent = j["b_exponent"].get<double>();
  m.validate();
  return m;
}

json noise_to_json(const NoiseModel& m) {
  json out{{"family", noise_family_name(m.family)}};
  if (m.dimension != 0) out["dimension"] = m.dimension;
  if (m.sigma.has_value()) {
    out["sigma"] = json{{"kind", "dense"}, {"values", matrix_to_json(*m.sigma)}};
  } else if (m.sigma_scale != 1.0) {
    out["sigma"] = json{{"kind", "scaled_identity"}, {"scale", m.sigma_scale}};
  }
  if (m.family == NoiseFamily::GaussianLike) {
    out["entry_law"] =
        m.entry_law == EntryLaw::StandardNormal ? "standard_normal" : "two_point";
  }
  if (m.family == NoiseFamily::LpBall) out["b_exponent"] = m.b_exponent;
  return out;
}

RadiusModel parse_radii(const json& j) {
  require_keys(j, "radii", {"family", "r_inf", "r_sup", "normalize_second_moment"});
  RadiusModel m;
  const std::string fam = j.at("family").get<std::string>();
  if (fam == "constant_one") m.family = RadiusFamily::ConstantOne;
  else if (fam == "uniform_interval") m.family = RadiusFamily::UniformInterval;
  else if (fam == "two_point") m.family = RadiusFamily::TwoPoint;
  else throw ConfigError("radii.family: unknown family '" + fam + "'");
  if (j.contains("r_inf")) m.r_inf = j["r_inf"].get<double>();
  if (j.contains("r_sup")) m.r_sup = j["r_sup"].get<double>();
  if (j.contains("normalize_second_moment")) {
    m.normalize_second_moment = j["normalize_second_moment"].get<bool>();
  }
  m.validate();
  return m;
}

json radii_to_json(const RadiusModel& m) {
  json out;
  switch (m.family) {
    case RadiusFamily::ConstantOne: out["family"] = "constant_one"; break;
    case RadiusFamily::UniformInterval: out["family"] = "uniform_interval"; break;
    case RadiusFamily::TwoPoint: out["family"] = "two_point"; break;
  }
  if (m.family != RadiusFamily::ConstantOne) {
    out["r_inf"] = m.r_inf;
    out["r_sup"] = m.r_sup;
    out["normalize_second_moment"] = m.normalize_second_moment;
  }
  return out;
}

SignalModel parse_signal(const json& j) {
  require_keys(j, "signal", {"family", "intrinsic_dim", "ambient_dim", "scale", "points"});
  SignalModel m;
  const std::string fam = j.at("family").get<std::string>();
  if (fam == "fixed_cloud") m.family = SignalFamily::FixedCloud;
  else if (fam == "circle_embed") m.family = SignalFamily::CircleEmbed;
  else if (fam == "sphere_embed") m.family = SignalFamily::SphereEmbed;
  else if (fam == "gaussian_lowrank") m.family = SignalFamily::GaussianLowrank;
  else throw ConfigError("signal.family: unknown family '" + fam + "'");
  if (j.contains("intrinsic_dim")) m.intrinsic_dim = j["intrinsic_dim"].get<int>();
  if (j.contains("ambient_dim")) m.ambient_dim = j["ambient_dim"].get<int>();
  if (j.contains("scale")) m.scale = j["scale"].get<double>();
  if (j.contains("points")) m.points = parse_matrix(j["points"], "signal.points");
  m.validate();
  return m;
}

json signal_to_json(const SignalModel& m) {
  json out;
  switch (m.family) {
    case SignalFamily::FixedCloud: out["family"] = "fixed_cloud"; break;
    case SignalFamily::CircleEmbed: out["family"] = "circle_embed"; break;
    case SignalFamily::SphereEmbed: out["family"] = "sphere_embed"; break;
    case SignalFamily::GaussianLowrank: out["family"] = "gaussian_lowrank"; break;
  }
  out["intrinsic_dim"] = m.intrinsic_dim;
  if (m.ambient_dim != 0) out["ambient_dim"] = m.ambient_dim;
  out["scale"] = m.scale;
  if (m.points.has_value()) out["points"] = matrix_to_json(*m.points);
  return out;
}

KernelSpec parse_kernel(const json& j) {
  require_keys(j, "kernel", {"family", "func", "domain", "shift"});
  KernelFamily family = KernelFamily::EuclideanDistance;
  if (j.contains("family")) {
    const std::string fam = j["family"].get<std::string>();
    if (fam == "euclidean_distance") family = KernelFamily::EuclideanDistance;
    else if (fam == "dot_product") family = KernelFamily::DotProduct;
    else throw ConfigError("kernel.family: unknown family '" + fam + "'");
  }
  std::optional<Interval> domain;
  if (j.contains("domain")) {
    const json& d = j["domain"];
    if (!d.is_array() || d.size() != 2) {
      throw ConfigError("kernel.domain: expected [lo, hi]");
    }
    domain = Interval{d[0].get<double>(), d[1].get<double>()};
  }

  const json& f = j.at("func");
  require_keys(f, "kernel.func", {"kind", "s", "a", "b", "grid", "values"});
  const std::string kind = f.at("kind").get<std::string>();
  KernelSpec k = KernelSpec::gaussian(1.0);
  if (kind == "gaussian") {
    k = KernelSpec::gaussian(f.at("s").get<double>(), family, domain);
  } else if (kind == "exponential") {
    if (!domain.has_value()) {
      throw ConfigError("kernel: exponential requires a domain with lo > 0");
    }
    if (family != KernelFamily::EuclideanDistance) {
      throw ConfigError("kernel: exponential is a euclidean_distance kernel");
    }
    k = KernelSpec::exponential(f.at("s").get<double>(), *domain);
  } else if (kind == "affine") {
    k = KernelSpec::affine(f.at("a").get<double>(), f.at("b").get<double>(), family, domain);
  } else if (kind == "table") {
    std::vector<double> xs = f.at("grid").get<std::vector<double>>();
    std::vector<double> ys = f.at("values").get<std::vector<double>>();
    k = KernelSpec::table(std::move(xs), std::move(ys), family);
  } else {
    throw ConfigError("kernel.func.kind: unknown kind '" + kind + "'");
  }
  if (j.contains("shift")) {
    const double shift = j["shift"].get<double>();
    if (shift < 0.0) throw ConfigError("kernel.shift: must be >= 0");
    k = shift_kernel(k, shift / 2.0);
  }
  return k;
}

json kernel_json(const KernelSpec& k) {
  json out;
  out["family"] = k.family() == KernelFamily::EuclideanDistance ? "euclidean_distance"
                                                                : "dot_product";
  std::visit(
      [&out](const auto& fn) {
        using T = std::decay_t<decltype(fn)>;
        if constexpr (std::is_same_v<T, kernel_funcs::Gaussian>) {
          out["func"] = json{{"kind", "gaussian"}, {"s", fn.s}};
        } else if constexpr (std::is_same_v<T, kernel_funcs::Exponential>) {
          out["func"] = json{{"kind", "exponential"}, {"s", fn.s}};
        } else if constexpr (std::is_same_v<T, kernel_funcs::Affine>) {
          out["func"] = json{{"kind", "affine"}, {"a", fn.a}, {"b", fn.b}};
        } else {
          out["func"] = json{{"kind", "table"}, {"grid", fn.xs}, {"values", fn.ys}};
        }
      },
      k.func());
  if (k.domain().has_value()) {
    // Serialized relative to shift 0 so parse(serialize(k)) reproduces k.
    out["domain"] = json::array({k.domain()->lo + k.shift(), k.domain()->hi + k.shift()});
  }
  if (k.shift() != 0.0) out["shift"] = k.shift();
  return out;
}

}  // namespace

ExperimentConfig parse_experiment_config(const std::string& text) try {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: JSON parse error: ") + e.what());
  }
  require_keys(root, "config",
               {"name", "signal", "noise", "radii", "kernel", "grid", "replications",
                "base_seed", "checks", "output", "eta", "separation_frac", "subspace_k1",
                "subspace_k2", "allow_large"});
  ExperimentConfig cfg;
  if (root.contains("name")) cfg.name = root["name"].get<std::string>();
  cfg.signal = parse_signal(root.at("signal"));
  cfg.noise = parse_noise(root.at("noise"));
  cfg.radii = root.contains("radii") ? parse_radii(root["radii"]) : RadiusModel{};
  cfg.kernel = parse_kernel(root.at("kernel"));
  const json& grid = root.at("grid");
  if (!grid.is_array()) throw ConfigError("grid: expected an array of [n, p] pairs");
  for (const json& cell : grid) {
    if (!cell.is_array() || cell.size() != 2) {
      throw ConfigError("grid: expected [n, p] pairs");
    }
    cfg.grid.emplace_back(cell[0].get<int>(), cell[1].get<int>());
  }
  if (root.contains("replications")) cfg.replications = root["replications"].get<int>();
  if (root.contains("base_seed")) cfg.base_seed = root["base_seed"].get<std::uint64_t>();
  if (root.contains("checks")) {
    cfg.checks.clear();
    for (const json& c : root["checks"]) {
      cfg.checks.insert(check_from_name(c.get<std::string>()));
    }
  }
  if (root.contains("output")) {
    const json& o = root["output"];
    require_keys(o, "output", {"path", "format"});
    if (o.contains("path")) cfg.output_path = o["path"].get<std::string>();
    if (o.contains("format")) {
      const std::string fmt = o["format"].get<std::string>();
      if (fmt == "csv") cfg.format = OutputFormat::Csv;
      else if (fmt == "json") cfg.format = OutputFormat::Json;
      else throw ConfigError("output.format: expected 'csv' or 'json'");
    }
  }
  if (root.contains("eta")) cfg.eta = root["eta"].get<double>();
  if (root.contains("separation_frac")) {
    cfg.separation_frac = root["separation_frac"].get<double>();
  }
  if (root.contains("subspace_k1")) cfg.subspace_k1 = root["subspace_k1"].get<int>();
  if (root.contains("subspace_k2")) cfg.subspace_k2 = root["subspace_k2"].get<int>();
  if (root.contains("allow_large")) cfg.allow_large = root["allow_large"].get<bool>();
  cfg.validate();
  return cfg;
} catch (const json::exception& e) {
  throw ConfigError(std::string("config: ") + e.what());
}

std::string experiment_config_to_json(const ExperimentConfig& cfg) {
  json root;
  root["name"] = cfg.name;
  root["signal"] = signal_to_json(cfg.signal);
  root["noise"] = noise_to_json(cfg.noise);
  root["radii"] = radii_to_json(cfg.radii);
  root["kernel"] = kernel_json(cfg.kernel);
  json grid = json::array();
  for (const auto& [n, p] : cfg.grid) grid.push_back(json::array({n, p}));
  root["grid"] = grid;
  root["replications"] = cfg.replications;
  root["base_seed"] = cfg.base_seed;
  json checks = json::array();
  for (CheckKind c : cfg.checks) checks.push_back(check_name(c));
  root["checks"] = checks;
  root["output"] = json{{"path", cfg.output_path},
                        {"format", cfg.format == OutputFormat::Csv ? "csv" : "json"}};
  root["eta"] = cfg.eta;
  root["separation_frac"] = cfg.separation_frac;
  root["subspace_k1"] = cfg.subspace_k1;
  root["subspace_k2"] = cfg.subspace_k2;
  if (cfg.allow_large) root["allow_large"] = true;
  return root.dump(2) + "\n";
}

SpectraInput parse_dataset_file(const std::string& text) try {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("dataset: JSON parse error: ") + e.what());
  }

  SpectraInput out;
  if (root.contains("signal")) {
    require_keys(root, "dataset", {"signal", "noise", "radii", "kernel", "n", "p", "seed"});
    SignalModel sig = parse_signal(root.at("signal"));
    NoiseModel noi = parse_noise(root.at("noise"));
    const RadiusModel rad = root.contains("radii") ? parse_radii(root["radii"]) : RadiusModel{};
    if (root.contains("p")) {
      const int p = root["p"].get<int>();
      sig = sig.with_ambient(p);
      noi = noi.with_dimension(p);
    }
    const int n = root.at("n").get<int>();
    const std::uint64_t seed = root.contains("seed") ? root["seed"].get<std::uint64_t>() : 0;
    out.dataset = assemble_dataset(sig, noi, rad, n, seed);
    out.kernel = parse_kernel(root.at("kernel"));
    return out;
  }

  require_keys(root, "dataset", {"Y", "Z", "R", "X", "nu", "kernel", "sigma_stats"});
  DataSet ds;
  ds.Y = parse_matrix(root.at("Y"), "dataset.Y");
  ds.Z = parse_matrix(root.at("Z"), "dataset.Z");
  ds.R = parse_vector(root.at("R"), "dataset.R");
  ds.n = static_cast<int>(ds.Y.rows());
  ds.p = static_cast<int>(ds.Y.cols());
  ds.nu = root.at("nu").get<double>();
  ds.X = root.contains("X") ? parse_matrix(root["X"], "dataset.X")
                            : combine_information_noise(ds.Y, ds.Z, ds.R);
  if (root.contains("sigma_stats")) {
    const json& s = root["sigma_stats"];
    require_keys(s, "dataset.sigma_stats", {"trace_sq_over_p2", "op_norm"});
    ds.sigma_stats = SigmaStats{s.at("trace_sq_over_p2").get<double>(),
                                s.at("op_norm").get<double>()};
  }
  ds.spherical_radii = (ds.R.array() == 1.0).all();
  ds.validate();
  out.dataset = std::move(ds);
  out.kernel = parse_kernel(root.at("kernel"));
  return out;
} catch (const json::exception& e) {
  throw ConfigError(std::string("dataset: ") + e.what());
}

KernelSpec parse_kernel_json(const std::string& text) try {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("kernel: JSON parse error: ") + e.what());
  }
  return parse_kernel(root);
} catch (const json::exception& e) {
  throw ConfigError(std::string("kernel: ") + e.what());
}

std::string kernel_to_json(const KernelSpec& k) { return kernel_json(k).dump(2) + "\n"; }

}  // namespace infnoise
