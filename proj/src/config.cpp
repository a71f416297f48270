#include "roughheat/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "roughheat/error.hpp"
#include "roughheat/io.hpp"

namespace roughheat {
namespace {

using nlohmann::json;

const std::set<std::string> kExperiments = {"solve",         "convergence",    "continuity",
                                            "partition",     "validate-driver", "ito-compare",
                                            "identification", "residual"};

void reject_unknown(const json& obj, const std::string& prefix, const std::set<std::string>& allowed) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (!allowed.count(it.key())) throw ConfigError(prefix + it.key(), "unknown field");
  }
}

template <class T>
void read(const json& obj, const std::string& key, const std::string& prefix, T& out) {
  if (!obj.contains(key)) return;
  try {
    out = obj.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(prefix + key, std::string("wrong type: ") + e.what());
  }
}

const json& object_at(const json& obj, const std::string& key) {
  const json& v = obj.at(key);
  if (!v.is_object()) throw ConfigError(key, "must be an object");
  return v;
}

void need(bool cond, const std::string& field, const std::string& what) {
  if (!cond) throw ConfigError(field, what);
}

}  // namespace

int ExperimentConfig::fine_level() const {
  return driver.fine_level >= 0 ? driver.fine_level : n_max + std::max(2, quad_offset);
}

bool ExperimentConfig::needs_problem() const {
  return experiment != "partition" && experiment != "validate-driver";
}

void ExperimentConfig::validate() const {
  need(kExperiments.count(experiment) > 0, "experiment", "unknown experiment kind");
  if (eigenvalues.empty()) {
    need(K >= 1, "basis.K", "must be >= 1");
    need(a > 0.0, "basis.a", "must be > 0");
    need(c >= 0.0, "basis.c", "must be >= 0");
    need(G == 0 || G >= 2 * K, "basis.G", "must be >= 2K");
  } else {
    for (double l : eigenvalues) need(l >= 0.0 && std::isfinite(l), "basis.eigenvalues", "must be finite and >= 0");
  }
  need(driver.channels >= 1, "driver.channels", "must be >= 1");
  need(driver.kind == "fbm" || driver.kind == "linear" || driver.kind == "sinusoid" || driver.kind == "file",
       "driver.kind", "must be fbm, linear, sinusoid or file");
  if (driver.kind == "fbm") {
    need(driver.hurst > 1.0 / 3.0 && driver.hurst <= 1.0, "driver.hurst", "must lie in (1/3, 1]");
  }
  if (driver.kind == "file") need(!driver.path.empty(), "driver.path", "required for file drivers");
  need(driver.chronology == "geometric" || driver.chronology == "ito", "driver.chronology",
       "must be geometric or ito");
  need(driver.lift == "piecewise_linear" || driver.lift == "exact", "driver.lift",
       "must be piecewise_linear or exact");
  if (driver.chronology == "ito") {
    need(driver.kind == "fbm" && driver.hurst == 0.5, "driver.chronology", "ito requires fbm with hurst 0.5");
  }
  need(psi.kind == "modes" || psi.kind == "parabola", "psi.kind", "must be modes or parabola");
  need(quad_offset >= 0 && quad_offset <= 8, "quad_offset", "must lie in [0, 8]");
  need(n_min >= 1 && n_min <= n_max, "levels", "need 1 <= n_min <= n_max");
  need(fine_level() <= 22, "driver.fine_level", "must be <= 22");
  need(n_max + quad_offset <= fine_level(), "driver.fine_level", "must be >= n_max + quad_offset");
  need(!seeds.empty(), "seeds", "must not be empty");
  need(N >= 2, "N", "must be >= 2");
  if (needs_problem()) {
    need(gamma > 1.0 / 3.0 && gamma < 0.5, "gamma", "must lie in (1/3, 1/2)");
    need(gamma_prime > 1.0 - gamma && gamma_prime < gamma + 0.5, "gamma_prime",
         "must lie in (1 - gamma, gamma + 1/2)");
    try {
      (void)VectorField::parse(field, driver.channels);
    } catch (const std::invalid_argument& e) {
      throw ConfigError("field", e.what());
    }
    if (!VectorField::parse(field, driver.channels).bounded()) {
      need(!eigenvalues.empty(), "field", "unbounded fields are only admitted on pointwise bases");
    }
  }
  if (experiment == "convergence" || experiment == "residual") {
    need(n_max >= n_min + 3, "levels", "rate fits need at least 4 levels");
    need(n_max + 2 <= fine_level(), "driver.fine_level", "must be >= n_max + 2 for the reference");
  }
  if (experiment == "continuity") need(epsilons.size() >= 2, "epsilons", "need at least two sizes");
  if (experiment == "ito-compare") {
    need(driver.kind == "fbm" && driver.hurst == 0.5, "driver.hurst", "ito-compare requires hurst 0.5");
  }
  if (experiment == "identification") {
    need(driver.kind == "linear" || driver.kind == "sinusoid", "driver.kind",
         "identification needs a deterministic smooth driver");
  }
}

ExperimentConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("<document>", e.what());
  }
  if (!j.is_object()) throw ConfigError("<document>", "top level must be an object");
  reject_unknown(j, "", {"experiment", "basis", "driver", "field", "psi", "gamma", "gamma_prime", "levels",
                         "seeds", "quad_offset", "epsilons", "N", "out"});
  ExperimentConfig cfg;
  read(j, "experiment", "", cfg.experiment);
  if (j.contains("basis")) {
    const json& b = object_at(j, "basis");
    reject_unknown(b, "basis.", {"K", "G", "a", "c", "eigenvalues"});
    read(b, "K", "basis.", cfg.K);
    read(b, "G", "basis.", cfg.G);
    read(b, "a", "basis.", cfg.a);
    read(b, "c", "basis.", cfg.c);
    read(b, "eigenvalues", "basis.", cfg.eigenvalues);
  }
  if (j.contains("driver")) {
    const json& d = object_at(j, "driver");
    reject_unknown(d, "driver.",
                   {"kind", "hurst", "channels", "params", "fine_level", "chronology", "lift", "path"});
    read(d, "kind", "driver.", cfg.driver.kind);
    read(d, "hurst", "driver.", cfg.driver.hurst);
    read(d, "channels", "driver.", cfg.driver.channels);
    read(d, "params", "driver.", cfg.driver.params);
    read(d, "fine_level", "driver.", cfg.driver.fine_level);
    read(d, "chronology", "driver.", cfg.driver.chronology);
    read(d, "lift", "driver.", cfg.driver.lift);
    read(d, "path", "driver.", cfg.driver.path);
  }
  read(j, "field", "", cfg.field);
  if (j.contains("psi")) {
    const json& p = object_at(j, "psi");
    reject_unknown(p, "psi.", {"kind", "coefficients", "amplitude"});
    read(p, "kind", "psi.", cfg.psi.kind);
    read(p, "coefficients", "psi.", cfg.psi.coefficients);
    read(p, "amplitude", "psi.", cfg.psi.amplitude);
  }
  if (cfg.needs_problem()) {
    if (!j.contains("gamma")) throw ConfigError("gamma", "missing");
    if (!j.contains("gamma_prime")) throw ConfigError("gamma_prime", "missing");
  }
  read(j, "gamma", "", cfg.gamma);
  read(j, "gamma_prime", "", cfg.gamma_prime);
  if (j.contains("levels")) {
    std::vector<int> lv;
    read(j, "levels", "", lv);
    if (lv.size() != 2) throw ConfigError("levels", "expected [n_min, n_max]");
    cfg.n_min = lv[0];
    cfg.n_max = lv[1];
  }
  read(j, "seeds", "", cfg.seeds);
  read(j, "quad_offset", "", cfg.quad_offset);
  read(j, "epsilons", "", cfg.epsilons);
  read(j, "N", "", cfg.N);
  read(j, "out", "", cfg.out);
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("--config", "cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::pair<int, int> parse_level_range(const std::string& text) {
  auto sep = text.find("..");
  std::size_t skip = 2;
  if (sep == std::string::npos) {
    sep = text.find(':');
    skip = 1;
  }
  if (sep == std::string::npos) throw ConfigError("--levels", "expected a..b");
  try {
    return {std::stoi(text.substr(0, sep)), std::stoi(text.substr(sep + skip))};
  } catch (const std::exception&) {
    throw ConfigError("--levels", "expected integers a..b");
  }
}

std::vector<std::uint64_t> parse_seed_list(const std::string& text) {
  std::vector<std::uint64_t> out;
  std::stringstream ss(text);
  std::string item;
  try {
    while (std::getline(ss, item, ',')) {
      const auto dash = item.find('-');
      if (dash != std::string::npos && dash > 0) {
        const auto lo = std::stoull(item.substr(0, dash));
        const auto hi = std::stoull(item.substr(dash + 1));
        if (hi < lo) throw ConfigError("--seed-list", "empty range");
        for (auto s = lo; s <= hi; ++s) out.push_back(s);
      } else {
        out.push_back(std::stoull(item));
      }
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception&) {
    throw ConfigError("--seed-list", "expected comma-separated seeds or a range a-b");
  }
  if (out.empty()) throw ConfigError("--seed-list", "no seeds given");
  return out;
}

BasisPtr build_basis(const ExperimentConfig& cfg) {
  if (!cfg.eigenvalues.empty()) return std::make_shared<const SpectralBasis>(SpectralBasis::pointwise(cfg.eigenvalues));
  return std::make_shared<const SpectralBasis>(
      SpectralBasis::make(cfg.K, cfg.a, cfg.c, cfg.G > 0 ? cfg.G : 2 * cfg.K));
}

PathPtr build_path(const ExperimentConfig& cfg, std::uint64_t seed) {
  const auto& d = cfg.driver;
  const int nf = cfg.fine_level();
  if (d.kind == "fbm") return std::make_shared<const DriverPath>(sample_fbm(d.hurst, d.channels, nf, seed));
  if (d.kind == "file") return std::make_shared<const DriverPath>(read_path_csv_file(d.path, nf));
  return std::make_shared<const DriverPath>(make_deterministic(d.kind, d.params, d.channels, nf));
}

DriverPtr build_driver(const ExperimentConfig& cfg, PathPtr path) {
  if (cfg.driver.chronology == "ito") return std::make_shared<const EnhancedDriver>(enhance_ito(std::move(path)));
  const Lift lift = cfg.driver.lift == "exact" ? Lift::exact : Lift::piecewise_linear;
  return std::make_shared<const EnhancedDriver>(enhance_geometric(std::move(path), lift));
}

Field build_psi(const ExperimentConfig& cfg, const SpectralBasis& basis) {
  const auto K = static_cast<std::size_t>(basis.modes());
  std::vector<double> c(K, 0.0);
  if (cfg.psi.kind == "modes") {
    for (std::size_t k = 0; k < std::min(K, cfg.psi.coefficients.size()); ++k) {
      c[k] = cfg.psi.amplitude * cfg.psi.coefficients[k];
    }
  } else {
    // 4 xi (1 - xi) = sum over odd k of 16 sqrt(2) / (k pi)^3 e_k
    const double pi = 3.14159265358979323846;
    for (std::size_t k = 0; k < K; k += 2) {
      const double kk = static_cast<double>(k + 1) * pi;
      c[k] = cfg.psi.amplitude * 16.0 * std::sqrt(2.0) / (kk * kk * kk);
    }
  }
  return Field::from_coefficients(std::move(c));
}

Problem build_problem(const ExperimentConfig& cfg, BasisPtr basis, DriverPtr driver, Field psi) {
  return make_problem(std::move(basis), std::move(driver), VectorField::parse(cfg.field, cfg.driver.channels),
                      std::move(psi), cfg.gamma, cfg.gamma_prime, cfg.quad_offset);
}

Problem build_problem(const ExperimentConfig& cfg, std::uint64_t seed) {
  auto basis = build_basis(cfg);
  auto driver = build_driver(cfg, build_path(cfg, seed));
  auto psi = build_psi(cfg, *basis);
  return build_problem(cfg, std::move(basis), std::move(driver), std::move(psi));
}

}  // namespace roughheat
