#pragma once
// Experiment configuration: JSON with a fixed schema, validated up front.
//
// {
//   "experiment": "solve" | "convergence" | "continuity" | "partition" |
//                 "validate-driver" | "ito-compare" | "identification" | "residual",
//   "basis":  {"K": 32, "G": 64, "a": 1.0, "c": 0.0, "eigenvalues": [...]},
//   "driver": {"kind": "fbm" | "linear" | "sinusoid" | "file", "hurst": 0.5,
//              "channels": 1, "params": [...], "fine_level": 12,
//              "chronology": "geometric" | "ito", "lift": "piecewise_linear" | "exact",
//              "path": "x.csv"},
//   "field": "sin:1",
//   "psi":   {"kind": "modes" | "parabola", "coefficients": [...], "amplitude": 1.0},
//   "gamma": 0.45, "gamma_prime": 0.75,
//   "levels": [5, 10], "seeds": [1, 2], "quad_offset": 2,
//   "epsilons": [0.01, 0.001], "N": 38, "out": "results"
// }
//
// "eigenvalues" selects a decoupled pointwise basis instead of the sine basis.
// gamma and gamma_prime are mandatory for experiments that solve the equation.

#include <cstdint>
#include <string>
#include <vector>

#include "roughheat/driver.hpp"
#include "roughheat/scheme.hpp"
#include "roughheat/spectral.hpp"

namespace roughheat {

struct DriverConfig {
  std::string kind = "fbm";
  double hurst = 0.5;
  int channels = 1;
  std::vector<double> params;  // deterministic drivers
  int fine_level = -1;         // -1: n_max + max(2, quad_offset)
  std::string chronology = "geometric";
  std::string lift = "piecewise_linear";
  std::string path;  // kind == "file"
};

struct PsiConfig {
  std::string kind = "modes";
  std::vector<double> coefficients{1.0, 0.5};
  double amplitude = 1.0;
};

struct ExperimentConfig {
  std::string experiment = "solve";
  int K = 32;
  int G = 0;  // 0: 2K
  double a = 1.0;
  double c = 0.0;
  std::vector<double> eigenvalues;  // non-empty: pointwise basis
  DriverConfig driver;
  std::string field = "sin:1";
  PsiConfig psi;
  double gamma = 0.45;
  double gamma_prime = 0.75;
  int n_min = 5;
  int n_max = 10;
  std::vector<std::uint64_t> seeds{1};
  int quad_offset = 2;
  std::vector<double> epsilons{1e-2, 1e-3};
  std::int64_t N = 38;
  std::string out;

  int fine_level() const;
  bool needs_problem() const;
  /// Range checks; throws ConfigError naming the field.
  void validate() const;
};

/// Parses JSON text; unknown keys, wrong types and missing mandatory keys
/// raise ConfigError with the field name.
ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::string& path);

/// "a..b" or "a:b"
std::pair<int, int> parse_level_range(const std::string& text);
/// "1,2,5" or "1-8"
std::vector<std::uint64_t> parse_seed_list(const std::string& text);

BasisPtr build_basis(const ExperimentConfig& cfg);
PathPtr build_path(const ExperimentConfig& cfg, std::uint64_t seed);
DriverPtr build_driver(const ExperimentConfig& cfg, PathPtr path);
Field build_psi(const ExperimentConfig& cfg, const SpectralBasis& basis);
Problem build_problem(const ExperimentConfig& cfg, std::uint64_t seed);
Problem build_problem(const ExperimentConfig& cfg, BasisPtr basis, DriverPtr driver, Field psi);

}  // namespace roughheat
