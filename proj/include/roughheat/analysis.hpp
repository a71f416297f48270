#pragma once
// Discrete Hoelder seminorms and the experiments built on the scheme:
// self-convergence rates, continuity ratios, comparison with classical and
// Ito references, and the scaling of the two-step residual.
//
// States are measured in B_{alpha,2} = ||A^alpha .||_{L^2}, exact in
// coefficients. Pointwise bases (decoupled scalar modes, possibly lambda = 0)
// use the Euclidean norm of the coefficients instead.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "roughheat/config.hpp"
#include "roughheat/scheme.hpp"

namespace roughheat {

double state_norm(const SpectralBasis& basis, double alpha, std::span<const double> coeffs);

/// sup over pairs (t_i, t_i + 2^j h) of the grid of ||(dhat y)_ts||_{B_alpha,2} / (t-s)^lambda,
/// all spans 2^j, j = 0..n. With twisted = false the plain increment y_t - y_s is used.
/// lambda = 0 returns sup_t ||y_t||_{B_alpha,2}.
double discrete_holder(const SpectralBasis& basis, const std::vector<std::vector<double>>& values,
                       double lambda, double alpha, bool twisted = true);

struct SlopeFit {
  double slope = 0.0;     // beta-hat = - d log2 E / d n
  double residual = 0.0;  // rms of the log2 fit
  bool exact = false;     // all errors zero
};
/// Least squares of log2 E_n against n; requires at least 4 levels.
SlopeFit fit_rate(const std::vector<int>& levels, const std::vector<double>& errors);

struct RateReport {
  std::vector<int> levels;
  std::vector<double> errors;  // per level, median over seeds
  double slope = 0.0;          // median of the per-seed slopes
  double residual = 0.0;
  double beta_max = 0.0;
  bool exact = false;
  std::vector<std::uint64_t> seeds;
  std::vector<std::vector<double>> seed_errors;
  std::vector<double> seed_slopes;
};

/// Errors against a solve two levels finer than n_max, in B_{gamma',2},
/// maximised over the level-n grid.
RateReport convergence_study(const ExperimentConfig& cfg);

/// max_k ||J^n_{t_{k+2}, t_k}||_{L^2} per level, fitted like a rate (slope is
/// the exponent of 2^-n).
RateReport residual_scaling(const ExperimentConfig& cfg);

struct ContinuityReport {
  std::vector<double> epsilons;
  std::vector<std::uint64_t> seeds;
  // ratio[s][e]: distance of solutions over distance of data
  std::vector<std::vector<double>> ratio;
  std::vector<std::vector<double>> numerator;
  std::vector<std::vector<double>> denominator;
  bool perturb_psi = true;
  bool perturb_driver = true;
};

/// psi~ = psi + eps e_1 and x~ = x + eps sin^2(pi t) (areas recomputed);
/// numerator N[y - y~; C^gamma-hat(L^2)] + N[y - y~; C^0(B_{gamma',2})] on the
/// level-n_max grid, denominator ||psi - psi~||_{B_gamma',2} + ||XX - XX~||_gamma.
ContinuityReport continuity_study(const ExperimentConfig& cfg, bool perturb_psi = true,
                                  bool perturb_driver = true);

struct IdentificationReport {
  std::vector<int> levels;
  std::vector<double> gaps;  // max over the grid, B_{gamma',2}
  int reference_level = 0;   // log2 of the reference step count
  double reference_self_difference = 0.0;
};

/// Classical mild solution of dy = Ay dt + f(y) x'(t) dt by an
/// integrating-factor RK4, refined until successive refinements agree to 1e-8.
IdentificationReport regular_identification(const ExperimentConfig& cfg);

struct ItoReport {
  std::vector<int> levels;
  std::vector<double> mean_square_gap;  // at t = 1
  std::vector<double> geometric_shift;  // mean ||y_ito(1) - y_geo(1)||
  std::vector<std::uint64_t> seeds;
  int reference_level = 0;
};

/// Exponential-Euler Ito reference on the driver's fine grid (same Wiener
/// increments) against the scheme with the Ito area.
ItoReport ito_compare(const ExperimentConfig& cfg);

/// Integrating-factor RK4 for the regular-driver equation on 2^level steps.
std::vector<std::vector<double>> classical_solution(const Problem& prob, const DriverPath& path, int level);

/// Exponential Euler y_{j+1} = S_h (y_j + sum_i f_i(y_j) dx^i_j) on the fine grid.
std::vector<double> exponential_euler(const Problem& prob, const DriverPath& path);

}  // namespace roughheat
