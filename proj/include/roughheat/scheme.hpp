#pragma once
// The explicit scheme on the dyadic grid t_k = k 2^-n:
//
//   y_{k+1} = S_D y_k + sum_i X^{x,i} f_i(y_k) + sum_ij X^{xx,ij} F_ij(y_k),
//   F_ij = f_i' f_j,  D = 2^-n,
//
// with the nonlinearities evaluated by collocation on the basis grid, and
// the residuals J, K that measure how far a path is from being a solution.

#include <cstdint>
#include <vector>

#include "roughheat/driver.hpp"
#include "roughheat/operator_path.hpp"
#include "roughheat/spectral.hpp"
#include "roughheat/vector_field.hpp"

namespace roughheat {

struct Problem {
  BasisPtr basis;
  DriverPtr driver;
  ConvPtr conv;
  VectorField f;
  Field psi;
  double gamma = 0.45;
  double gamma_prime = 0.75;

  /// Checks ranges and shapes; throws ParameterError / ShapeError.
  void validate() const;
  /// min(3 gamma - 1, gamma + gamma' - 1, gamma - (gamma' - 1/2))
  double beta_max() const;
};

/// Convenience constructor: builds the operator path and validates.
Problem make_problem(BasisPtr basis, DriverPtr driver, VectorField f, Field psi, double gamma,
                     double gamma_prime, int quad_offset = 2);

class Trajectory {
 public:
  Trajectory(int level, std::vector<std::vector<double>> values);

  int level() const noexcept { return level_; }
  std::int64_t steps() const noexcept { return std::int64_t{1} << level_; }
  /// Coefficients at t_k.
  const std::vector<double>& at(std::int64_t k) const { return values_.at(static_cast<std::size_t>(k)); }
  const std::vector<double>& at_time(double t) const;
  Field field(std::int64_t k) const { return Field::from_coefficients(at(k)); }
  /// Linear interpolation between grid points.
  std::vector<double> interpolate(double t) const;

  /// Operator build (or cache lookup) time per step, seconds.
  std::vector<double> build_seconds;

 private:
  int level_;
  std::vector<std::vector<double>> values_;
};

/// f_i(phi) pointwise on the grid, projected to coefficients.
Field nemytskii(const SpectralBasis& basis, const ScalarField& f, const Field& phi);
/// f_i'(phi) f_j(phi) pointwise, projected.
Field F_pair(const SpectralBasis& basis, const VectorField& f, int i, int j, const Field& phi);

/// One step from t_k to t_{k+1} at level n.
std::vector<double> step(const Problem& prob, std::span<const double> y, std::int64_t k, int n);
/// Throws DivergenceError naming the first step that produced a non-finite state.
Trajectory solve(const Problem& prob, int n);

/// y_t - S_{t-s} y_s
Field delta_hat(const Problem& prob, const Field& y_s, const Field& y_t, double s, double t);

/// J = dhat y - X^x f(y_s) - X^xx F(y_s) for grid times s < t of traj.
Field residual_J(const Problem& prob, const Trajectory& traj, double s, double t);
/// K = dhat y - X^x f(y_s)
Field residual_K(const Problem& prob, const Trajectory& traj, double s, double t);

/// J compensated along a coarser partition made of grid points:
/// zero if no partition point lies in (s,t), otherwise
/// J_ts - J_{t,p_N} - sum_k S_{t,p_{k+1}} J_{p_{k+1},p_k} - S_{t,p_1} J_{p_1,s}.
Field compensated_J(const Problem& prob, const Trajectory& traj, const std::vector<double>& partition,
                    double s, double t);

}  // namespace roughheat
