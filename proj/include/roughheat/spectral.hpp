#pragma once
// Dirichlet operator A = -a d^2/dxi^2 + c on (0,1) in the orthonormal sine
// basis e_k(xi) = sqrt(2) sin(k pi xi), with the semigroup S_tau = exp(-tau A),
// fractional powers A^alpha and the norms ||A^alpha phi||_{L^p}.

#include <memory>
#include <span>
#include <vector>

namespace roughheat {

/// A function on (0,1) carried in spectral coefficients, grid samples, or both.
class Field {
 public:
  Field() = default;

  static Field from_coefficients(std::vector<double> coeffs);
  static Field from_grid(std::vector<double> values);
  static Field from_both(std::vector<double> coeffs, std::vector<double> values);

  bool has_coefficients() const noexcept { return has_coeffs_; }
  bool has_grid() const noexcept { return has_grid_; }

  /// Throws std::logic_error when the representation is not valid.
  const std::vector<double>& coefficients() const;
  const std::vector<double>& grid() const;

 private:
  std::vector<double> coeffs_;
  std::vector<double> grid_;
  bool has_coeffs_ = false;
  bool has_grid_ = false;
};

class SpectralBasis {
 public:
  /// Eigenpairs lambda_k = a pi^2 k^2 + c, k = 1..K, collocation nodes
  /// xi_j = j/(G+1), j = 1..G. Requires K >= 1, a > 0, c >= 0, G >= 2K.
  static SpectralBasis make(int modes, double diffusion, double reaction, int grid_size);

  /// Decoupled scalar modes with prescribed eigenvalues lambda_k >= 0: the
  /// transform is the identity, so a Nemytskii map acts on each coefficient
  /// as a scalar function. Used for finite-dimensional reductions.
  static SpectralBasis pointwise(std::vector<double> eigenvalues);

  int modes() const noexcept { return static_cast<int>(lambda_.size()); }
  int grid_size() const noexcept { return grid_size_; }
  bool is_pointwise() const noexcept { return pointwise_; }
  double diffusion() const noexcept { return diffusion_; }
  double reaction() const noexcept { return reaction_; }
  std::span<const double> eigenvalues() const noexcept { return lambda_; }
  double eigenvalue(int k) const { return lambda_.at(static_cast<std::size_t>(k)); }
  /// Collocation node j (0-based), xi = (j+1)/(G+1).
  double node(int j) const;

  std::vector<double> to_spectral(std::span<const double> grid) const;
  std::vector<double> to_grid(std::span<const double> coeffs) const;

  /// Coefficients of f, transforming from the grid if needed.
  std::vector<double> coefficients_of(const Field& f) const;
  std::vector<double> grid_of(const Field& f) const;
  /// Field with both representations valid.
  Field complete(const Field& f) const;

  Field semigroup_apply(double tau, const Field& phi) const;
  /// (S_tau - Id) phi.
  Field a_increment_apply(double tau, const Field& phi) const;
  Field fractional_apply(double alpha, const Field& phi) const;

  /// ||A^alpha phi||_{L^p}: exact in coefficients for p = 2, composite
  /// trapezoid on the grid (with the boundary zeros) otherwise.
  double sobolev_norm(double alpha, double p, const Field& phi) const;
  /// Coefficient-space shortcut for p = 2.
  double sobolev_norm2(double alpha, std::span<const double> coeffs) const;

  /// Per-mode multipliers exp(-lambda_k tau).
  std::vector<double> decay(double tau) const;

 private:
  SpectralBasis() = default;
  void build_transforms();

  std::vector<double> lambda_;
  int grid_size_ = 0;
  double diffusion_ = 0.0;
  double reaction_ = 0.0;
  bool pointwise_ = false;
  // K x G: analysis_[k*G + j] = e_k(xi_j) / (G+1)
  std::vector<double> analysis_;
  // G x K: synthesis_[j*K + k] = e_k(xi_j)
  std::vector<double> synthesis_;
};

using BasisPtr = std::shared_ptr<const SpectralBasis>;

}  // namespace roughheat
