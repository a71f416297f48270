#pragma once
// Operator-valued rough path built from (x, XX) and the semigroup:
//
//   X^{x,i}_ts   = S_ts dx^i_ts  + int_s^t lambda S_tu dx^i_tu du
//   X^{ax,i}_ts  = a_ts dx^i_ts  + int_s^t lambda S_tu dx^i_tu du
//   X^{xx,ij}_ts = S_ts XX^ij_ts + int_s^t lambda S_tu (XX^ij_tu + dx^i_tu dx^j_us) du
//
// (lambda > 0 is the eigenvalue of the positive operator, so -A S = lambda S
// in the generator convention). Everything is diagonal in the sine basis; each
// operator is one multiplier per mode.
//
// The time integrals use a product rule on the quadrature grid of level
// fine_level + quad_offset: on each subinterval the integrand is replaced by
// its quadratic interpolant through the two endpoints and the midpoint, and
// the weight lambda exp(-lambda (t-u)) is integrated exactly against it.
// This is exact for the piecewise-linear lift and uniform in lambda.

#include <cstdint>
#include <map>
#include <memory>
#include <shared_mutex>
#include <span>
#include <utility>
#include <vector>

#include "roughheat/driver.hpp"
#include "roughheat/spectral.hpp"

namespace roughheat {

struct ModeDiagonalOperator {
  std::vector<double> multipliers;
  std::int64_t s_index = 0;  // on the driver's fine grid
  std::int64_t t_index = 0;
  int quad_level = 0;

  Field apply(const SpectralBasis& basis, const Field& phi) const;
  /// out += multipliers * in (coefficient-wise).
  void accumulate(std::span<const double> in, std::span<double> out) const;
};

/// All operators for one time pair: X^x and X^ax per channel, X^xx per (i, j)
/// stored row-major.
struct OperatorSet {
  std::vector<ModeDiagonalOperator> x;
  std::vector<ModeDiagonalOperator> ax;
  std::vector<ModeDiagonalOperator> xx;
};

enum class OperatorKind { x, ax, xx };

/// Per-mode product-quadrature weights for the weight lambda exp(-lambda r) on
/// subintervals of length h (r = distance to the right end).
struct ExpQuadratureWeights {
  std::vector<double> decay;  // exp(-lambda h)
  std::vector<double> right;  // node at r = 0
  std::vector<double> mid;    // node at r = h/2
  std::vector<double> left;   // node at r = h
};
ExpQuadratureWeights exp_quadrature_weights(std::span<const double> eigenvalues, double h);

class ConvRoughPath {
 public:
  ConvRoughPath(BasisPtr basis, DriverPtr driver, int quad_offset = 2);

  const SpectralBasis& basis() const noexcept { return *basis_; }
  const EnhancedDriver& driver() const noexcept { return *driver_; }
  BasisPtr basis_ptr() const noexcept { return basis_; }
  DriverPtr driver_ptr() const noexcept { return driver_; }
  int quad_offset() const noexcept { return quad_offset_; }
  int quad_level() const noexcept { return driver_->fine_level() + quad_offset_; }

  /// Operators for the pair of fine-grid indices s < t (cached).
  std::shared_ptr<const OperatorSet> operators(std::int64_t s_index, std::int64_t t_index) const;
  /// Same, from dyadic times; throws DyadicError for off-grid times.
  std::shared_ptr<const OperatorSet> operators_at(double s, double t) const;

  ModeDiagonalOperator build_Xx(int i, double s, double t) const;
  ModeDiagonalOperator build_Xax(int i, double s, double t) const;
  ModeDiagonalOperator build_Xxx(int i, int j, double s, double t) const;

  /// Builds without touching the cache.
  OperatorSet build(std::int64_t s_index, std::int64_t t_index) const;

  std::size_t cache_size() const;
  void clear_cache() const;

 private:
  BasisPtr basis_;
  DriverPtr driver_;
  int quad_offset_;
  ExpQuadratureWeights weights_;
  mutable std::shared_mutex cache_mutex_;
  mutable std::map<std::pair<std::int64_t, std::int64_t>, std::shared_ptr<const OperatorSet>> cache_;
};

using ConvPtr = std::shared_ptr<const ConvRoughPath>;

/// max_k |X^x_ts - X^x_tu - S_tu X^x_us| for dyadic s <= u <= t.
double cochain_defect_x(const ConvRoughPath& crp, int i, double s, double u, double t);
/// max_k |X^xx_ts - X^xx_tu - S_tu X^xx_us - X^x_tu dx^j_us|.
double cochain_defect_xx(const ConvRoughPath& crp, int i, int j, double s, double u, double t);

/// Independent route for smooth drivers: int_s^t S_tu x'(u) du by product
/// quadrature of the closed-form derivative on the grid of level `level`.
ModeDiagonalOperator oracle_regular_Xx(const SpectralBasis& basis, const DriverPath& path, int i,
                                       double s, double t, int level);

/// Sup over dyadic intervals (k 2^-j, (k+1) 2^-j), j <= coarse_level, and over
/// channels, of the mode-wise operator norm divided by (t-s)^exponent:
///   x : sup_k lambda^kappa |chi_k| / (t-s)^(gamma - kappa)
///   ax: sup_k lambda^-alpha |chi_k| / (t-s)^(gamma + alpha)
///   xx: sup_k lambda^kappa |chi_k| / (t-s)^(2 gamma - kappa)
double operator_holder_norm(const ConvRoughPath& crp, OperatorKind kind, double gamma, double alpha,
                            double kappa, int coarse_level);

}  // namespace roughheat
