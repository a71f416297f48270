#include "roughheat/spectral.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "roughheat/error.hpp"
#include "roughheat/kernels.hpp"

namespace roughheat {

Field Field::from_coefficients(std::vector<double> coeffs) {
  Field f;
  f.coeffs_ = std::move(coeffs);
  f.has_coeffs_ = true;
  return f;
}

Field Field::from_grid(std::vector<double> values) {
  Field f;
  f.grid_ = std::move(values);
  f.has_grid_ = true;
  return f;
}

Field Field::from_both(std::vector<double> coeffs, std::vector<double> values) {
  Field f;
  f.coeffs_ = std::move(coeffs);
  f.grid_ = std::move(values);
  f.has_coeffs_ = true;
  f.has_grid_ = true;
  return f;
}

const std::vector<double>& Field::coefficients() const {
  if (!has_coeffs_) throw std::logic_error("field has no valid spectral representation");
  return coeffs_;
}

const std::vector<double>& Field::grid() const {
  if (!has_grid_) throw std::logic_error("field has no valid grid representation");
  return grid_;
}

SpectralBasis SpectralBasis::make(int modes, double diffusion, double reaction, int grid_size) {
  if (modes < 1) throw ParameterError("mode count must be >= 1");
  if (!(diffusion > 0.0)) throw ParameterError("diffusion must be > 0");
  if (!(reaction >= 0.0)) throw ParameterError("reaction must be >= 0");
  if (grid_size < 2 * modes) {
    throw ParameterError("grid size " + std::to_string(grid_size) + " must be >= 2K = " +
                         std::to_string(2 * modes));
  }
  SpectralBasis b;
  b.diffusion_ = diffusion;
  b.reaction_ = reaction;
  b.grid_size_ = grid_size;
  b.lambda_.resize(static_cast<std::size_t>(modes));
  const double pi2 = std::numbers::pi * std::numbers::pi;
  for (int k = 1; k <= modes; ++k) {
    b.lambda_[static_cast<std::size_t>(k - 1)] = diffusion * pi2 * k * k + reaction;
  }
  b.build_transforms();
  return b;
}

SpectralBasis SpectralBasis::pointwise(std::vector<double> eigenvalues) {
  if (eigenvalues.empty()) throw ParameterError("pointwise basis needs at least one mode");
  for (double l : eigenvalues) {
    if (!(l >= 0.0) || !std::isfinite(l)) throw ParameterError("eigenvalues must be finite and >= 0");
  }
  SpectralBasis b;
  b.pointwise_ = true;
  b.grid_size_ = static_cast<int>(eigenvalues.size());
  b.lambda_ = std::move(eigenvalues);
  return b;
}

void SpectralBasis::build_transforms() {
  const std::size_t K = lambda_.size();
  const std::size_t G = static_cast<std::size_t>(grid_size_);
  analysis_.assign(K * G, 0.0);
  synthesis_.assign(G * K, 0.0);
  const double inv = 1.0 / static_cast<double>(G + 1);
  for (std::size_t k = 0; k < K; ++k) {
    for (std::size_t j = 0; j < G; ++j) {
      // sin(k pi j/(G+1)) via the reduced integer argument keeps the table exact-symmetric.
      const std::size_t arg = ((k + 1) * (j + 1)) % (2 * (G + 1));
      const double e = std::numbers::sqrt2 * std::sin(std::numbers::pi * static_cast<double>(arg) * inv);
      synthesis_[j * K + k] = e;
      analysis_[k * G + j] = e * inv;
    }
  }
}

double SpectralBasis::node(int j) const {
  if (j < 0 || j >= grid_size_) throw ShapeError("node index out of range");
  if (pointwise_) return static_cast<double>(j);
  return static_cast<double>(j + 1) / static_cast<double>(grid_size_ + 1);
}

std::vector<double> SpectralBasis::to_spectral(std::span<const double> grid) const {
  if (grid.size() != static_cast<std::size_t>(grid_size_)) {
    throw ShapeError("grid length " + std::to_string(grid.size()) + " != G = " +
                     std::to_string(grid_size_));
  }
  if (pointwise_) return {grid.begin(), grid.end()};
  std::vector<double> out(lambda_.size());
  kernels::active().matvec(lambda_.size(), grid.size(), analysis_.data(), grid.data(), out.data());
  return out;
}

std::vector<double> SpectralBasis::to_grid(std::span<const double> coeffs) const {
  if (coeffs.size() != lambda_.size()) {
    throw ShapeError("coefficient length " + std::to_string(coeffs.size()) + " != K = " +
                     std::to_string(lambda_.size()));
  }
  if (pointwise_) return {coeffs.begin(), coeffs.end()};
  std::vector<double> out(static_cast<std::size_t>(grid_size_));
  kernels::active().matvec(out.size(), coeffs.size(), synthesis_.data(), coeffs.data(), out.data());
  return out;
}

std::vector<double> SpectralBasis::coefficients_of(const Field& f) const {
  if (f.has_coefficients()) {
    if (f.coefficients().size() != lambda_.size()) throw ShapeError("field has wrong mode count");
    return f.coefficients();
  }
  return to_spectral(f.grid());
}

std::vector<double> SpectralBasis::grid_of(const Field& f) const {
  if (f.has_grid()) {
    if (f.grid().size() != static_cast<std::size_t>(grid_size_)) {
      throw ShapeError("field has wrong grid size");
    }
    return f.grid();
  }
  return to_grid(f.coefficients());
}

Field SpectralBasis::complete(const Field& f) const {
  auto c = coefficients_of(f);
  auto g = f.has_grid() ? grid_of(f) : to_grid(c);
  return Field::from_both(std::move(c), std::move(g));
}

std::vector<double> SpectralBasis::decay(double tau) const {
  if (!(tau >= 0.0)) throw ParameterError("semigroup time must be >= 0");
  std::vector<double> d(lambda_.size());
  for (std::size_t k = 0; k < d.size(); ++k) d[k] = std::exp(-lambda_[k] * tau);
  return d;
}

Field SpectralBasis::semigroup_apply(double tau, const Field& phi) const {
  const auto d = decay(tau);
  const auto c = coefficients_of(phi);
  std::vector<double> out(c.size());
  kernels::active().scale_diag(c.size(), out.data(), d.data(), c.data());
  return Field::from_coefficients(std::move(out));
}

Field SpectralBasis::a_increment_apply(double tau, const Field& phi) const {
  if (!(tau >= 0.0)) throw ParameterError("semigroup time must be >= 0");
  auto c = coefficients_of(phi);
  for (std::size_t k = 0; k < c.size(); ++k) c[k] *= std::expm1(-lambda_[k] * tau);
  return Field::from_coefficients(std::move(c));
}

Field SpectralBasis::fractional_apply(double alpha, const Field& phi) const {
  if (!(alpha >= 0.0)) throw ParameterError("fractional order must be >= 0");
  auto c = coefficients_of(phi);
  if (alpha == 0.0) return Field::from_coefficients(std::move(c));
  for (std::size_t k = 0; k < c.size(); ++k) c[k] *= std::pow(lambda_[k], alpha);
  return Field::from_coefficients(std::move(c));
}

double SpectralBasis::sobolev_norm2(double alpha, std::span<const double> coeffs) const {
  if (!(alpha >= 0.0)) throw ParameterError("fractional order must be >= 0");
  if (coeffs.size() != lambda_.size()) throw ShapeError("coefficient length mismatch");
  if (alpha == 0.0) {
    double s = 0.0;
    for (double v : coeffs) s += v * v;
    return std::sqrt(s);
  }
  std::vector<double> w(lambda_.size());
  for (std::size_t k = 0; k < w.size(); ++k) w[k] = std::pow(lambda_[k], 2.0 * alpha);
  return std::sqrt(kernels::active().weighted_square_sum(w.size(), w.data(), coeffs.data()));
}

double SpectralBasis::sobolev_norm(double alpha, double p, const Field& phi) const {
  if (!(p > 1.0)) throw ParameterError("norm exponent must be > 1");
  if (p == 2.0) return sobolev_norm2(alpha, coefficients_of(phi));
  const Field lifted = fractional_apply(alpha, phi);
  const auto g = to_grid(lifted.coefficients());
  double s = 0.0;
  for (double v : g) s += std::pow(std::abs(v), p);
  if (!pointwise_) s /= static_cast<double>(grid_size_ + 1);
  return std::pow(s, 1.0 / p);
}

}  // namespace roughheat
