#include "roughheat/scheme.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "roughheat/error.hpp"
#include "roughheat/kernels.hpp"

namespace roughheat {
namespace {

std::int64_t fine_span(const Problem& prob, int n) {
  const int nf = prob.driver->fine_level();
  if (n < 0 || n > nf) throw ParameterError("scheme level must lie in [0, driver fine level]");
  return std::int64_t{1} << (nf - n);
}

std::vector<double> map_grid(std::span<const double> g, const ScalarField& f, int r) {
  std::vector<double> out(g.size());
  for (std::size_t j = 0; j < g.size(); ++j) out[j] = f.eval(r, g[j]);
  return out;
}

// X^x f(y_s) + X^xx F(y_s), accumulated into out.
void add_rough_terms(const Problem& prob, const OperatorSet& ops, std::span<const double> ys,
                     std::vector<double>& out, bool with_area) {
  if (prob.f.is_zero()) return;
  const SpectralBasis& b = *prob.basis;
  const int m = prob.f.channels();
  const auto grid = b.to_grid(ys);
  std::vector<std::vector<double>> fg(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) {
    fg[static_cast<std::size_t>(i)] = map_grid(grid, prob.f[i], 0);
    ops.x[static_cast<std::size_t>(i)].accumulate(b.to_spectral(fg[static_cast<std::size_t>(i)]), out);
  }
  if (!with_area) return;
  std::vector<double> Fg(grid.size());
  for (int i = 0; i < m; ++i) {
    const auto dfi = map_grid(grid, prob.f[i], 1);
    for (int j = 0; j < m; ++j) {
      const auto& fj = fg[static_cast<std::size_t>(j)];
      for (std::size_t q = 0; q < grid.size(); ++q) Fg[q] = dfi[q] * fj[q];
      ops.xx[static_cast<std::size_t>(i * m + j)].accumulate(b.to_spectral(Fg), out);
    }
  }
}

std::int64_t grid_index(const Trajectory& traj, double t) {
  return dyadic_index(t, traj.level());
}

// J or K over the grid pair (s, t) of traj.
std::vector<double> residual(const Problem& prob, const Trajectory& traj, double s, double t,
                             bool with_area) {
  if (!(s < t)) throw ParameterError("residual requires s < t");
  const std::int64_t si = grid_index(traj, s), ti = grid_index(traj, t);
  const std::int64_t span = fine_span(prob, traj.level());
  const auto& ys = traj.at(si);
  const auto& yt = traj.at(ti);
  const auto d = prob.basis->decay(t - s);
  std::vector<double> out(yt.size());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = yt[k] - d[k] * ys[k];
  std::vector<double> rough(yt.size(), 0.0);
  const auto ops = prob.conv->operators(si * span, ti * span);
  add_rough_terms(prob, *ops, ys, rough, with_area);
  for (std::size_t k = 0; k < out.size(); ++k) out[k] -= rough[k];
  return out;
}

}  // namespace

void Problem::validate() const {
  if (!basis || !driver || !conv) throw ParameterError("problem needs basis, driver and operator path");
  if (&conv->basis() != basis.get() || &conv->driver() != driver.get()) {
    throw ParameterError("operator path built from a different basis or driver");
  }
  if (!(gamma > 1.0 / 3.0 && gamma < 0.5)) throw ParameterError("gamma must lie in (1/3, 1/2)");
  if (!(gamma_prime > 1.0 - gamma && gamma_prime < gamma + 0.5)) {
    throw ParameterError("gamma_prime must lie in (1 - gamma, gamma + 1/2)");
  }
  if (f.channels() != driver->channels()) throw ShapeError("vector field / driver channel mismatch");
  const auto c = basis->coefficients_of(psi);
  if (static_cast<int>(c.size()) != basis->modes()) throw ShapeError("initial condition has wrong mode count");
  for (double v : c) {
    if (!std::isfinite(v)) throw ParameterError("initial condition is not finite");
  }
  // The B_{gamma',2} norm must have settled by mode K.
  if (!basis->is_pointwise() && c.size() >= 4) {
    const double full = basis->sobolev_norm2(gamma_prime, c);
    std::vector<double> half(c);
    std::fill(half.begin() + static_cast<std::ptrdiff_t>(c.size() / 2), half.end(), 0.0);
    const double part = basis->sobolev_norm2(gamma_prime, half);
    if (full > 0.0 && part < 0.99 * full) {
      throw ParameterError("initial condition is not resolved in B_{gamma',2} at this K");
    }
  }
}

double Problem::beta_max() const {
  return std::min({3.0 * gamma - 1.0, gamma + gamma_prime - 1.0, gamma - (gamma_prime - 0.5)});
}

Problem make_problem(BasisPtr basis, DriverPtr driver, VectorField f, Field psi, double gamma,
                     double gamma_prime, int quad_offset) {
  Problem p;
  p.conv = std::make_shared<const ConvRoughPath>(basis, driver, quad_offset);
  p.basis = std::move(basis);
  p.driver = std::move(driver);
  p.f = std::move(f);
  p.psi = std::move(psi);
  p.gamma = gamma;
  p.gamma_prime = gamma_prime;
  p.validate();
  return p;
}

Trajectory::Trajectory(int level, std::vector<std::vector<double>> values)
    : level_(level), values_(std::move(values)) {
  if (static_cast<std::int64_t>(values_.size()) != steps() + 1) {
    throw ShapeError("trajectory needs 2^n + 1 states");
  }
}

const std::vector<double>& Trajectory::at_time(double t) const { return at(dyadic_index(t, level_)); }

std::vector<double> Trajectory::interpolate(double t) const {
  if (!(t >= 0.0 && t <= 1.0)) throw ParameterError("time outside [0, 1]");
  const double x = t * static_cast<double>(steps());
  const auto k = std::min<std::int64_t>(static_cast<std::int64_t>(std::floor(x)), steps() - 1);
  const double w = x - static_cast<double>(k);
  const auto& a = at(k);
  const auto& b = at(k + 1);
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = (1.0 - w) * a[i] + w * b[i];
  return out;
}

Field nemytskii(const SpectralBasis& basis, const ScalarField& f, const Field& phi) {
  return Field::from_coefficients(basis.to_spectral(map_grid(basis.grid_of(phi), f, 0)));
}

Field F_pair(const SpectralBasis& basis, const VectorField& f, int i, int j, const Field& phi) {
  const auto g = basis.grid_of(phi);
  std::vector<double> out(g.size());
  for (std::size_t q = 0; q < g.size(); ++q) out[q] = f[i].eval(1, g[q]) * f[j].eval(0, g[q]);
  return Field::from_coefficients(basis.to_spectral(out));
}

std::vector<double> step(const Problem& prob, std::span<const double> y, std::int64_t k, int n) {
  const std::int64_t span = fine_span(prob, n);
  if (k < 0 || k >= (std::int64_t{1} << n)) throw ParameterError("step index out of range");
  if (static_cast<int>(y.size()) != prob.basis->modes()) throw ShapeError("state has wrong mode count");
  const auto ops = prob.conv->operators(k * span, (k + 1) * span);
  const auto d = prob.basis->decay(std::ldexp(1.0, -n));
  std::vector<double> out(y.size());
  kernels::active().scale_diag(y.size(), out.data(), d.data(), y.data());
  add_rough_terms(prob, *ops, y, out, true);
  return out;
}

Trajectory solve(const Problem& prob, int n) {
  const std::int64_t span = fine_span(prob, n);
  const std::int64_t N = std::int64_t{1} << n;
  std::vector<std::vector<double>> values;
  values.reserve(static_cast<std::size_t>(N + 1));
  values.push_back(prob.basis->coefficients_of(prob.psi));
  std::vector<double> timings;
  timings.reserve(static_cast<std::size_t>(N));
  for (std::int64_t k = 0; k < N; ++k) {
    const auto t0 = std::chrono::steady_clock::now();
    (void)prob.conv->operators(k * span, (k + 1) * span);
    timings.push_back(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
    auto next = step(prob, values.back(), k, n);
    for (double v : next) {
      if (!std::isfinite(v) || std::abs(v) > 1e150) throw DivergenceError(k, "non-finite state");
    }
    values.push_back(std::move(next));
  }
  Trajectory traj(n, std::move(values));
  traj.build_seconds = std::move(timings);
  return traj;
}

Field delta_hat(const Problem& prob, const Field& y_s, const Field& y_t, double s, double t) {
  if (s > t) throw ParameterError("delta_hat requires s <= t");
  const auto a = prob.basis->coefficients_of(y_s);
  const auto b = prob.basis->coefficients_of(y_t);
  if (a.size() != b.size()) throw ShapeError("field mode counts differ");
  const auto d = prob.basis->decay(t - s);
  std::vector<double> out(a.size());
  for (std::size_t k = 0; k < a.size(); ++k) out[k] = b[k] - d[k] * a[k];
  return Field::from_coefficients(std::move(out));
}

Field residual_J(const Problem& prob, const Trajectory& traj, double s, double t) {
  return Field::from_coefficients(residual(prob, traj, s, t, true));
}

Field residual_K(const Problem& prob, const Trajectory& traj, double s, double t) {
  return Field::from_coefficients(residual(prob, traj, s, t, false));
}

Field compensated_J(const Problem& prob, const Trajectory& traj, const std::vector<double>& partition,
                    double s, double t) {
  if (!(s < t)) throw ParameterError("compensated_J requires s < t");
  (void)grid_index(traj, s);
  (void)grid_index(traj, t);
  std::vector<double> inner;
  for (double p : partition) {
    (void)grid_index(traj, p);  // nested in the grid
    if (p > s && p < t) inner.push_back(p);
  }
  std::sort(inner.begin(), inner.end());
  inner.erase(std::unique(inner.begin(), inner.end()), inner.end());
  const std::size_t K = static_cast<std::size_t>(prob.basis->modes());
  if (inner.empty()) return Field::from_coefficients(std::vector<double>(K, 0.0));

  auto out = residual(prob, traj, s, t, true);
  auto subtract = [&](double a, double b) {
    const auto j = residual(prob, traj, a, b, true);
    const auto d = prob.basis->decay(t - b);
    for (std::size_t k = 0; k < K; ++k) out[k] -= d[k] * j[k];
  };
  subtract(inner.back(), t);
  for (std::size_t q = 0; q + 1 < inner.size(); ++q) subtract(inner[q], inner[q + 1]);
  subtract(s, inner.front());
  return Field::from_coefficients(std::move(out));
}

}  // namespace roughheat
