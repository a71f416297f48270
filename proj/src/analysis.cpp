#include "roughheat/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "roughheat/error.hpp"
#include "roughheat/parallel.hpp"

namespace roughheat {
namespace {

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

std::vector<double> difference(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw ShapeError("state sizes differ");
  std::vector<double> d(a.size());
  for (std::size_t k = 0; k < a.size(); ++k) d[k] = a[k] - b[k];
  return d;
}

std::vector<int> level_list(const ExperimentConfig& cfg) {
  std::vector<int> out;
  for (int n = cfg.n_min; n <= cfg.n_max; ++n) out.push_back(n);
  return out;
}

// Max over the level-n grid of ||fine(t_k) - coarse(t_k)|| where fine lives on level nf >= n.
double grid_gap(const SpectralBasis& basis, double alpha, const std::vector<std::vector<double>>& fine, int nf,
                const std::vector<std::vector<double>>& coarse, int n) {
  const std::size_t stride = std::size_t{1} << (nf - n);
  double worst = 0.0;
  for (std::size_t k = 0; k < coarse.size(); ++k) {
    worst = std::max(worst, state_norm(basis, alpha, difference(fine.at(k * stride), coarse[k])));
  }
  return worst;
}

std::vector<std::vector<double>> all_states(const Trajectory& traj) {
  std::vector<std::vector<double>> out;
  out.reserve(static_cast<std::size_t>(traj.steps() + 1));
  for (std::int64_t k = 0; k <= traj.steps(); ++k) out.push_back(traj.at(k));
  return out;
}

// Nonlinear term sum_i x_i'(t) P f_i(y) of the regular equation.
std::vector<double> regular_drift(const Problem& prob, const DriverPath& path, double t,
                                  std::span<const double> y) {
  const SpectralBasis& b = *prob.basis;
  const auto grid = b.to_grid(y);
  std::vector<double> acc(grid.size(), 0.0);
  for (int i = 0; i < prob.f.channels(); ++i) {
    const double w = path.exact_derivative(i, t);
    if (w == 0.0) continue;
    for (std::size_t q = 0; q < grid.size(); ++q) acc[q] += w * prob.f[i].value(grid[q]);
  }
  return b.to_spectral(acc);
}

void fill_rate(RateReport& rep) {
  rep.errors.assign(rep.levels.size(), 0.0);
  for (std::size_t l = 0; l < rep.levels.size(); ++l) {
    std::vector<double> col;
    for (const auto& se : rep.seed_errors) col.push_back(se[l]);
    rep.errors[l] = median(col);
  }
  rep.exact = std::all_of(rep.errors.begin(), rep.errors.end(), [](double e) { return e == 0.0; });
  rep.seed_slopes.clear();
  std::vector<double> residuals;
  for (const auto& se : rep.seed_errors) {
    const auto fit = fit_rate(rep.levels, se);
    rep.seed_slopes.push_back(fit.slope);
    residuals.push_back(fit.residual);
  }
  rep.slope = median(rep.seed_slopes);
  rep.residual = median(residuals);
}

}  // namespace

double state_norm(const SpectralBasis& basis, double alpha, std::span<const double> coeffs) {
  if (basis.is_pointwise()) {
    double s = 0.0;
    for (double v : coeffs) s += v * v;
    return std::sqrt(s);
  }
  return basis.sobolev_norm2(alpha, coeffs);
}

double discrete_holder(const SpectralBasis& basis, const std::vector<std::vector<double>>& values,
                       double lambda, double alpha, bool twisted) {
  if (values.empty()) throw ParameterError("empty grid");
  if (!(lambda >= 0.0)) throw ParameterError("lambda must be >= 0");
  if (lambda == 0.0) {
    double best = 0.0;
    for (const auto& v : values) best = std::max(best, state_norm(basis, alpha, v));
    return best;
  }
  const std::size_t N = values.size() - 1;
  if (N == 0) return 0.0;
  if ((N & (N - 1)) != 0) throw ParameterError("grid must have 2^n + 1 points");
  const double h = 1.0 / static_cast<double>(N);
  double best = 0.0;
  std::vector<double> d(values.front().size());
  for (std::size_t span = 1; span <= N; span *= 2) {
    const double tau = h * static_cast<double>(span);
    const auto decay = basis.decay(tau);
    const double scale = std::pow(tau, -lambda);
    for (std::size_t i = 0; i + span <= N; ++i) {
      const auto& ys = values[i];
      const auto& yt = values[i + span];
      for (std::size_t k = 0; k < d.size(); ++k) d[k] = yt[k] - (twisted ? decay[k] : 1.0) * ys[k];
      best = std::max(best, state_norm(basis, alpha, d) * scale);
    }
  }
  return best;
}

SlopeFit fit_rate(const std::vector<int>& levels, const std::vector<double>& errors) {
  if (levels.size() != errors.size()) throw ShapeError("levels and errors differ in length");
  if (levels.size() < 4) throw ParameterError("rate fits need at least 4 levels");
  SlopeFit fit;
  if (std::all_of(errors.begin(), errors.end(), [](double e) { return e == 0.0; })) {
    fit.exact = true;
    return fit;
  }
  for (double e : errors) {
    if (!(e > 0.0) || !std::isfinite(e)) throw ParameterError("rate fit needs positive finite errors");
  }
  const auto n = static_cast<double>(levels.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < levels.size(); ++i) {
    const double x = levels[i], y = std::log2(errors[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double b = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  const double a = (sy - b * sx) / n;
  double ss = 0.0;
  for (std::size_t i = 0; i < levels.size(); ++i) {
    const double r = std::log2(errors[i]) - (a + b * levels[i]);
    ss += r * r;
  }
  fit.slope = -b;
  fit.residual = std::sqrt(ss / n);
  return fit;
}

RateReport convergence_study(const ExperimentConfig& cfg) {
  cfg.validate();
  if (cfg.n_max < cfg.n_min + 3) throw ParameterError("convergence study needs n_max >= n_min + 3");
  RateReport rep;
  rep.levels = level_list(cfg);
  rep.seeds = cfg.seeds;
  const int nref = cfg.n_max + 2;
  rep.seed_errors = parallel_map<std::vector<double>>(cfg.seeds.size(), [&](std::size_t s) {
    const Problem prob = build_problem(cfg, cfg.seeds[s]);
    const auto ref = all_states(solve(prob, nref));
    std::vector<double> errs;
    for (int n : rep.levels) {
      errs.push_back(grid_gap(*prob.basis, cfg.gamma_prime, ref, nref, all_states(solve(prob, n)), n));
    }
    return errs;
  });
  const Problem probe = build_problem(cfg, cfg.seeds.front());
  rep.beta_max = probe.beta_max();
  fill_rate(rep);
  return rep;
}

RateReport residual_scaling(const ExperimentConfig& cfg) {
  cfg.validate();
  RateReport rep;
  rep.levels = level_list(cfg);
  rep.seeds = cfg.seeds;
  rep.seed_errors = parallel_map<std::vector<double>>(cfg.seeds.size(), [&](std::size_t s) {
    const Problem prob = build_problem(cfg, cfg.seeds[s]);
    std::vector<double> errs;
    for (int n : rep.levels) {
      const Trajectory traj = solve(prob, n);
      const double h = std::ldexp(1.0, -n);
      double worst = 0.0;
      for (std::int64_t k = 0; k + 2 <= traj.steps(); ++k) {
        const auto J = residual_J(prob, traj, h * static_cast<double>(k), h * static_cast<double>(k + 2));
        worst = std::max(worst, state_norm(*prob.basis, 0.0, J.coefficients()));
      }
      errs.push_back(worst);
    }
    return errs;
  });
  rep.beta_max = build_problem(cfg, cfg.seeds.front()).beta_max();
  fill_rate(rep);
  return rep;
}

ContinuityReport continuity_study(const ExperimentConfig& cfg, bool perturb_psi, bool perturb_driver) {
  cfg.validate();
  if (cfg.epsilons.size() < 2) throw ParameterError("continuity study needs at least two perturbation sizes");
  ContinuityReport rep;
  rep.epsilons = cfg.epsilons;
  rep.seeds = cfg.seeds;
  rep.perturb_psi = perturb_psi;
  rep.perturb_driver = perturb_driver;
  const int n = cfg.n_max;
  const double pi = 3.14159265358979323846;
  const auto bump = [pi](double t) {
    const double s = std::sin(pi * t);
    return s * s;
  };
  struct Row {
    std::vector<double> num, den, ratio;
  };
  const auto rows = parallel_map<Row>(cfg.seeds.size(), [&](std::size_t s) {
    const auto basis = build_basis(cfg);
    const auto path = build_path(cfg, cfg.seeds[s]);
    // Perturbed paths carry no closed form, so both sides use the piecewise-linear lift.
    const auto drv = std::make_shared<const EnhancedDriver>(enhance_geometric(path));
    const Field psi = build_psi(cfg, *basis);
    const Problem base = build_problem(cfg, basis, drv, psi);
    const auto y = all_states(solve(base, n));
    Row row;
    for (double eps : cfg.epsilons) {
      auto psi_c = basis->coefficients_of(psi);
      if (perturb_psi) psi_c.at(0) += eps;
      DriverPtr drv2 = drv;
      if (perturb_driver) {
        drv2 = std::make_shared<const EnhancedDriver>(
            enhance_geometric(std::make_shared<const DriverPath>(perturbed(*path, bump, eps))));
      }
      const Problem other = build_problem(cfg, basis, drv2, Field::from_coefficients(psi_c));
      const auto y2 = all_states(solve(other, n));
      std::vector<std::vector<double>> diff(y.size());
      for (std::size_t k = 0; k < y.size(); ++k) diff[k] = difference(y[k], y2[k]);
      const double num = discrete_holder(*basis, diff, cfg.gamma, 0.0, true) +
                         discrete_holder(*basis, diff, 0.0, cfg.gamma_prime, true);
      const double den =
          state_norm(*basis, cfg.gamma_prime, difference(basis->coefficients_of(psi), psi_c)) +
          (perturb_driver ? driver_distance(*drv, *drv2, cfg.gamma, n) : 0.0);
      row.num.push_back(num);
      row.den.push_back(den);
      row.ratio.push_back(den > 0.0 ? num / den : (num == 0.0 ? 0.0 : INFINITY));
    }
    return row;
  });
  for (const auto& r : rows) {
    rep.numerator.push_back(r.num);
    rep.denominator.push_back(r.den);
    rep.ratio.push_back(r.ratio);
  }
  return rep;
}

std::vector<std::vector<double>> classical_solution(const Problem& prob, const DriverPath& path, int level) {
  if (!path.has_closed_form()) throw ParameterError("classical reference needs a smooth closed-form driver");
  const SpectralBasis& b = *prob.basis;
  const std::int64_t N = std::int64_t{1} << level;
  const double h = 1.0 / static_cast<double>(N);
  const auto E = b.decay(h);
  const auto E2 = b.decay(0.5 * h);
  const std::size_t K = E.size();
  std::vector<std::vector<double>> out;
  out.reserve(static_cast<std::size_t>(N + 1));
  out.push_back(b.coefficients_of(prob.psi));
  std::vector<double> tmp(K);
  for (std::int64_t j = 0; j < N; ++j) {
    const double t = h * static_cast<double>(j);
    const auto& y = out.back();
    const auto k1 = regular_drift(prob, path, t, y);
    for (std::size_t k = 0; k < K; ++k) tmp[k] = E2[k] * (y[k] + 0.5 * h * k1[k]);
    const auto k2 = regular_drift(prob, path, t + 0.5 * h, tmp);
    for (std::size_t k = 0; k < K; ++k) tmp[k] = E2[k] * y[k] + 0.5 * h * k2[k];
    const auto k3 = regular_drift(prob, path, t + 0.5 * h, tmp);
    for (std::size_t k = 0; k < K; ++k) tmp[k] = E[k] * y[k] + h * E2[k] * k3[k];
    const auto k4 = regular_drift(prob, path, t + h, tmp);
    std::vector<double> next(K);
    for (std::size_t k = 0; k < K; ++k) {
      next[k] = E[k] * y[k] + h / 6.0 * (E[k] * k1[k] + 2.0 * E2[k] * (k2[k] + k3[k]) + k4[k]);
    }
    out.push_back(std::move(next));
  }
  return out;
}

IdentificationReport regular_identification(const ExperimentConfig& cfg) {
  cfg.validate();
  const Problem prob = build_problem(cfg, cfg.seeds.front());
  const DriverPath& path = prob.driver->path();
  IdentificationReport rep;
  rep.levels = level_list(cfg);
  int j = std::max(cfg.n_max + 2, 8);
  auto ref = classical_solution(prob, path, j);
  for (;;) {
    if (j >= 20) throw ParameterError("classical reference did not converge to 1e-8");
    auto finer = classical_solution(prob, path, j + 1);
    const double diff = grid_gap(*prob.basis, cfg.gamma_prime, finer, j + 1, ref, j);
    ref = std::move(finer);
    ++j;
    if (diff <= 1e-8) {
      rep.reference_self_difference = diff;
      break;
    }
  }
  rep.reference_level = j;
  for (int n : rep.levels) {
    rep.gaps.push_back(grid_gap(*prob.basis, cfg.gamma_prime, ref, j, all_states(solve(prob, n)), n));
  }
  return rep;
}

std::vector<double> exponential_euler(const Problem& prob, const DriverPath& path) {
  const SpectralBasis& b = *prob.basis;
  const auto d = b.decay(path.step());
  auto y = b.coefficients_of(prob.psi);
  const int m = prob.f.channels();
  std::vector<double> inc;
  for (std::int64_t j = 0; j < path.steps(); ++j) {
    if (!prob.f.is_zero()) {
      const auto grid = b.to_grid(y);
      inc.assign(grid.size(), 0.0);
      for (int i = 0; i < m; ++i) {
        const auto x = path.samples(i);
        const double dx = x[static_cast<std::size_t>(j + 1)] - x[static_cast<std::size_t>(j)];
        for (std::size_t q = 0; q < grid.size(); ++q) inc[q] += prob.f[i].value(grid[q]) * dx;
      }
      const auto c = b.to_spectral(inc);
      for (std::size_t k = 0; k < y.size(); ++k) y[k] += c[k];
    }
    for (std::size_t k = 0; k < y.size(); ++k) y[k] *= d[k];
  }
  return y;
}

ItoReport ito_compare(const ExperimentConfig& cfg) {
  cfg.validate();
  if (!(cfg.driver.kind == "fbm" && cfg.driver.hurst == 0.5)) {
    throw ParameterError("Ito comparison requires a Brownian driver (hurst 0.5)");
  }
  ItoReport rep;
  rep.levels = level_list(cfg);
  rep.seeds = cfg.seeds;
  rep.reference_level = cfg.fine_level();
  struct Row {
    std::vector<double> sq, shift;
  };
  const auto rows = parallel_map<Row>(cfg.seeds.size(), [&](std::size_t s) {
    const auto basis = build_basis(cfg);
    const auto path = build_path(cfg, cfg.seeds[s]);
    const Field psi = build_psi(cfg, *basis);
    const auto ito = std::make_shared<const EnhancedDriver>(enhance_ito(path));
    const auto geo = std::make_shared<const EnhancedDriver>(enhance_geometric(path));
    const Problem pi = build_problem(cfg, basis, ito, psi);
    const Problem pg = build_problem(cfg, basis, geo, psi);
    const auto ref = exponential_euler(pi, *path);
    Row row;
    for (int n : rep.levels) {
      const auto yi = solve(pi, n);
      const auto yg = solve(pg, n);
      const auto& end = yi.at(yi.steps());
      const double g = state_norm(*basis, cfg.gamma_prime, difference(end, ref));
      row.sq.push_back(g * g);
      row.shift.push_back(state_norm(*basis, cfg.gamma_prime, difference(end, yg.at(yg.steps()))));
    }
    return row;
  });
  const auto L = rep.levels.size();
  rep.mean_square_gap.assign(L, 0.0);
  rep.geometric_shift.assign(L, 0.0);
  for (const auto& r : rows) {
    for (std::size_t l = 0; l < L; ++l) {
      rep.mean_square_gap[l] += r.sq[l] / static_cast<double>(rows.size());
      rep.geometric_shift[l] += r.shift[l] / static_cast<double>(rows.size());
    }
  }
  return rep;
}

}  // namespace roughheat
