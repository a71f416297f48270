#include "roughheat/operator_path.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>

#include "roughheat/error.hpp"
#include "roughheat/kernels.hpp"

namespace roughheat {
namespace {

// m_j(z) = int_0^1 z exp(-z rho) rho^j d rho, j = 0, 1, 2.
struct Moments {
  double m0, m1, m2;
};

Moments exp_moments(double z) {
  if (z < 1.0) {
    // z sum_n (-z)^n / (n! (n + j + 1))
    Moments m{0.0, 0.0, 0.0};
    double term = z;  // z (-z)^n / n!
    for (int n = 0; n < 40; ++n) {
      m.m0 += term / (n + 1);
      m.m1 += term / (n + 2);
      m.m2 += term / (n + 3);
      term *= -z / (n + 1);
      if (std::abs(term) < 1e-300) break;
    }
    return m;
  }
  const double e = std::exp(-z);
  return {-std::expm1(-z), (1.0 - e * (1.0 + z)) / z, (2.0 - e * (z * z + 2.0 * z + 2.0)) / (z * z)};
}

void check_pair(std::int64_t s, std::int64_t t, std::int64_t n) {
  if (!(0 <= s && s < t && t <= n)) throw ParameterError("operator pair requires 0 <= s < t <= 1");
}

}  // namespace

ExpQuadratureWeights exp_quadrature_weights(std::span<const double> eigenvalues, double h) {
  ExpQuadratureWeights w;
  const std::size_t K = eigenvalues.size();
  w.decay.resize(K);
  w.right.resize(K);
  w.mid.resize(K);
  w.left.resize(K);
  for (std::size_t k = 0; k < K; ++k) {
    const double z = eigenvalues[k] * h;
    const Moments m = exp_moments(z);
    w.decay[k] = std::exp(-z);
    w.right[k] = 2.0 * m.m2 - 3.0 * m.m1 + m.m0;
    w.mid[k] = 4.0 * (m.m1 - m.m2);
    w.left[k] = 2.0 * m.m2 - m.m1;
  }
  return w;
}

Field ModeDiagonalOperator::apply(const SpectralBasis& basis, const Field& phi) const {
  const auto c = basis.coefficients_of(phi);
  if (c.size() != multipliers.size()) throw ShapeError("operator / field mode count mismatch");
  std::vector<double> out(c.size());
  kernels::active().scale_diag(c.size(), out.data(), multipliers.data(), c.data());
  return Field::from_coefficients(std::move(out));
}

void ModeDiagonalOperator::accumulate(std::span<const double> in, std::span<double> out) const {
  if (in.size() != multipliers.size() || out.size() != multipliers.size()) {
    throw ShapeError("operator / coefficient length mismatch");
  }
  kernels::active().accumulate_diag(in.size(), out.data(), multipliers.data(), in.data());
}

ConvRoughPath::ConvRoughPath(BasisPtr basis, DriverPtr driver, int quad_offset)
    : basis_(std::move(basis)), driver_(std::move(driver)), quad_offset_(quad_offset) {
  if (!basis_ || !driver_) throw ParameterError("null basis or driver");
  if (quad_offset_ < 0 || quad_level() > 30) throw ParameterError("quadrature offset out of range");
  weights_ = exp_quadrature_weights(basis_->eigenvalues(), std::ldexp(1.0, -quad_level()));
}

OperatorSet ConvRoughPath::build(std::int64_t s_index, std::int64_t t_index) const {
  const EnhancedDriver& drv = *driver_;
  const std::int64_t nfine = std::int64_t{1} << drv.fine_level();
  check_pair(s_index, t_index, nfine);
  const int m = drv.channels();
  const std::size_t K = static_cast<std::size_t>(basis_->modes());
  const int qlev = quad_level();
  const double s = std::ldexp(static_cast<double>(s_index), -drv.fine_level());
  const double t = std::ldexp(static_cast<double>(t_index), -drv.fine_level());
  const std::int64_t L = (t_index - s_index) << quad_offset_;
  const double hq = std::ldexp(1.0, -qlev);

  // Node values at u_n = t - n hq/2, n = 0..2L (even n: subinterval ends, odd: midpoints).
  const std::size_t nodes = static_cast<std::size_t>(2 * L + 1);
  std::vector<double> times(nodes);
  for (std::size_t n = 0; n < nodes; ++n) times[n] = t - 0.5 * hq * static_cast<double>(n);
  times.back() = s;
  std::vector<std::vector<double>> xval(static_cast<std::size_t>(m), std::vector<double>(nodes));
  std::vector<double> xt(static_cast<std::size_t>(m)), xs(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) {
    auto& xv = xval[static_cast<std::size_t>(i)];
    for (std::size_t n = 0; n < nodes; ++n) xv[n] = drv.value(i, times[n]);
    xt[static_cast<std::size_t>(i)] = xv.front();
    xs[static_cast<std::size_t>(i)] = xv.back();
  }

  const auto decay_full = basis_->decay(t - s);
  const kernels::KernelTable& kt = kernels::active();
  const kernels::SweepWeights sw{weights_.decay.data(), weights_.right.data(), weights_.mid.data(),
                                 weights_.left.data()};
  std::vector<double> acc(K), env(K);

  auto sweep = [&](const std::vector<double>& g) {
    std::fill(acc.begin(), acc.end(), 0.0);
    std::fill(env.begin(), env.end(), 1.0);
    for (std::int64_t l = 0; l < L; ++l) {
      const auto n = static_cast<std::size_t>(2 * l);
      kt.exp_sweep(K, acc.data(), env.data(), sw, g[n], g[n + 1], g[n + 2]);
    }
  };

  auto make_op = [&](std::vector<double> mult) {
    ModeDiagonalOperator op;
    op.multipliers = std::move(mult);
    op.s_index = s_index;
    op.t_index = t_index;
    op.quad_level = qlev;
    return op;
  };

  OperatorSet set;
  set.x.reserve(static_cast<std::size_t>(m));
  set.ax.reserve(static_cast<std::size_t>(m));
  set.xx.reserve(static_cast<std::size_t>(m * m));
  std::vector<double> g(nodes);
  for (int i = 0; i < m; ++i) {
    const auto& xv = xval[static_cast<std::size_t>(i)];
    const double xti = xt[static_cast<std::size_t>(i)];
    for (std::size_t n = 0; n < nodes; ++n) g[n] = xti - xv[n];
    sweep(g);
    const double dx = g.back();
    std::vector<double> mx(K), max(K);
    for (std::size_t k = 0; k < K; ++k) {
      mx[k] = decay_full[k] * dx + acc[k];
      max[k] = (decay_full[k] - 1.0) * dx + acc[k];
    }
    set.x.push_back(make_op(std::move(mx)));
    set.ax.push_back(make_op(std::move(max)));
  }
  for (int i = 0; i < m; ++i) {
    const auto& xi = xval[static_cast<std::size_t>(i)];
    const double xti = xt[static_cast<std::size_t>(i)];
    for (int j = 0; j < m; ++j) {
      const auto& xj = xval[static_cast<std::size_t>(j)];
      const double xsj = xs[static_cast<std::size_t>(j)];
      for (std::size_t n = 0; n < nodes; ++n) {
        const double u = times[n];
        g[n] = drv.area(i, j, u, t) + (xti - xi[n]) * (xj[n] - xsj);
      }
      sweep(g);
      const double area_ts = drv.area(i, j, s, t);
      std::vector<double> mxx(K);
      for (std::size_t k = 0; k < K; ++k) mxx[k] = decay_full[k] * area_ts + acc[k];
      set.xx.push_back(make_op(std::move(mxx)));
    }
  }
  return set;
}

std::shared_ptr<const OperatorSet> ConvRoughPath::operators(std::int64_t s_index,
                                                            std::int64_t t_index) const {
  const auto key = std::make_pair(s_index, t_index);
  {
    std::shared_lock lock(cache_mutex_);
    if (auto it = cache_.find(key); it != cache_.end()) return it->second;
  }
  auto built = std::make_shared<const OperatorSet>(build(s_index, t_index));
  std::unique_lock lock(cache_mutex_);
  auto [it, inserted] = cache_.emplace(key, std::move(built));
  return it->second;
}

std::shared_ptr<const OperatorSet> ConvRoughPath::operators_at(double s, double t) const {
  const int lvl = driver_->fine_level();
  return operators(dyadic_index(s, lvl), dyadic_index(t, lvl));
}

ModeDiagonalOperator ConvRoughPath::build_Xx(int i, double s, double t) const {
  return operators_at(s, t)->x.at(static_cast<std::size_t>(i));
}

ModeDiagonalOperator ConvRoughPath::build_Xax(int i, double s, double t) const {
  return operators_at(s, t)->ax.at(static_cast<std::size_t>(i));
}

ModeDiagonalOperator ConvRoughPath::build_Xxx(int i, int j, double s, double t) const {
  const int m = driver_->channels();
  if (i < 0 || j < 0 || i >= m || j >= m) throw ParameterError("channel index out of range");
  return operators_at(s, t)->xx.at(static_cast<std::size_t>(i * m + j));
}

std::size_t ConvRoughPath::cache_size() const {
  std::shared_lock lock(cache_mutex_);
  return cache_.size();
}

void ConvRoughPath::clear_cache() const {
  std::unique_lock lock(cache_mutex_);
  cache_.clear();
}

namespace {

void check_triple(double s, double u, double t) {
  if (!(s <= u && u <= t)) throw ParameterError("cochain defect requires s <= u <= t");
}

// Multipliers of the operator over [a, b]; the zero operator when a == b.
std::vector<double> multipliers_or_zero(const ConvRoughPath& crp, OperatorKind kind, int i, int j,
                                        double a, double b) {
  if (a == b) return std::vector<double>(static_cast<std::size_t>(crp.basis().modes()), 0.0);
  switch (kind) {
    case OperatorKind::x:
      return crp.build_Xx(i, a, b).multipliers;
    case OperatorKind::ax:
      return crp.build_Xax(i, a, b).multipliers;
    case OperatorKind::xx:
      return crp.build_Xxx(i, j, a, b).multipliers;
  }
  return {};
}

}  // namespace

double cochain_defect_x(const ConvRoughPath& crp, int i, double s, double u, double t) {
  check_triple(s, u, t);
  if (s == t) return 0.0;
  const auto ts = multipliers_or_zero(crp, OperatorKind::x, i, 0, s, t);
  const auto tu = multipliers_or_zero(crp, OperatorKind::x, i, 0, u, t);
  const auto us = multipliers_or_zero(crp, OperatorKind::x, i, 0, s, u);
  const auto d = crp.basis().decay(t - u);
  double worst = 0.0;
  for (std::size_t k = 0; k < ts.size(); ++k) worst = std::max(worst, std::abs(ts[k] - tu[k] - d[k] * us[k]));
  return worst;
}

double cochain_defect_xx(const ConvRoughPath& crp, int i, int j, double s, double u, double t) {
  check_triple(s, u, t);
  if (s == t) return 0.0;
  const auto ts = multipliers_or_zero(crp, OperatorKind::xx, i, j, s, t);
  const auto tu = multipliers_or_zero(crp, OperatorKind::xx, i, j, u, t);
  const auto us = multipliers_or_zero(crp, OperatorKind::xx, i, j, s, u);
  const auto xtu = multipliers_or_zero(crp, OperatorKind::x, i, 0, u, t);
  const double dxj = crp.driver().increment(j, s, u);
  const auto d = crp.basis().decay(t - u);
  double worst = 0.0;
  for (std::size_t k = 0; k < ts.size(); ++k) {
    worst = std::max(worst, std::abs(ts[k] - tu[k] - d[k] * us[k] - xtu[k] * dxj));
  }
  return worst;
}

ModeDiagonalOperator oracle_regular_Xx(const SpectralBasis& basis, const DriverPath& path, int i,
                                       double s, double t, int level) {
  if (!path.has_closed_form()) throw ParameterError("oracle needs a driver with closed-form derivative");
  const std::int64_t si = dyadic_index(s, level);
  const std::int64_t ti = dyadic_index(t, level);
  if (si >= ti) throw ParameterError("oracle requires s < t");
  const double h = std::ldexp(1.0, -level);
  const auto lam = basis.eigenvalues();
  const std::size_t K = lam.size();

  // nu_j = int_0^1 exp(-z rho) rho^j d rho
  std::vector<double> wr(K), wm(K), wl(K);
  for (std::size_t k = 0; k < K; ++k) {
    const double z = lam[k] * h;
    double nu0, nu1, nu2;
    if (z < 0.5) {
      nu0 = nu1 = nu2 = 0.0;
      double term = 1.0;
      for (int n = 0; n < 40; ++n) {
        nu0 += term / (n + 1);
        nu1 += term / (n + 2);
        nu2 += term / (n + 3);
        term *= -z / (n + 1);
      }
    } else {
      const double e = std::exp(-z);
      nu0 = (1.0 - e) / z;
      nu1 = (nu0 - e) / z;
      nu2 = (2.0 * nu1 - e) / z;
    }
    wr[k] = h * (2.0 * nu2 - 3.0 * nu1 + nu0);
    wm[k] = h * 4.0 * (nu1 - nu2);
    wl[k] = h * (2.0 * nu2 - nu1);
  }

  ModeDiagonalOperator op;
  op.multipliers.assign(K, 0.0);
  op.quad_level = level;
  for (std::int64_t b = ti; b > si; --b) {
    const double ub = static_cast<double>(b) * h;
    const double ua = ub - h;
    const double fb = path.exact_derivative(i, ub);
    const double fm = path.exact_derivative(i, ua + 0.5 * h);
    const double fa = path.exact_derivative(i, ua);
    for (std::size_t k = 0; k < K; ++k) {
      const double e = std::exp(-lam[k] * (t - ub));
      op.multipliers[k] += e * (wr[k] * fb + wm[k] * fm + wl[k] * fa);
    }
  }
  return op;
}

double operator_holder_norm(const ConvRoughPath& crp, OperatorKind kind, double gamma, double alpha,
                            double kappa, int coarse_level) {
  if (!(gamma > 1.0 / 3.0 && gamma < 0.5)) throw ParameterError("gamma must lie in (1/3, 1/2)");
  if (!(alpha > 0.0 && alpha < 1.0)) throw ParameterError("alpha must lie in (0, 1)");
  if (!(kappa >= 0.0 && kappa < gamma)) throw ParameterError("kappa must lie in [0, gamma)");
  const int fine = crp.driver().fine_level();
  if (coarse_level < 0 || coarse_level > fine) throw ParameterError("coarse level out of range");
  const auto lam = crp.basis().eigenvalues();
  double exponent = 0.0;
  switch (kind) {
    case OperatorKind::x: exponent = gamma - kappa; break;
    case OperatorKind::ax: exponent = gamma + alpha; break;
    case OperatorKind::xx: exponent = 2.0 * gamma - kappa; break;
  }
  double best = 0.0;
  for (int j = 0; j <= coarse_level; ++j) {
    const std::int64_t span = std::int64_t{1} << (fine - j);
    const double tau = std::ldexp(1.0, -j);
    const double denom = std::pow(tau, exponent);
    for (std::int64_t a = 0; a < (std::int64_t{1} << j); ++a) {
      const auto set = crp.operators(a * span, (a + 1) * span);
      const std::vector<ModeDiagonalOperator>& ops =
          kind == OperatorKind::x ? set->x : (kind == OperatorKind::ax ? set->ax : set->xx);
      for (const auto& op : ops) {
        for (std::size_t k = 0; k < lam.size(); ++k) {
          double v = std::abs(op.multipliers[k]);
          if (v == 0.0) continue;
          v *= kind == OperatorKind::ax ? std::pow(lam[k], -alpha) : std::pow(lam[k], kappa);
          best = std::max(best, v / denom);
        }
      }
    }
  }
  return best;
}

}  // namespace roughheat
