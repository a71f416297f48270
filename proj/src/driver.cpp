#include "roughheat/driver.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "roughheat/error.hpp"

namespace roughheat {
namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

// int_s^t sin(a v) dv
double sin_integral(double a, double s, double t) {
  if (a == 0.0) return 0.0;
  return 2.0 * std::sin(0.5 * a * (t + s)) * std::sin(0.5 * a * (t - s)) / a;
}

}  // namespace

DriverPath::DriverPath(int fine_level, std::vector<std::vector<double>> samples, DriverSpec spec)
    : fine_level_(fine_level), samples_(std::move(samples)), spec_(std::move(spec)) {
  if (fine_level_ < 0 || fine_level_ > 30) throw ParameterError("fine level out of range");
  if (samples_.empty()) throw ParameterError("driver needs at least one channel");
  const auto n = static_cast<std::size_t>(steps() + 1);
  for (const auto& ch : samples_) {
    if (ch.size() != n) {
      throw ShapeError("channel has " + std::to_string(ch.size()) + " samples, expected " +
                       std::to_string(n));
    }
    if (ch.front() != 0.0) throw ParameterError("driver channels must start at 0");
  }
}

std::string DriverPath::descriptor() const {
  std::ostringstream os;
  os.precision(17);
  std::visit(overloaded{
                 [&](const FbmSpec& f) {
                   os << "fbm(H=" << f.hurst << ",seed=" << f.seed << ",method="
                      << (f.method == FbmMethod::circulant ? "circulant" : "cholesky") << ")";
                 },
                 [&](const LinearSpec& l) {
                   os << "linear(slopes=";
                   for (std::size_t i = 0; i < l.slopes.size(); ++i) os << (i ? ";" : "") << l.slopes[i];
                   os << ")";
                 },
                 [&](const SinusoidSpec& s) {
                   os << "sinusoid(";
                   for (std::size_t i = 0; i < s.amplitudes.size(); ++i) {
                     os << (i ? ";" : "") << s.amplitudes[i] << "*sin(2pi*" << s.frequencies[i] << "t)";
                   }
                   os << ")";
                 },
                 [&](const SampledSpec& s) { os << "sampled(" << s.origin << ")"; },
             },
             spec_);
  os << ",m=" << channels() << ",nf=" << fine_level_;
  return os.str();
}

double DriverPath::interpolate(int ch, double t) const {
  const auto& x = samples_.at(static_cast<std::size_t>(ch));
  const double pos = t * static_cast<double>(steps());
  auto j = static_cast<std::int64_t>(std::floor(pos));
  j = std::clamp<std::int64_t>(j, 0, steps() - 1);
  const double frac = pos - static_cast<double>(j);
  const auto ju = static_cast<std::size_t>(j);
  if (frac == 0.0) return x[ju];
  return x[ju] + frac * (x[ju + 1] - x[ju]);
}

bool DriverPath::has_closed_form() const noexcept {
  return std::holds_alternative<LinearSpec>(spec_) || std::holds_alternative<SinusoidSpec>(spec_);
}

double DriverPath::exact_value(int ch, double t) const {
  const auto c = static_cast<std::size_t>(ch);
  if (const auto* l = std::get_if<LinearSpec>(&spec_)) return l->slopes.at(c) * t;
  if (const auto* s = std::get_if<SinusoidSpec>(&spec_)) {
    return s->amplitudes.at(c) * std::sin(2.0 * std::numbers::pi * s->frequencies.at(c) * t);
  }
  throw ParameterError("driver has no closed form: " + descriptor());
}

double DriverPath::exact_derivative(int ch, double t) const {
  const auto c = static_cast<std::size_t>(ch);
  if (const auto* l = std::get_if<LinearSpec>(&spec_)) return l->slopes.at(c);
  if (const auto* s = std::get_if<SinusoidSpec>(&spec_)) {
    const double w = 2.0 * std::numbers::pi * s->frequencies.at(c);
    return s->amplitudes.at(c) * w * std::cos(w * t);
  }
  throw ParameterError("driver has no closed-form derivative: " + descriptor());
}

double DriverPath::exact_area(int i, int j, double s, double t) const {
  if (i == j) {
    const double d = exact_value(i, t) - exact_value(i, s);
    return 0.5 * d * d;
  }
  if (const auto* l = std::get_if<LinearSpec>(&spec_)) {
    const double tau = t - s;
    return 0.5 * l->slopes.at(static_cast<std::size_t>(i)) *
           l->slopes.at(static_cast<std::size_t>(j)) * tau * tau;
  }
  if (const auto* sp = std::get_if<SinusoidSpec>(&spec_)) {
    const auto ii = static_cast<std::size_t>(i);
    const auto jj = static_cast<std::size_t>(j);
    const double wi = 2.0 * std::numbers::pi * sp->frequencies.at(ii);
    const double wj = 2.0 * std::numbers::pi * sp->frequencies.at(jj);
    // int_s^t x^j_v dx^i_v with sin(wj v) cos(wi v) = [sin((wj+wi)v) + sin((wj-wi)v)]/2
    const double coef = 0.5 * sp->amplitudes[ii] * sp->amplitudes[jj] * wi;
    const double integral = coef * (sin_integral(wj + wi, s, t) + sin_integral(wj - wi, s, t));
    return integral - exact_value(j, s) * (exact_value(i, t) - exact_value(i, s));
  }
  throw ParameterError("driver has no closed-form area: " + descriptor());
}

DriverPath make_linear(std::vector<double> slopes, int fine_level) {
  if (slopes.empty()) throw ParameterError("linear driver needs at least one channel");
  const std::int64_t n = std::int64_t{1} << fine_level;
  std::vector<std::vector<double>> samples(slopes.size());
  for (std::size_t c = 0; c < slopes.size(); ++c) {
    samples[c].resize(static_cast<std::size_t>(n + 1));
    for (std::int64_t j = 0; j <= n; ++j) {
      samples[c][static_cast<std::size_t>(j)] = slopes[c] * (static_cast<double>(j) / static_cast<double>(n));
    }
  }
  return DriverPath(fine_level, std::move(samples), LinearSpec{std::move(slopes)});
}

DriverPath make_sinusoid(std::vector<double> amplitudes, std::vector<double> frequencies,
                         int fine_level) {
  if (amplitudes.empty() || amplitudes.size() != frequencies.size()) {
    throw ParameterError("sinusoid driver needs matching amplitude and frequency lists");
  }
  SinusoidSpec spec{std::move(amplitudes), std::move(frequencies)};
  const std::int64_t n = std::int64_t{1} << fine_level;
  std::vector<std::vector<double>> samples(spec.amplitudes.size());
  for (std::size_t c = 0; c < samples.size(); ++c) {
    samples[c].resize(static_cast<std::size_t>(n + 1));
    const double w = 2.0 * std::numbers::pi * spec.frequencies[c];
    for (std::int64_t j = 0; j <= n; ++j) {
      const double t = static_cast<double>(j) / static_cast<double>(n);
      samples[c][static_cast<std::size_t>(j)] = spec.amplitudes[c] * std::sin(w * t);
    }
    samples[c][0] = 0.0;
  }
  return DriverPath(fine_level, std::move(samples), std::move(spec));
}

DriverPath make_deterministic(const std::string& kind, std::span<const double> params,
                              int channels, int fine_level) {
  if (channels < 1) throw ParameterError("channel count must be >= 1");
  const auto m = static_cast<std::size_t>(channels);
  if (kind == "linear") {
    if (params.size() != 1 && params.size() != m) throw ParameterError("linear: need 1 or m slopes");
    std::vector<double> slopes(m);
    for (std::size_t c = 0; c < m; ++c) slopes[c] = params[params.size() == 1 ? 0 : c];
    return make_linear(std::move(slopes), fine_level);
  }
  if (kind == "sinusoid") {
    if (params.size() != 2 && params.size() != 2 * m) {
      throw ParameterError("sinusoid: need (amplitude, frequency) once or per channel");
    }
    std::vector<double> amp(m), freq(m);
    for (std::size_t c = 0; c < m; ++c) {
      const std::size_t o = params.size() == 2 ? 0 : 2 * c;
      amp[c] = params[o];
      freq[c] = params[o + 1];
    }
    return make_sinusoid(std::move(amp), std::move(freq), fine_level);
  }
  throw ParameterError("unknown deterministic driver kind '" + kind + "'");
}

DriverPath perturbed(const DriverPath& base, const std::function<double(double)>& bump, double eps) {
  std::vector<std::vector<double>> samples;
  samples.reserve(static_cast<std::size_t>(base.channels()));
  const std::int64_t n = base.steps();
  for (int c = 0; c < base.channels(); ++c) {
    auto x = base.samples(c);
    std::vector<double> y(x.begin(), x.end());
    for (std::int64_t j = 1; j <= n; ++j) {
      y[static_cast<std::size_t>(j)] += eps * bump(static_cast<double>(j) / static_cast<double>(n));
    }
    samples.push_back(std::move(y));
  }
  std::ostringstream os;
  os.precision(17);
  os << base.descriptor() << "+" << eps << "*bump";
  return DriverPath(base.fine_level(), std::move(samples), SampledSpec{os.str()});
}

EnhancedDriver::EnhancedDriver(PathPtr path, Chronology chronology, Lift lift)
    : path_(std::move(path)), chronology_(chronology), lift_(lift) {
  if (!path_) throw ParameterError("null driver path");
  if (lift_ == Lift::exact && !path_->has_closed_form()) {
    throw ParameterError("exact lift needs a closed-form driver");
  }
  if (chronology_ == Chronology::ito) {
    const auto* f = std::get_if<FbmSpec>(&path_->spec());
    if (f == nullptr || f->hurst != 0.5) {
      throw ParameterError("Ito enhancement requires a Brownian driver (fbm with H = 1/2)");
    }
    if (lift_ != Lift::piecewise_linear) throw ParameterError("Ito enhancement uses the sampled lift");
  }
  const int m = path_->channels();
  if (lift_ == Lift::piecewise_linear && m > 1) {
    const auto np = static_cast<std::size_t>(path_->steps() + 1);
    prefix_.assign(static_cast<std::size_t>(m * m) * np, 0.0);
    for (int i = 0; i < m; ++i) {
      const auto xi = path_->samples(i);
      for (int j = 0; j < m; ++j) {
        if (i == j) continue;
        const auto xj = path_->samples(j);
        double* p = prefix_.data() + static_cast<std::size_t>(i * m + j) * np;
        for (std::size_t n = 0; n + 1 < np; ++n) {
          const double di = xi[n + 1] - xi[n];
          const double dj = xj[n + 1] - xj[n];
          p[n + 1] = p[n] + 0.5 * di * dj + di * xj[n];
        }
      }
    }
  }
}

double EnhancedDriver::value(int ch, double t) const {
  return lift_ == Lift::exact ? path_->exact_value(ch, t) : path_->interpolate(ch, t);
}

double EnhancedDriver::increment(int ch, double s, double t) const {
  return value(ch, t) - value(ch, s);
}

double EnhancedDriver::prefix_area(int i, int j, double t) const {
  const int m = channels();
  const std::int64_t N = path_->steps();
  const auto np = static_cast<std::size_t>(N + 1);
  const double* p = prefix_.data() + static_cast<std::size_t>(i * m + j) * np;
  const double pos = t * static_cast<double>(N);
  auto n = static_cast<std::int64_t>(std::floor(pos));
  n = std::clamp<std::int64_t>(n, 0, N);
  const auto nu = static_cast<std::size_t>(n);
  if (pos == static_cast<double>(n)) return p[nu];
  const auto xi = path_->samples(i);
  const auto xj = path_->samples(j);
  const double ei = path_->interpolate(i, t) - xi[nu];
  const double ej = path_->interpolate(j, t) - xj[nu];
  return p[nu] + 0.5 * ei * ej + ei * xj[nu];
}

double EnhancedDriver::area(int i, int j, double s, double t) const {
  if (s > t) throw ParameterError("area requires s <= t");
  if (s == t) return 0.0;
  double a;
  if (i == j) {
    const double d = increment(i, s, t);
    a = 0.5 * d * d;
    if (chronology_ == Chronology::ito) a -= 0.5 * (t - s);
    return a;
  }
  if (lift_ == Lift::exact) return path_->exact_area(i, j, s, t);
  // Chen with the origin: XX_ts = XX_t0 - XX_s0 - dx_ts (x) x_s
  return prefix_area(i, j, t) - prefix_area(i, j, s) - increment(i, s, t) * value(j, s);
}

std::vector<double> EnhancedDriver::area_matrix(double s, double t) const {
  const int m = channels();
  std::vector<double> out(static_cast<std::size_t>(m * m));
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) out[static_cast<std::size_t>(i * m + j)] = area(i, j, s, t);
  }
  return out;
}

EnhancedDriver enhance_geometric(PathPtr path, Lift lift) {
  return EnhancedDriver(std::move(path), Chronology::geometric, lift);
}

EnhancedDriver enhance_ito(PathPtr path) {
  return EnhancedDriver(std::move(path), Chronology::ito, Lift::piecewise_linear);
}

std::int64_t dyadic_index(double t, int level) {
  const double scaled = std::ldexp(t, level);
  const double r = std::round(scaled);
  if (!(t >= 0.0 && t <= 1.0) || r != scaled) {
    std::ostringstream os;
    os.precision(17);
    os << "time " << t << " is not on the dyadic grid of level " << level;
    throw DyadicError(os.str());
  }
  return static_cast<std::int64_t>(r);
}

std::vector<double> chen_defect(const EnhancedDriver& e, double s, double u, double t) {
  const int lvl = e.fine_level();
  dyadic_index(s, lvl);
  dyadic_index(u, lvl);
  dyadic_index(t, lvl);
  if (!(s <= u && u <= t)) throw ParameterError("chen_defect requires s <= u <= t");
  const int m = e.channels();
  std::vector<double> out(static_cast<std::size_t>(m * m));
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      out[static_cast<std::size_t>(i * m + j)] = e.area(i, j, s, t) - e.area(i, j, u, t) -
                                                 e.area(i, j, s, u) -
                                                 e.increment(i, u, t) * e.increment(j, s, u);
    }
  }
  return out;
}

namespace {

void check_gamma(double gamma) {
  if (!(gamma > 1.0 / 3.0 && gamma < 0.5)) throw ParameterError("gamma must lie in (1/3, 1/2)");
}

// Visits every pair a < b of the coarse grid with per-channel values and areas.
template <class F>
void for_coarse_pairs(int coarse_level, int fine_level, F&& f) {
  if (coarse_level < 0 || coarse_level > fine_level) {
    throw ParameterError("coarse level must lie in [0, fine level]");
  }
  const std::int64_t n = std::int64_t{1} << coarse_level;
  const double h = 1.0 / static_cast<double>(n);
  for (std::int64_t a = 0; a < n; ++a) {
    for (std::int64_t b = a + 1; b <= n; ++b) {
      f(static_cast<double>(a) * h, static_cast<double>(b) * h);
    }
  }
}

}  // namespace

HolderNorms holder_norms(const EnhancedDriver& e, double gamma, int coarse_level) {
  check_gamma(gamma);
  const int m = e.channels();
  HolderNorms out;
  for_coarse_pairs(coarse_level, e.fine_level(), [&](double s, double t) {
    double px = 0.0, pa = 0.0;
    for (int i = 0; i < m; ++i) {
      const double d = e.increment(i, s, t);
      px += d * d;
      for (int j = 0; j < m; ++j) {
        const double a = e.area(i, j, s, t);
        pa += a * a;
      }
    }
    const double tau = t - s;
    out.path = std::max(out.path, std::sqrt(px) / std::pow(tau, gamma));
    out.area = std::max(out.area, std::sqrt(pa) / std::pow(tau, 2.0 * gamma));
  });
  out.total = out.path + out.area;
  return out;
}

double driver_distance(const EnhancedDriver& a, const EnhancedDriver& b, double gamma,
                       int coarse_level) {
  check_gamma(gamma);
  if (a.channels() != b.channels() || a.fine_level() != b.fine_level()) {
    throw ShapeError("driver distance needs matching channel count and fine level");
  }
  const int m = a.channels();
  double sx = 0.0, sa = 0.0;
  for_coarse_pairs(coarse_level, a.fine_level(), [&](double s, double t) {
    double px = 0.0, pa = 0.0;
    for (int i = 0; i < m; ++i) {
      const double d = a.increment(i, s, t) - b.increment(i, s, t);
      px += d * d;
      for (int j = 0; j < m; ++j) {
        const double q = a.area(i, j, s, t) - b.area(i, j, s, t);
        pa += q * q;
      }
    }
    const double tau = t - s;
    sx = std::max(sx, std::sqrt(px) / std::pow(tau, gamma));
    sa = std::max(sa, std::sqrt(pa) / std::pow(tau, 2.0 * gamma));
  });
  return sx + sa;
}

}  // namespace roughheat
