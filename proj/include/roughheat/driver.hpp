#pragma once
// Driving signals and their second-order enhancement (x, XX).
//
// Area convention: XX^{ij}_{ts} = int_s^t dx^i_u (x^j_u - x^j_s), so that the
// Chen relation reads XX_ts - XX_tu - XX_us = dx_tu (x) dx_us with entry
// (i,j) = (x^i_t - x^i_u)(x^j_u - x^j_s).

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace roughheat {

enum class FbmMethod { circulant, cholesky };

struct FbmSpec {
  double hurst = 0.5;
  std::uint64_t seed = 0;
  FbmMethod method = FbmMethod::circulant;  // method actually used
};
struct LinearSpec {
  std::vector<double> slopes;
};
/// x^i(t) = amplitude_i * sin(2 pi frequency_i t).
struct SinusoidSpec {
  std::vector<double> amplitudes;
  std::vector<double> frequencies;
};
/// Samples read from a file or derived from another path; no closed form.
struct SampledSpec {
  std::string origin;
};
using DriverSpec = std::variant<FbmSpec, LinearSpec, SinusoidSpec, SampledSpec>;

class DriverPath {
 public:
  /// samples[ch] holds x^ch(j 2^{-fine_level}), j = 0..2^{fine_level}.
  DriverPath(int fine_level, std::vector<std::vector<double>> samples, DriverSpec spec);

  int channels() const noexcept { return static_cast<int>(samples_.size()); }
  int fine_level() const noexcept { return fine_level_; }
  std::int64_t steps() const noexcept { return std::int64_t{1} << fine_level_; }
  double step() const noexcept { return 1.0 / static_cast<double>(steps()); }
  std::span<const double> samples(int ch) const { return samples_.at(static_cast<std::size_t>(ch)); }
  const DriverSpec& spec() const noexcept { return spec_; }
  std::string descriptor() const;

  /// Piecewise-linear interpolation of the samples.
  double interpolate(int ch, double t) const;

  /// Closed-form values are available for linear and sinusoid drivers.
  bool has_closed_form() const noexcept;
  double exact_value(int ch, double t) const;
  double exact_derivative(int ch, double t) const;
  /// Geometric iterated integral of the smooth path.
  double exact_area(int i, int j, double s, double t) const;

 private:
  int fine_level_;
  std::vector<std::vector<double>> samples_;
  DriverSpec spec_;
};

using PathPtr = std::shared_ptr<const DriverPath>;

/// m independent fBm channels with Hurst index H in (1/3, 1], sampled on the
/// dyadic grid of level fine_level <= 22 by circulant embedding of the
/// fractional Gaussian noise covariance. Falls back to (or, on request, uses)
/// a dense Cholesky factorisation; FbmSpec::method records which one ran.
DriverPath sample_fbm(double hurst, int channels, int fine_level, std::uint64_t seed,
                      FbmMethod preferred = FbmMethod::circulant);

DriverPath make_linear(std::vector<double> slopes, int fine_level);
DriverPath make_sinusoid(std::vector<double> amplitudes, std::vector<double> frequencies,
                         int fine_level);
/// kind = "linear" (params: one slope, or one per channel) or "sinusoid"
/// (params: amplitude, frequency pairs, or one pair broadcast to all channels).
DriverPath make_deterministic(const std::string& kind, std::span<const double> params,
                              int channels, int fine_level);

/// x + eps * bump on every channel, as a sampled path.
DriverPath perturbed(const DriverPath& base, const std::function<double(double)>& bump, double eps);

enum class Chronology { geometric, ito };
enum class Lift { piecewise_linear, exact };

class EnhancedDriver {
 public:
  EnhancedDriver(PathPtr path, Chronology chronology, Lift lift);

  const DriverPath& path() const noexcept { return *path_; }
  PathPtr path_ptr() const noexcept { return path_; }
  int channels() const noexcept { return path_->channels(); }
  int fine_level() const noexcept { return path_->fine_level(); }
  Chronology chronology() const noexcept { return chronology_; }
  Lift lift() const noexcept { return lift_; }

  double value(int ch, double t) const;
  /// x^ch_t - x^ch_s
  double increment(int ch, double s, double t) const;
  /// XX^{ij}_{ts} for s <= t, any real times in [0,1].
  double area(int i, int j, double s, double t) const;
  /// Row-major m x m matrix XX_{ts}.
  std::vector<double> area_matrix(double s, double t) const;

 private:
  double prefix_area(int i, int j, double t) const;

  PathPtr path_;
  Chronology chronology_;
  Lift lift_;
  // prefix_[(i*m + j)*(N+1) + n] = XX^{ij}_{t_n, 0} of the interpolant, i != j
  std::vector<double> prefix_;
};

using DriverPtr = std::shared_ptr<const EnhancedDriver>;

EnhancedDriver enhance_geometric(PathPtr path, Lift lift = Lift::piecewise_linear);
/// Brownian paths only (fbm with H = 1/2): geometric area minus (t-s)/2 on the diagonal.
EnhancedDriver enhance_ito(PathPtr path);

/// Index of t on the dyadic grid of the given level; throws DyadicError otherwise.
std::int64_t dyadic_index(double t, int level);

/// XX_ts - XX_tu - XX_us - dx_tu (x) dx_us for dyadic s <= u <= t (row-major m x m).
std::vector<double> chen_defect(const EnhancedDriver& e, double s, double u, double t);

struct HolderNorms {
  double path = 0.0;   // sup |dx_ts| / (t-s)^gamma
  double area = 0.0;   // sup |XX_ts| / (t-s)^{2 gamma}
  double total = 0.0;  // path + area
};

/// Suprema over all pairs of the coarse dyadic grid (Euclidean / Frobenius norms).
HolderNorms holder_norms(const EnhancedDriver& e, double gamma, int coarse_level);

/// ||x - y||_gamma + ||XX - YY||_{2 gamma} by the same estimator.
double driver_distance(const EnhancedDriver& a, const EnhancedDriver& b, double gamma,
                       int coarse_level);

}  // namespace roughheat
