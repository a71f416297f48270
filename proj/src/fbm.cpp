// Fractional Brownian motion on a dyadic grid.
//
// Increments over steps of length h form fractional Gaussian noise with
// autocovariance h^{2H} rho(k), rho(k) = (|k+1|^{2H} - 2|k|^{2H} + |k-1|^{2H})/2.
// The stationary covariance is embedded in a circulant of size 2N whose
// eigenvalues come from one FFT; a complex Gaussian vector scaled by their
// square roots and transformed once more has a real part with the target law.

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <mutex>
#include <random>

#include "roughheat/driver.hpp"
#include "roughheat/error.hpp"

namespace roughheat {
namespace {

// FFTW planning is not thread-safe.
std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

double fgn_autocov(double hurst, std::int64_t k) {
  const double h2 = 2.0 * hurst;
  const auto a = static_cast<double>(std::llabs(k));
  return 0.5 * (std::pow(a + 1.0, h2) - 2.0 * std::pow(a, h2) + std::pow(std::abs(a - 1.0), h2));
}

class FftBuffer {
 public:
  explicit FftBuffer(std::size_t n) : n_(n) {
    data_ = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n));
    if (data_ == nullptr) throw std::bad_alloc();
    std::lock_guard lock(fftw_planner_mutex());
    plan_ = fftw_plan_dft_1d(static_cast<int>(n), data_, data_, FFTW_FORWARD, FFTW_ESTIMATE);
  }
  ~FftBuffer() {
    {
      std::lock_guard lock(fftw_planner_mutex());
      fftw_destroy_plan(plan_);
    }
    fftw_free(data_);
  }
  FftBuffer(const FftBuffer&) = delete;
  FftBuffer& operator=(const FftBuffer&) = delete;

  fftw_complex* data() { return data_; }
  std::size_t size() const { return n_; }
  void execute() { fftw_execute(plan_); }

 private:
  std::size_t n_;
  fftw_complex* data_ = nullptr;
  fftw_plan plan_ = nullptr;
};

// Eigenvalues of the circulant embedding; empty when it is not positive semi-definite.
std::vector<double> circulant_eigenvalues(double hurst, std::int64_t n, FftBuffer& fft) {
  const auto M = static_cast<std::int64_t>(fft.size());
  auto* d = fft.data();
  for (std::int64_t j = 0; j < M; ++j) {
    const std::int64_t k = j <= n ? j : M - j;
    d[j][0] = fgn_autocov(hurst, k);
    d[j][1] = 0.0;
  }
  fft.execute();
  std::vector<double> lam(static_cast<std::size_t>(M));
  double lmax = 0.0;
  for (std::int64_t j = 0; j < M; ++j) {
    lam[static_cast<std::size_t>(j)] = d[j][0];
    lmax = std::max(lmax, std::abs(d[j][0]));
  }
  for (double& l : lam) {
    if (l < -1e-10 * lmax) return {};
    l = std::max(l, 0.0);
  }
  return lam;
}

std::vector<double> cholesky_factor(double hurst, std::int64_t n) {
  const auto N = static_cast<std::size_t>(n);
  std::vector<double> L(N * N, 0.0);
  for (std::size_t i = 0; i < N; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      double s = fgn_autocov(hurst, static_cast<std::int64_t>(i) - static_cast<std::int64_t>(j));
      for (std::size_t k = 0; k < j; ++k) s -= L[i * N + k] * L[j * N + k];
      if (i == j) {
        if (s <= 0.0) throw ParameterError("fGn covariance is not positive definite");
        L[i * N + i] = std::sqrt(s);
      } else {
        L[i * N + j] = s / L[j * N + j];
      }
    }
  }
  return L;
}

}  // namespace

DriverPath sample_fbm(double hurst, int channels, int fine_level, std::uint64_t seed,
                      FbmMethod preferred) {
  if (!(hurst > 1.0 / 3.0 && hurst <= 1.0)) throw ParameterError("Hurst index must lie in (1/3, 1]");
  if (channels < 1) throw ParameterError("channel count must be >= 1");
  if (fine_level < 0 || fine_level > 22) throw ParameterError("fine level must lie in [0, 22]");

  const std::int64_t n = std::int64_t{1} << fine_level;
  const double scale = std::pow(1.0 / static_cast<double>(n), hurst);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<std::vector<double>> samples(static_cast<std::size_t>(channels),
                                           std::vector<double>(static_cast<std::size_t>(n + 1), 0.0));

  FbmMethod used = preferred;
  std::vector<double> lam;
  std::unique_ptr<FftBuffer> fft;
  if (preferred == FbmMethod::circulant) {
    fft = std::make_unique<FftBuffer>(static_cast<std::size_t>(2 * n));
    lam = circulant_eigenvalues(hurst, n, *fft);
    if (lam.empty()) used = FbmMethod::cholesky;
  }
  std::vector<double> chol;
  if (used == FbmMethod::cholesky) {
    if (n > 4096) throw ParameterError("dense fGn factorisation limited to fine level <= 12");
    chol = cholesky_factor(hurst, n);
  }

  std::vector<double> incr(static_cast<std::size_t>(n));
  for (auto& x : samples) {
    if (used == FbmMethod::circulant) {
      const auto M = static_cast<double>(2 * n);
      auto* d = fft->data();
      for (std::size_t k = 0; k < fft->size(); ++k) {
        const double a = std::sqrt(lam[k] / M);
        d[k][0] = a * normal(rng);
        d[k][1] = a * normal(rng);
      }
      fft->execute();
      for (std::size_t k = 0; k < incr.size(); ++k) incr[k] = d[k][0];
    } else {
      std::vector<double> z(incr.size());
      for (double& v : z) v = normal(rng);
      const std::size_t N = incr.size();
      for (std::size_t i = 0; i < N; ++i) {
        double s = 0.0;
        for (std::size_t k = 0; k <= i; ++k) s += chol[i * N + k] * z[k];
        incr[i] = s;
      }
    }
    double acc = 0.0;
    for (std::size_t k = 0; k < incr.size(); ++k) {
      acc += scale * incr[k];
      x[k + 1] = acc;
    }
  }
  return DriverPath(fine_level, std::move(samples), FbmSpec{hurst, seed, used});
}

}  // namespace roughheat
