// AVX2/FMA variants. Compiled with -mavx2 -mfma; only reached through the
// dispatch table after a runtime CPU check.

#include <immintrin.h>

#include "roughheat/kernels.hpp"

namespace roughheat::kernels {
namespace {

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d sh = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, sh));
}

void scale_diag_avx2(std::size_t n, double* y, const double* d, const double* x) {
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    _mm256_storeu_pd(y + k, _mm256_mul_pd(_mm256_loadu_pd(d + k), _mm256_loadu_pd(x + k)));
  }
  for (; k < n; ++k) y[k] = d[k] * x[k];
}

void accumulate_diag_avx2(std::size_t n, double* y, const double* d, const double* x) {
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    __m256d acc = _mm256_loadu_pd(y + k);
    acc = _mm256_fmadd_pd(_mm256_loadu_pd(d + k), _mm256_loadu_pd(x + k), acc);
    _mm256_storeu_pd(y + k, acc);
  }
  for (; k < n; ++k) y[k] += d[k] * x[k];
}

void accumulate_scaled_diag_avx2(std::size_t n, double* y, double alpha, const double* d,
                                 const double* x) {
  const __m256d a = _mm256_set1_pd(alpha);
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    __m256d acc = _mm256_loadu_pd(y + k);
    __m256d ad = _mm256_mul_pd(a, _mm256_loadu_pd(d + k));
    acc = _mm256_fmadd_pd(ad, _mm256_loadu_pd(x + k), acc);
    _mm256_storeu_pd(y + k, acc);
  }
  for (; k < n; ++k) y[k] += alpha * d[k] * x[k];
}

void matvec_avx2(std::size_t rows, std::size_t cols, const double* m, const double* x, double* y) {
  for (std::size_t r = 0; r < rows; ++r) {
    const double* row = m + r * cols;
    __m256d s0 = _mm256_setzero_pd();
    __m256d s1 = _mm256_setzero_pd();
    std::size_t c = 0;
    for (; c + 8 <= cols; c += 8) {
      s0 = _mm256_fmadd_pd(_mm256_loadu_pd(row + c), _mm256_loadu_pd(x + c), s0);
      s1 = _mm256_fmadd_pd(_mm256_loadu_pd(row + c + 4), _mm256_loadu_pd(x + c + 4), s1);
    }
    for (; c + 4 <= cols; c += 4) {
      s0 = _mm256_fmadd_pd(_mm256_loadu_pd(row + c), _mm256_loadu_pd(x + c), s0);
    }
    double s = hsum(_mm256_add_pd(s0, s1));
    for (; c < cols; ++c) s += row[c] * x[c];
    y[r] = s;
  }
}

double weighted_square_sum_avx2(std::size_t n, const double* w, const double* x) {
  __m256d s = _mm256_setzero_pd();
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    __m256d xv = _mm256_loadu_pd(x + k);
    s = _mm256_fmadd_pd(_mm256_mul_pd(_mm256_loadu_pd(w + k), xv), xv, s);
  }
  double out = hsum(s);
  for (; k < n; ++k) out += w[k] * x[k] * x[k];
  return out;
}

void exp_sweep_avx2(std::size_t n, double* acc, double* env, const SweepWeights& w, double pb,
                    double pm, double pa) {
  const __m256d vb = _mm256_set1_pd(pb);
  const __m256d vm = _mm256_set1_pd(pm);
  const __m256d va = _mm256_set1_pd(pa);
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    __m256d e = _mm256_loadu_pd(env + k);
    __m256d q = _mm256_mul_pd(_mm256_loadu_pd(w.wb + k), vb);
    q = _mm256_fmadd_pd(_mm256_loadu_pd(w.wm + k), vm, q);
    q = _mm256_fmadd_pd(_mm256_loadu_pd(w.wa + k), va, q);
    _mm256_storeu_pd(acc + k, _mm256_fmadd_pd(e, q, _mm256_loadu_pd(acc + k)));
    _mm256_storeu_pd(env + k, _mm256_mul_pd(e, _mm256_loadu_pd(w.decay + k)));
  }
  for (; k < n; ++k) {
    acc[k] += env[k] * (w.wb[k] * pb + w.wm[k] * pm + w.wa[k] * pa);
    env[k] *= w.decay[k];
  }
}

constexpr KernelTable kAvx2{
    scale_diag_avx2,  accumulate_diag_avx2,     accumulate_scaled_diag_avx2,
    matvec_avx2,      weighted_square_sum_avx2, exp_sweep_avx2,
};

}  // namespace

const KernelTable& avx2_table() { return kAvx2; }

}  // namespace roughheat::kernels
