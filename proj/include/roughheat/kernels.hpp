#pragma once
// Data-parallel inner loops over spectral modes.
//
// Every kernel has a scalar reference implementation and, when the compiler
// supports it, an AVX2/FMA variant. The active backend is chosen once at
// startup from the CPU features (overridable with ROUGHHEAT_SIMD=scalar) and
// can be switched explicitly for equivalence testing.

#include <cstddef>
#include <string_view>

namespace roughheat::kernels {

enum class Backend { scalar, avx2 };

// y[k] = d[k] * x[k]
using ScaleDiagFn = void (*)(std::size_t n, double* y, const double* d, const double* x);
// y[k] += d[k] * x[k]
using AccumulateDiagFn = void (*)(std::size_t n, double* y, const double* d, const double* x);
// y[k] += alpha * d[k] * x[k]
using AccumulateScaledDiagFn = void (*)(std::size_t n, double* y, double alpha, const double* d,
                                        const double* x);
// y = M x, M row-major rows x cols
using MatVecFn = void (*)(std::size_t rows, std::size_t cols, const double* m, const double* x,
                          double* y);
// sum_k w[k] * x[k]^2
using WeightedSquareSumFn = double (*)(std::size_t n, const double* w, const double* x);

// One backward step of the exponential product quadrature:
//   acc[k] += env[k] * (wb[k]*pb + wm[k]*pm + wa[k]*pa);  env[k] *= decay[k]
struct SweepWeights {
  const double* decay;
  const double* wb;
  const double* wm;
  const double* wa;
};
using ExpSweepFn = void (*)(std::size_t n, double* acc, double* env, const SweepWeights& w,
                            double pb, double pm, double pa);

struct KernelTable {
  ScaleDiagFn scale_diag;
  AccumulateDiagFn accumulate_diag;
  AccumulateScaledDiagFn accumulate_scaled_diag;
  MatVecFn matvec;
  WeightedSquareSumFn weighted_square_sum;
  ExpSweepFn exp_sweep;
};

const KernelTable& scalar_table();
#ifdef ROUGHHEAT_HAVE_AVX2
const KernelTable& avx2_table();
#endif

bool avx2_available();

// Backend currently in use by the library.
Backend active_backend();
void set_backend(Backend b);
const KernelTable& active();
std::string_view backend_name(Backend b);

}  // namespace roughheat::kernels
