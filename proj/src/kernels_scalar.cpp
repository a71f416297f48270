#include "roughheat/kernels.hpp"

namespace roughheat::kernels {
namespace {

void scale_diag_scalar(std::size_t n, double* y, const double* d, const double* x) {
  for (std::size_t k = 0; k < n; ++k) y[k] = d[k] * x[k];
}

void accumulate_diag_scalar(std::size_t n, double* y, const double* d, const double* x) {
  for (std::size_t k = 0; k < n; ++k) y[k] += d[k] * x[k];
}

void accumulate_scaled_diag_scalar(std::size_t n, double* y, double alpha, const double* d,
                                   const double* x) {
  for (std::size_t k = 0; k < n; ++k) y[k] += alpha * d[k] * x[k];
}

void matvec_scalar(std::size_t rows, std::size_t cols, const double* m, const double* x,
                   double* y) {
  for (std::size_t r = 0; r < rows; ++r) {
    const double* row = m + r * cols;
    double s = 0.0;
    for (std::size_t c = 0; c < cols; ++c) s += row[c] * x[c];
    y[r] = s;
  }
}

double weighted_square_sum_scalar(std::size_t n, const double* w, const double* x) {
  double s = 0.0;
  for (std::size_t k = 0; k < n; ++k) s += w[k] * x[k] * x[k];
  return s;
}

void exp_sweep_scalar(std::size_t n, double* acc, double* env, const SweepWeights& w, double pb,
                      double pm, double pa) {
  for (std::size_t k = 0; k < n; ++k) {
    acc[k] += env[k] * (w.wb[k] * pb + w.wm[k] * pm + w.wa[k] * pa);
    env[k] *= w.decay[k];
  }
}

constexpr KernelTable kScalar{
    scale_diag_scalar,          accumulate_diag_scalar, accumulate_scaled_diag_scalar,
    matvec_scalar,              weighted_square_sum_scalar, exp_sweep_scalar,
};

}  // namespace

const KernelTable& scalar_table() { return kScalar; }

}  // namespace roughheat::kernels
