#include "rbgpc/kernels.hpp"

#if defined(__aarch64__)
#include <arm_neon.h>
#endif

namespace rbgpc::kernels {

#if defined(__aarch64__)
namespace {

double dot_neon(const double* x, const double* y, std::size_t n) {
  float64x2_t acc0 = vdupq_n_f64(0.0);
  float64x2_t acc1 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc0 = vfmaq_f64(acc0, vld1q_f64(x + i), vld1q_f64(y + i));
    acc1 = vfmaq_f64(acc1, vld1q_f64(x + i + 2), vld1q_f64(y + i + 2));
  }
  double s = vaddvq_f64(vaddq_f64(acc0, acc1));
  for (; i < n; ++i) s += x[i] * y[i];
  return s;
}

void axpy_neon(double a, const double* x, double* y, std::size_t n) {
  const float64x2_t va = vdupq_n_f64(a);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) vst1q_f64(y + i, vfmaq_f64(vld1q_f64(y + i), va, vld1q_f64(x + i)));
  for (; i < n; ++i) y[i] += a * x[i];
}

double abs_weighted_sumsq_neon(const double* w, const double* x, std::size_t n) {
  float64x2_t acc = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    float64x2_t vx = vld1q_f64(x + i);
    acc = vfmaq_f64(acc, vmulq_f64(vabsq_f64(vld1q_f64(w + i)), vx), vx);
  }
  double s = vaddvq_f64(acc);
  for (; i < n; ++i) s += (w[i] < 0 ? -w[i] : w[i]) * x[i] * x[i];
  return s;
}

void add_squares_neon(const double* x, double* y, std::size_t n) {
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    float64x2_t vx = vld1q_f64(x + i);
    vst1q_f64(y + i, vfmaq_f64(vld1q_f64(y + i), vx, vx));
  }
  for (; i < n; ++i) y[i] += x[i] * x[i];
}

void scale_neon(double a, const double* x, double* y, std::size_t n) {
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) vst1q_f64(y + i, vmulq_n_f64(vld1q_f64(x + i), a));
  for (; i < n; ++i) y[i] = a * x[i];
}

}  // namespace

const KernelTable* neon_table() {
  static const KernelTable t{Backend::Neon, dot_neon, axpy_neon, abs_weighted_sumsq_neon,
                             add_squares_neon, scale_neon};
  return &t;
}
#else
const KernelTable* neon_table() { return nullptr; }
#endif

}  // namespace rbgpc::kernels
