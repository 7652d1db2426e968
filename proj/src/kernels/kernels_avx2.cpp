#include "rbgpc/kernels.hpp"

#if defined(__x86_64__) && (defined(__GNUC__) || defined(__clang__))
#define RBGPC_HAVE_AVX2 1
#include <immintrin.h>
#endif

namespace rbgpc::kernels {

#if RBGPC_HAVE_AVX2
namespace {

#define RBGPC_AVX2 __attribute__((target("avx2,fma")))

RBGPC_AVX2 inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d sh = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, sh));
}

RBGPC_AVX2 double dot_avx2(const double* x, const double* y, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i + 4), _mm256_loadu_pd(y + i + 4), acc1);
  }
  for (; i + 4 <= n; i += 4)
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc0);
  double s = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) s += x[i] * y[i];
  return s;
}

RBGPC_AVX2 void axpy_avx2(double a, const double* x, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d vy = _mm256_loadu_pd(y + i);
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), vy));
  }
  for (; i < n; ++i) y[i] += a * x[i];
}

RBGPC_AVX2 double abs_weighted_sumsq_avx2(const double* w, const double* x, std::size_t n) {
  const __m256d sign = _mm256_set1_pd(-0.0);
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d vw = _mm256_andnot_pd(sign, _mm256_loadu_pd(w + i));
    __m256d vx = _mm256_loadu_pd(x + i);
    acc = _mm256_fmadd_pd(_mm256_mul_pd(vw, vx), vx, acc);
  }
  double s = hsum(acc);
  for (; i < n; ++i) s += (w[i] < 0 ? -w[i] : w[i]) * x[i] * x[i];
  return s;
}

RBGPC_AVX2 void add_squares_avx2(const double* x, double* y, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d vx = _mm256_loadu_pd(x + i);
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(vx, vx, _mm256_loadu_pd(y + i)));
  }
  for (; i < n; ++i) y[i] += x[i] * x[i];
}

RBGPC_AVX2 void scale_avx2(double a, const double* x, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) _mm256_storeu_pd(y + i, _mm256_mul_pd(va, _mm256_loadu_pd(x + i)));
  for (; i < n; ++i) y[i] = a * x[i];
}

}  // namespace

const KernelTable* avx2_table() {
  static const KernelTable t{Backend::Avx2, dot_avx2, axpy_avx2, abs_weighted_sumsq_avx2,
                             add_squares_avx2, scale_avx2};
  __builtin_cpu_init();
  if (!__builtin_cpu_supports("avx2") || !__builtin_cpu_supports("fma")) return nullptr;
  return &t;
}
#else
const KernelTable* avx2_table() { return nullptr; }
#endif

}  // namespace rbgpc::kernels
