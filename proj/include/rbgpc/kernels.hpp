#pragma once

// Data-parallel inner loops used by the estimator sweep, coefficient
// assembly and QoI reduction. Every kernel has a scalar reference
// implementation; vector variants are selected once at startup from the
// host CPU features and may be overridden (RBGPC_KERNELS=scalar|avx2|neon).

#include <cstddef>
#include <span>
#include <string_view>

namespace rbgpc::kernels {

enum class Backend { Scalar, Avx2, Neon };

struct KernelTable {
  Backend backend;
  double (*dot)(const double* x, const double* y, std::size_t n);
  // y += a * x
  void (*axpy)(double a, const double* x, double* y, std::size_t n);
  // sum_i |w_i| * x_i^2
  double (*abs_weighted_sumsq)(const double* w, const double* x, std::size_t n);
  // y_i += x_i^2
  void (*add_squares)(const double* x, double* y, std::size_t n);
  // y_i = a * x_i
  void (*scale)(double a, const double* x, double* y, std::size_t n);
};

const KernelTable& scalar_table();
// Null when the backend was not compiled in for this target.
const KernelTable* avx2_table();
const KernelTable* neon_table();

bool available(Backend b);
Backend active_backend();
// Throws Error(Capacity) if the backend is unavailable on this host.
void set_backend(Backend b);
std::string_view name(Backend b);
Backend parse_backend(std::string_view s);

const KernelTable& active();

inline double dot(std::span<const double> x, std::span<const double> y) {
  return active().dot(x.data(), y.data(), x.size());
}
inline void axpy(double a, std::span<const double> x, std::span<double> y) {
  active().axpy(a, x.data(), y.data(), x.size());
}
inline double abs_weighted_sumsq(std::span<const double> w, std::span<const double> x) {
  return active().abs_weighted_sumsq(w.data(), x.data(), x.size());
}
inline void add_squares(std::span<const double> x, std::span<double> y) {
  active().add_squares(x.data(), y.data(), x.size());
}
inline void scale(double a, std::span<const double> x, std::span<double> y) {
  active().scale(a, x.data(), y.data(), x.size());
}

}  // namespace rbgpc::kernels
