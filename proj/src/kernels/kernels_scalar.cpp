#include "rbgpc/kernels.hpp"

#include <cmath>

namespace rbgpc::kernels {
namespace {

double dot_scalar(const double* x, const double* y, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += x[i] * y[i];
  return s;
}

void axpy_scalar(double a, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

double abs_weighted_sumsq_scalar(const double* w, const double* x, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += std::abs(w[i]) * x[i] * x[i];
  return s;
}

void add_squares_scalar(const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += x[i] * x[i];
}

void scale_scalar(double a, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] = a * x[i];
}

}  // namespace

const KernelTable& scalar_table() {
  static const KernelTable t{Backend::Scalar, dot_scalar, axpy_scalar,
                             abs_weighted_sumsq_scalar, add_squares_scalar,
                             scale_scalar};
  return t;
}

}  // namespace rbgpc::kernels
