#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "rbgpc/error.hpp"
#include "rbgpc/kernels.hpp"

using namespace rbgpc;
namespace k = rbgpc::kernels;

namespace {

std::vector<double> random_vec(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  std::vector<double> v(n);
  for (auto& x : v) x = d(rng);
  return v;
}

void check_table(const k::KernelTable& t) {
  const k::KernelTable& s = k::scalar_table();
  std::mt19937_64 rng(7);
  for (std::size_t n = 0; n < 41; ++n) {
    const auto x = random_vec(rng, n);
    const auto y = random_vec(rng, n);
    const double tol = 1e-14 * (1.0 + static_cast<double>(n));
    CHECK(t.dot(x.data(), y.data(), n) == doctest::Approx(s.dot(x.data(), y.data(), n)).epsilon(tol));
    CHECK(t.abs_weighted_sumsq(x.data(), y.data(), n) ==
          doctest::Approx(s.abs_weighted_sumsq(x.data(), y.data(), n)).epsilon(tol));

    auto y1 = y, y2 = y;
    t.axpy(0.37, x.data(), y1.data(), n);
    s.axpy(0.37, x.data(), y2.data(), n);
    for (std::size_t i = 0; i < n; ++i) CHECK(y1[i] == doctest::Approx(y2[i]).epsilon(1e-15));

    y1 = y, y2 = y;
    t.add_squares(x.data(), y1.data(), n);
    s.add_squares(x.data(), y2.data(), n);
    for (std::size_t i = 0; i < n; ++i) CHECK(y1[i] == doctest::Approx(y2[i]).epsilon(1e-15));

    t.scale(-2.5, x.data(), y1.data(), n);
    s.scale(-2.5, x.data(), y2.data(), n);
    for (std::size_t i = 0; i < n; ++i) CHECK(y1[i] == y2[i]);
  }
}

}  // namespace

TEST_CASE("kernels: scalar reference values") {
  const double x[] = {1, 2, 3};
  const double y[] = {4, -5, 6};
  const auto& s = k::scalar_table();
  CHECK(s.dot(x, y, 3) == 12.0);
  CHECK(s.abs_weighted_sumsq(y, x, 3) == 4 + 20 + 54);
}

TEST_CASE("kernels: SIMD variants match the scalar reference") {
  if (const auto* t = k::avx2_table()) {
    INFO("avx2");
    check_table(*t);
  }
  if (const auto* t = k::neon_table()) {
    INFO("neon");
    check_table(*t);
  }
  check_table(k::scalar_table());
}

TEST_CASE("kernels: backend selection") {
  const k::Backend before = k::active_backend();
  k::set_backend(k::Backend::Scalar);
  CHECK(k::active_backend() == k::Backend::Scalar);
  CHECK(k::parse_backend("avx2") == k::Backend::Avx2);
  CHECK_THROWS_AS(k::parse_backend("sse9"), Error);
  if (!k::available(k::Backend::Neon)) CHECK_THROWS_AS(k::set_backend(k::Backend::Neon), Error);
  k::set_backend(before);
}
