#include "rbgpc/polybasis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "rbgpc/error.hpp"

namespace rbgpc {

PolynomialFamily::PolynomialFamily(FamilyKind kind, double alpha, double beta)
    : kind_(kind), alpha_(alpha), beta_(beta) {
  require(std::isfinite(alpha) && std::isfinite(beta) && alpha > -1.0 && beta > -1.0,
          ErrorKind::ParameterDomain,
          "Jacobi exponents must exceed -1 (got " + std::to_string(alpha) + ", " +
              std::to_string(beta) + ")");
  // 1 / int_{-1}^{1} (1-x)^a (1+x)^b dx
  const double ab = alpha + beta;
  const double log_mass = (ab + 1.0) * std::log(2.0) + std::lgamma(alpha + 1.0) +
                          std::lgamma(beta + 1.0) - std::lgamma(ab + 2.0);
  normalizer_ = std::exp(-log_mass);
}

PolynomialFamily PolynomialFamily::legendre() { return {FamilyKind::Legendre, 0.0, 0.0}; }

PolynomialFamily PolynomialFamily::jacobi(double alpha, double beta) {
  return {FamilyKind::Jacobi, alpha, beta};
}

PolynomialFamily PolynomialFamily::beta_distribution(double a, double b) {
  return jacobi(b - 1.0, a - 1.0);
}

PolynomialFamily make_family(FamilyKind kind, std::optional<std::pair<double, double>> shape) {
  if (kind == FamilyKind::Legendre) return PolynomialFamily::legendre();
  const auto [a, b] = shape.value_or(std::pair{0.0, 0.0});
  return PolynomialFamily::jacobi(a, b);
}

double PolynomialFamily::density(double x) const {
  if (x < -1.0 || x > 1.0) return 0.0;
  return normalizer_ * std::pow(1.0 - x, alpha_) * std::pow(1.0 + x, beta_);
}

double PolynomialFamily::recurrence_a(int n) const {
  if (kind_ == FamilyKind::Legendre || alpha_ == beta_) return 0.0;
  const double ab = alpha_ + beta_;
  const double s = 2.0 * n + ab;
  if (n == 0) return (beta_ - alpha_) / (ab + 2.0);
  return (beta_ * beta_ - alpha_ * alpha_) / (s * (s + 2.0));
}

double PolynomialFamily::recurrence_b(int n) const {
  if (kind_ == FamilyKind::Legendre) {
    const double nn = n;
    return nn / std::sqrt(4.0 * nn * nn - 1.0);
  }
  const double ab = alpha_ + beta_;
  if (n == 1) {
    // (1 + alpha + beta) cancels analytically.
    const double s = 2.0 + ab;
    return std::sqrt(4.0 * (1.0 + alpha_) * (1.0 + beta_) / (s * s * (s + 1.0)));
  }
  const double nn = n;
  const double s = 2.0 * nn + ab;
  const double num = 4.0 * nn * (nn + alpha_) * (nn + beta_) * (nn + ab);
  const double den = s * s * (s + 1.0) * (s - 1.0);
  return std::sqrt(num / den);
}

void PolynomialFamily::eval_all(int max_degree, double x, std::span<double> out) const {
  out[0] = 1.0;
  if (max_degree == 0) return;
  double prev = 0.0;
  double cur = 1.0;
  double b_n = 0.0;
  for (int n = 0; n < max_degree; ++n) {
    const double b_next = recurrence_b(n + 1);
    const double next = ((x - recurrence_a(n)) * cur - b_n * prev) / b_next;
    prev = cur;
    cur = next;
    b_n = b_next;
    out[n + 1] = cur;
  }
}

double PolynomialFamily::eval(int degree, double x) const {
  double prev = 0.0;
  double cur = 1.0;
  double b_n = 0.0;
  for (int n = 0; n < degree; ++n) {
    const double b_next = recurrence_b(n + 1);
    const double next = ((x - recurrence_a(n)) * cur - b_n * prev) / b_next;
    prev = cur;
    cur = next;
    b_n = b_next;
  }
  return cur;
}

std::size_t total_degree_size(int dim, int degree) {
  require(dim >= 1 && degree >= 0, ErrorKind::ParameterDomain,
          "total-degree set needs K >= 1 and P >= 0");
  // binomial(K + P, min(K, P)) with an overflow guard at each step.
  const int k = std::min(dim, degree);
  const int n = dim + degree;
  unsigned long long c = 1;
  for (int i = 1; i <= k; ++i) {
    const unsigned long long num = static_cast<unsigned long long>(n - k + i);
    if (c > std::numeric_limits<unsigned long long>::max() / num)
      raise(ErrorKind::Capacity, "binomial(K+P, K) overflows for K=" + std::to_string(dim) +
                                     ", P=" + std::to_string(degree));
    c = c * num / static_cast<unsigned long long>(i);
  }
  if (c > kMaxBasisSize)
    raise(ErrorKind::Capacity, "total-degree basis of size " + std::to_string(c) +
                                   " exceeds the cap of " + std::to_string(kMaxBasisSize));
  return static_cast<std::size_t>(c);
}

namespace {

// Appends all compositions of `remaining` into dims [pos, K) in descending
// lexicographic order.
void append_degree(int pos, int remaining, MultiIndex& cur, std::vector<std::uint16_t>& out) {
  const int K = static_cast<int>(cur.size());
  if (pos == K - 1) {
    cur[pos] = static_cast<std::uint16_t>(remaining);
    out.insert(out.end(), cur.begin(), cur.end());
    return;
  }
  for (int v = remaining; v >= 0; --v) {
    cur[pos] = static_cast<std::uint16_t>(v);
    append_degree(pos + 1, remaining - v, cur, out);
  }
}

}  // namespace

MultiIndexSet::MultiIndexSet(int dim, int degree)
    : dim_(dim), degree_(degree), size_(total_degree_size(dim, degree)) {
  require(degree <= std::numeric_limits<std::uint16_t>::max(), ErrorKind::Capacity,
          "degree too large");
  flat_.reserve(size_ * static_cast<std::size_t>(dim));
  MultiIndex cur(dim, 0);
  for (int d = 0; d <= degree; ++d) append_degree(0, d, cur, flat_);
}

int MultiIndexSet::total_degree(std::size_t m) const {
  int s = 0;
  for (auto a : (*this)[m]) s += a;
  return s;
}

std::size_t MultiIndexSet::find(std::span<const std::uint16_t> alpha) const {
  if (static_cast<int>(alpha.size()) != dim_) return size_;
  for (std::size_t m = 0; m < size_; ++m) {
    auto e = (*this)[m];
    if (std::equal(e.begin(), e.end(), alpha.begin())) return m;
  }
  return size_;
}

MultiIndexSet total_degree_set(int dim, int degree) { return {dim, degree}; }

void eval_multivariate(const MultiIndexSet& set, std::span<const PolynomialFamily> families,
                       std::span<const double> mu, std::span<double> scratch,
                       std::span<double> out) {
  const int K = set.dim();
  const int P = set.degree();
  require(static_cast<int>(families.size()) == K && static_cast<int>(mu.size()) == K,
          ErrorKind::Shape,
          "eval_multivariate: expected " + std::to_string(K) + " families and coordinates");
  require(out.size() >= set.size() && scratch.size() >= static_cast<std::size_t>((P + 1) * K),
          ErrorKind::Shape, "eval_multivariate: output buffers too small");
  for (int k = 0; k < K; ++k)
    families[k].eval_all(P, mu[k], scratch.subspan(static_cast<std::size_t>(k) * (P + 1), P + 1));
  for (std::size_t m = 0; m < set.size(); ++m) {
    auto alpha = set[m];
    double v = 1.0;
    for (int k = 0; k < K; ++k)
      if (alpha[k] != 0) v *= scratch[static_cast<std::size_t>(k) * (P + 1) + alpha[k]];
    out[m] = v;
  }
}

std::vector<double> eval_multivariate(const MultiIndexSet& set,
                                      std::span<const PolynomialFamily> families,
                                      std::span<const double> mu) {
  std::vector<double> out(set.size());
  std::vector<double> scratch(static_cast<std::size_t>(set.degree() + 1) * set.dim());
  eval_multivariate(set, families, mu, scratch, out);
  return out;
}

}  // namespace rbgpc
