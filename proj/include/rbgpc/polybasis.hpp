#pragma once

// Univariate orthonormal polynomial families on [-1, 1] and total-degree
// tensor bases. Densities are normalized to unit mass, so phi_0 == 1.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace rbgpc {

enum class FamilyKind { Legendre, Jacobi };

class PolynomialFamily {
 public:
  // Jacobi weight (1 - x)^alpha (1 + x)^beta; Legendre is alpha = beta = 0.
  // Throws Error(ParameterDomain) unless alpha, beta > -1.
  static PolynomialFamily legendre();
  static PolynomialFamily jacobi(double alpha, double beta);
  // Beta(a, b) on [-1, 1] is the Jacobi weight with exponents (b - 1, a - 1).
  static PolynomialFamily beta_distribution(double a, double b);

  FamilyKind kind() const { return kind_; }
  double alpha() const { return alpha_; }
  double beta() const { return beta_; }

  // Probability density on [-1, 1].
  double density(double x) const;
  double density_normalizer() const { return normalizer_; }

  // Orthonormal three-term recurrence
  //   x phi_n = b_{n+1} phi_{n+1} + a_n phi_n + b_n phi_{n-1}.
  double recurrence_a(int n) const;
  double recurrence_b(int n) const;  // n >= 1

  double eval(int degree, double x) const;
  // Fills out[0..max_degree] with phi_0(x)..phi_max_degree(x).
  void eval_all(int max_degree, double x, std::span<double> out) const;

  bool operator==(const PolynomialFamily& o) const {
    return kind_ == o.kind_ && alpha_ == o.alpha_ && beta_ == o.beta_;
  }

 private:
  PolynomialFamily(FamilyKind kind, double alpha, double beta);

  FamilyKind kind_;
  double alpha_;
  double beta_;
  double normalizer_;
};

// Convenience entry point; shape is the Jacobi exponent pair.
PolynomialFamily make_family(FamilyKind kind,
                             std::optional<std::pair<double, double>> shape = std::nullopt);

inline double eval_univariate(const PolynomialFamily& f, int degree, double point) {
  return f.eval(degree, point);
}

using MultiIndex = std::vector<std::uint16_t>;

// Total-degree multi-index set {alpha : |alpha| <= P} in graded
// lexicographic order: degree-major, then descending lexicographic with the
// first coordinate most significant. Entry 0 is the zero index.
class MultiIndexSet {
 public:
  MultiIndexSet(int dim, int degree);

  int dim() const { return dim_; }
  int degree() const { return degree_; }
  std::size_t size() const { return size_; }

  std::span<const std::uint16_t> operator[](std::size_t m) const {
    return {flat_.data() + m * dim_, static_cast<std::size_t>(dim_)};
  }
  int total_degree(std::size_t m) const;
  // Position of alpha in the ordering; size() if absent.
  std::size_t find(std::span<const std::uint16_t> alpha) const;

 private:
  int dim_;
  int degree_;
  std::size_t size_;
  std::vector<std::uint16_t> flat_;
};

// binomial(K + P, K); throws Error(Capacity) on overflow or above kMaxBasisSize.
std::size_t total_degree_size(int dim, int degree);
inline constexpr std::size_t kMaxBasisSize = 10'000'000;

MultiIndexSet total_degree_set(int dim, int degree);

// Phi_m(mu) for every m; families.size() must equal set.dim().
std::vector<double> eval_multivariate(const MultiIndexSet& set,
                                      std::span<const PolynomialFamily> families,
                                      std::span<const double> mu);
// Allocation-free variant; scratch needs (degree + 1) * dim entries.
void eval_multivariate(const MultiIndexSet& set, std::span<const PolynomialFamily> families,
                       std::span<const double> mu, std::span<double> scratch,
                       std::span<double> out);

}  // namespace rbgpc
