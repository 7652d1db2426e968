#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "rbgpc/polybasis.hpp"

namespace rbgpc {

inline constexpr std::size_t kDefaultNodeCap = 10'000'000;

struct RuleProvenance {
  enum class Kind { Gauss1D, Tensor, Sparse };
  Kind kind = Kind::Gauss1D;
  std::vector<int> points_per_dim;  // Gauss1D / Tensor
  int level = -1;                   // Sparse

  std::string describe() const;
  bool operator==(const RuleProvenance&) const = default;
};

// Nodes mu^q in R^K and weights w_q approximating int f rho dmu. Weights sum
// to one; sparse rules may carry negative weights.
class QuadratureRule {
 public:
  QuadratureRule() = default;
  QuadratureRule(int dim, std::vector<double> nodes, std::vector<double> weights,
                 RuleProvenance provenance, std::vector<PolynomialFamily> families);

  int dim() const { return dim_; }
  std::size_t size() const { return weights_.size(); }
  std::span<const double> node(std::size_t q) const {
    return {nodes_.data() + q * static_cast<std::size_t>(dim_), static_cast<std::size_t>(dim_)};
  }
  double weight(std::size_t q) const { return weights_[q]; }
  std::span<const double> weights() const { return weights_; }
  std::span<const double> nodes_flat() const { return nodes_; }
  const RuleProvenance& provenance() const { return provenance_; }
  std::span<const PolynomialFamily> families() const { return families_; }

  bool all_weights_positive() const;

 private:
  int dim_ = 0;
  std::vector<double> nodes_;
  std::vector<double> weights_;
  RuleProvenance provenance_;
  std::vector<PolynomialFamily> families_;
};

// Golub-Welsch: nodes are the eigenvalues of the q x q Jacobi matrix, weights
// the squared first eigenvector components (unit total mass).
QuadratureRule gauss_rule_1d(const PolynomialFamily& family, int q);

// Cartesian product, row-major over dimension indices (last dimension
// fastest). Throws Error(Capacity) when prod q_k exceeds cap.
QuadratureRule tensor_rule(std::span<const QuadratureRule> rules,
                           std::size_t cap = kDefaultNodeCap);
QuadratureRule tensor_gauss_rule(std::span<const PolynomialFamily> families, int q_per_dim,
                                 std::size_t cap = kDefaultNodeCap);

// Smolyak combination of nested Gauss-Patterson rules (1, 3, 7, 15, ... points).
// The index set is {i : sum_k cost(i_k) <= level} with
// cost = 0, 1, 3, 6, 12, 24, 48 for 1D levels 0..6, i.e. roughly a quarter of
// the 1D polynomial exactness. Duplicate nodes are merged and the result is
// sorted lexicographically by coordinates.
QuadratureRule sparse_rule(std::span<const PolynomialFamily> families, int level,
                           std::size_t cap = kDefaultNodeCap);
// Node count of sparse_rule without building it.
std::size_t sparse_rule_size(int dim, int level);

// 1D nested rule used by sparse_rule: tabulated Patterson nodes; weights are
// tabulated for the uniform density and recomputed as exact Lagrange-basis
// integrals for other families.
QuadratureRule patterson_rule_1d(const PolynomialFamily& family, int nested_level);
int patterson_max_level();
int sparse_level_cost(int nested_level);

double integrate(const QuadratureRule& rule,
                 const std::function<double(std::span<const double>)>& f);
// Vector-valued integrand; f writes `out_dim` values for the given node.
std::vector<double> integrate(
    const QuadratureRule& rule, std::size_t out_dim,
    const std::function<void(std::span<const double>, std::span<double>)>& f);

// CSV with header q,mu_1..mu_K,w.
void write_csv(const QuadratureRule& rule, std::ostream& os);

}  // namespace rbgpc
