#include "rbgpc/quadrature.hpp"

#include <Eigen/Eigenvalues>
#include <cstdio>
#include <ostream>

#include "rbgpc/error.hpp"

namespace rbgpc {

std::string RuleProvenance::describe() const {
  std::string s;
  switch (kind) {
    case Kind::Gauss1D: s = "gauss"; break;
    case Kind::Tensor: s = "tensor"; break;
    case Kind::Sparse: return "sparse(level=" + std::to_string(level) + ")";
  }
  s += "(";
  for (std::size_t k = 0; k < points_per_dim.size(); ++k)
    s += (k ? "x" : "") + std::to_string(points_per_dim[k]);
  return s + ")";
}

QuadratureRule::QuadratureRule(int dim, std::vector<double> nodes, std::vector<double> weights,
                               RuleProvenance provenance, std::vector<PolynomialFamily> families)
    : dim_(dim),
      nodes_(std::move(nodes)),
      weights_(std::move(weights)),
      provenance_(std::move(provenance)),
      families_(std::move(families)) {
  require(dim_ >= 1 && nodes_.size() == weights_.size() * static_cast<std::size_t>(dim_),
          ErrorKind::Shape, "quadrature rule: node array does not match Q x K");
  require(families_.size() == static_cast<std::size_t>(dim_), ErrorKind::Shape,
          "quadrature rule: one family per dimension required");
}

bool QuadratureRule::all_weights_positive() const {
  for (double w : weights_)
    if (!(w > 0.0)) return false;
  return true;
}

QuadratureRule gauss_rule_1d(const PolynomialFamily& family, int q) {
  require(q >= 1, ErrorKind::ParameterDomain, "Gauss rule needs q >= 1");
  Eigen::VectorXd diag(q);
  Eigen::VectorXd sub(std::max(q - 1, 0));
  for (int n = 0; n < q; ++n) diag[n] = family.recurrence_a(n);
  for (int n = 1; n < q; ++n) sub[n - 1] = family.recurrence_b(n);

  std::vector<double> nodes(q);
  std::vector<double> weights(q);
  if (q == 1) {
    nodes[0] = diag[0];
    weights[0] = 1.0;
  } else {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    es.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
    require(es.info() == Eigen::Success, ErrorKind::Numeric,
            "Golub-Welsch eigen-solver did not converge");
    double total = 0.0;
    for (int j = 0; j < q; ++j) {
      nodes[j] = es.eigenvalues()[j];
      const double v0 = es.eigenvectors()(0, j);
      weights[j] = v0 * v0;
      total += weights[j];
    }
    for (double& w : weights) w /= total;
  }
  RuleProvenance prov{RuleProvenance::Kind::Gauss1D, {q}, -1};
  return {1, std::move(nodes), std::move(weights), std::move(prov), {family}};
}

QuadratureRule tensor_rule(std::span<const QuadratureRule> rules, std::size_t cap) {
  require(!rules.empty(), ErrorKind::Shape, "tensor rule needs at least one factor");
  if (rules.size() == 1) return rules[0];

  std::size_t total = 1;
  std::vector<int> counts;
  std::vector<PolynomialFamily> families;
  for (const auto& r : rules) {
    require(r.dim() == 1, ErrorKind::Shape, "tensor rule factors must be univariate");
    if (r.size() != 0 && total > cap / r.size())
      raise(ErrorKind::Capacity, "tensor rule exceeds the node cap of " + std::to_string(cap));
    total *= r.size();
    counts.push_back(static_cast<int>(r.size()));
    families.push_back(r.families()[0]);
  }
  require(total <= cap, ErrorKind::Capacity,
          "tensor rule with " + std::to_string(total) + " nodes exceeds the cap of " +
              std::to_string(cap));

  const int K = static_cast<int>(rules.size());
  std::vector<double> nodes(total * K);
  std::vector<double> weights(total);
  std::vector<std::size_t> idx(K, 0);
  for (std::size_t q = 0; q < total; ++q) {
    double w = 1.0;
    for (int k = 0; k < K; ++k) {
      nodes[q * K + k] = rules[k].node(idx[k])[0];
      w *= rules[k].weight(idx[k]);
    }
    weights[q] = w;
    for (int k = K - 1; k >= 0; --k) {
      if (++idx[k] < rules[k].size()) break;
      idx[k] = 0;
    }
  }
  RuleProvenance prov{RuleProvenance::Kind::Tensor, std::move(counts), -1};
  return {K, std::move(nodes), std::move(weights), std::move(prov), std::move(families)};
}

QuadratureRule tensor_gauss_rule(std::span<const PolynomialFamily> families, int q_per_dim,
                                 std::size_t cap) {
  std::vector<QuadratureRule> rules;
  rules.reserve(families.size());
  for (const auto& f : families) rules.push_back(gauss_rule_1d(f, q_per_dim));
  return tensor_rule(rules, cap);
}

double integrate(const QuadratureRule& rule,
                 const std::function<double(std::span<const double>)>& f) {
  double s = 0.0;
  for (std::size_t q = 0; q < rule.size(); ++q) s += rule.weight(q) * f(rule.node(q));
  return s;
}

std::vector<double> integrate(
    const QuadratureRule& rule, std::size_t out_dim,
    const std::function<void(std::span<const double>, std::span<double>)>& f) {
  std::vector<double> acc(out_dim, 0.0);
  std::vector<double> val(out_dim);
  for (std::size_t q = 0; q < rule.size(); ++q) {
    f(rule.node(q), val);
    const double w = rule.weight(q);
    for (std::size_t i = 0; i < out_dim; ++i) acc[i] += w * val[i];
  }
  return acc;
}

void write_csv(const QuadratureRule& rule, std::ostream& os) {
  os << "q";
  for (int k = 1; k <= rule.dim(); ++k) os << ",mu_" << k;
  os << ",w\n";
  char buf[32];
  for (std::size_t q = 0; q < rule.size(); ++q) {
    os << q;
    for (double x : rule.node(q)) {
      std::snprintf(buf, sizeof buf, "%.17g", x);
      os << ',' << buf;
    }
    std::snprintf(buf, sizeof buf, "%.17g", rule.weight(q));
    os << ',' << buf << '\n';
  }
}

}  // namespace rbgpc
