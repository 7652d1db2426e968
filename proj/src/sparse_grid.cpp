// Smolyak sparse grids over nested Gauss-Patterson rules.

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <string>
#include <unordered_map>

#include "rbgpc/error.hpp"
#include "rbgpc/quadrature.hpp"

namespace rbgpc {
namespace {

#include "patterson_table.inc"

struct TableEntry {
  const double* nodes;
  const double* weights;
  int size;
};

constexpr std::array<TableEntry, kPattersonLevels> kTable = {{
    {kPattersonNodes0, kPattersonWeights0, 1},
    {kPattersonNodes1, kPattersonWeights1, 3},
    {kPattersonNodes2, kPattersonWeights2, 7},
    {kPattersonNodes3, kPattersonWeights3, 15},
    {kPattersonNodes4, kPattersonWeights4, 31},
    {kPattersonNodes5, kPattersonWeights5, 63},
    {kPattersonNodes6, kPattersonWeights6, 127},
}};

int nested_size(int level) { return (2 << level) - 1; }

// Position of node j of 1D level `level` within the finest tabulated level.
// Nested Patterson rules satisfy x^{(l)}_j = x^{(L)}_{(j+1) 2^{L-l} - 1}.
int finest_index(int level, int j, int finest) { return (j + 1) * (1 << (finest - level)) - 1; }

// Weights for the nested nodes under a non-uniform density: exact integrals of
// the Lagrange basis, evaluated with the family's own Gauss rule.
std::vector<double> lagrange_weights(const PolynomialFamily& family, const double* x, int n) {
  if (n == 1) return {1.0};
  const QuadratureRule g = gauss_rule_1d(family, n);
  // Barycentric weights with differences scaled by 2 to keep products in range.
  std::vector<double> lambda(n, 1.0);
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k)
      if (k != j) lambda[j] /= 2.0 * (x[j] - x[k]);

  std::vector<double> w(n, 0.0);
  std::vector<double> terms(n);
  for (std::size_t q = 0; q < g.size(); ++q) {
    const double t = g.node(q)[0];
    int hit = -1;
    double denom = 0.0;
    for (int k = 0; k < n; ++k) {
      if (t == x[k]) {
        hit = k;
        break;
      }
      terms[k] = lambda[k] / (t - x[k]);
      denom += terms[k];
    }
    if (hit >= 0) {
      w[hit] += g.weight(q);
      continue;
    }
    for (int k = 0; k < n; ++k) w[k] += g.weight(q) * terms[k] / denom;
  }
  return w;
}

// Multi-indices i with sum_k cost(i_k) <= level, in lexicographic order.
void enumerate_indices(int dim, int level, std::vector<int>& cur, int pos, int budget,
                       std::vector<std::vector<int>>& out) {
  if (pos == dim) {
    out.push_back(cur);
    return;
  }
  for (int i = 0; i < kPattersonLevels; ++i) {
    const int c = sparse_level_cost(i);
    if (c > budget) break;
    cur[pos] = i;
    enumerate_indices(dim, level, cur, pos + 1, budget - c, out);
  }
}

int required_depth(int level) {
  int depth = 0;
  while (depth + 1 < 64 && sparse_level_cost(depth + 1) <= level) ++depth;
  return depth;
}

}  // namespace

int patterson_max_level() { return kPattersonLevels - 1; }

int sparse_level_cost(int nested_level) {
  if (nested_level <= 0) return 0;
  if (nested_level == 1) return 1;
  return 3 << (nested_level - 2);
}

QuadratureRule patterson_rule_1d(const PolynomialFamily& family, int nested_level) {
  require(nested_level >= 0 && nested_level < kPattersonLevels, ErrorKind::Capacity,
          "Gauss-Patterson level " + std::to_string(nested_level) +
              " is beyond the tabulated sequence (max " + std::to_string(kPattersonLevels - 1) +
              ")");
  const TableEntry& e = kTable[nested_level];
  std::vector<double> nodes(e.nodes, e.nodes + e.size);
  std::vector<double> weights;
  if (family.kind() == FamilyKind::Legendre)
    weights.assign(e.weights, e.weights + e.size);
  else
    weights = lagrange_weights(family, e.nodes, e.size);
  RuleProvenance prov{RuleProvenance::Kind::Sparse, {}, nested_level};
  return {1, std::move(nodes), std::move(weights), std::move(prov), {family}};
}

std::size_t sparse_rule_size(int dim, int level) {
  require(dim >= 1 && level >= 0, ErrorKind::ParameterDomain, "sparse rule needs K >= 1, level >= 0");
  require(required_depth(level) < kPattersonLevels, ErrorKind::Capacity,
          "sparse level " + std::to_string(level) +
              " needs Gauss-Patterson nesting beyond the tabulated sequence");
  std::vector<std::vector<int>> idx;
  std::vector<int> cur(dim, 0);
  enumerate_indices(dim, level, cur, 0, level, idx);
  std::size_t total = 0;
  for (const auto& i : idx) {
    std::size_t p = 1;
    for (int v : i) p *= static_cast<std::size_t>(v == 0 ? 1 : nested_size(v) - nested_size(v - 1));
    total += p;
  }
  return total;
}

QuadratureRule sparse_rule(std::span<const PolynomialFamily> families, int level,
                           std::size_t cap) {
  const int K = static_cast<int>(families.size());
  const std::size_t count = sparse_rule_size(K, level);
  require(count <= cap, ErrorKind::Capacity,
          "sparse rule with " + std::to_string(count) + " nodes exceeds the cap of " +
              std::to_string(cap));
  const int depth = required_depth(level);

  std::vector<std::vector<int>> idx;
  std::vector<int> cur(K, 0);
  enumerate_indices(K, level, cur, 0, level, idx);

  // 1D rules per dimension and nested level.
  std::vector<std::vector<QuadratureRule>> rules(K);
  for (int k = 0; k < K; ++k)
    for (int l = 0; l <= depth; ++l) rules[k].push_back(patterson_rule_1d(families[k], l));

  auto in_set = [&](const std::vector<int>& i) {
    int c = 0;
    for (int v : i) {
      if (v >= kPattersonLevels) return false;
      c += sparse_level_cost(v);
    }
    return c <= level;
  };

  // Node key: finest-level index per dimension, one byte each (<= 127 nodes).
  std::unordered_map<std::string, double> acc;
  acc.reserve(count * 2);
  std::string key(K, '\0');
  std::vector<int> probe(K);
  std::vector<int> pos(K);
  for (const auto& i : idx) {
    // Combination coefficient sum_{z in {0,1}^K, i+z in set} (-1)^{|z|}.
    int coef = 0;
    for (unsigned z = 0; z < (1u << K); ++z) {
      for (int k = 0; k < K; ++k) probe[k] = i[k] + ((z >> k) & 1u);
      if (in_set(probe)) coef += (std::popcount(z) % 2 == 0) ? 1 : -1;
    }
    if (coef == 0) continue;
    std::fill(pos.begin(), pos.end(), 0);
    while (true) {
      double w = coef;
      for (int k = 0; k < K; ++k) {
        w *= rules[k][i[k]].weight(pos[k]);
        key[k] = static_cast<char>(finest_index(i[k], pos[k], depth));
      }
      acc[key] += w;
      int k = K - 1;
      for (; k >= 0; --k) {
        if (++pos[k] < static_cast<int>(rules[k][i[k]].size())) break;
        pos[k] = 0;
      }
      if (k < 0) break;
    }
  }
  require(acc.size() == count, ErrorKind::Numeric,
          "sparse rule node count mismatch (" + std::to_string(acc.size()) + " vs " +
              std::to_string(count) + ")");

  std::vector<std::pair<std::string, double>> entries(acc.begin(), acc.end());
  // Finest-level indices are monotone in the coordinate, so byte order is
  // coordinate order.
  std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) {
    return std::lexicographical_compare(
        a.first.begin(), a.first.end(), b.first.begin(), b.first.end(),
        [](char x, char y) { return static_cast<unsigned char>(x) < static_cast<unsigned char>(y); });
  });

  std::vector<double> nodes(count * K);
  std::vector<double> weights(count);
  for (std::size_t q = 0; q < count; ++q) {
    for (int k = 0; k < K; ++k) {
      const int fi = static_cast<unsigned char>(entries[q].first[k]);
      nodes[q * K + k] = rules[k][depth].node(fi)[0];
    }
    weights[q] = entries[q].second;
  }
  RuleProvenance prov{RuleProvenance::Kind::Sparse, {}, level};
  return {K, std::move(nodes), std::move(weights), std::move(prov),
          std::vector<PolynomialFamily>(families.begin(), families.end())};
}

}  // namespace rbgpc
