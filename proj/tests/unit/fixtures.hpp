#pragma once

#include <random>
#include <vector>

#include "rbgpc/truthpde.hpp"

namespace fixtures {

// Fixed operator (constant coefficient A), load theta(mu) f0 with
// theta = 1 + 0.5 mu_1: the solution manifold is one-dimensional.
inline rbgpc::AffineProblem rank_one_problem(int K, const rbgpc::SpatialGrid& grid, double A = 5.0) {
  using namespace rbgpc;
  AffineCoefficients c;
  c.param_dim = K;
  c.n_operator_terms = 1;
  c.n_load_terms = 1;
  c.theta_operator = [](std::span<const double>, std::span<double> out) { out[0] = 1.0; };
  c.theta_load = [](std::span<const double> mu, std::span<double> out) { out[0] = 1.0 + 0.5 * mu[0]; };
  Eigen::MatrixXd L = discretize_diffusion(grid, [A](double, double) { return A; });
  Eigen::VectorXd f = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(grid.size()));
  const double floor = A * grid.laplacian_lambda_min();
  const double fb = 1.5 * grid.norm(f);
  return AffineProblem(grid, c, {L}, {f}, floor, fb, "rank-one toy");
}

inline std::vector<std::vector<double>> random_points(int K, int n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> d(-1, 1);
  std::vector<std::vector<double>> out(n, std::vector<double>(K));
  for (auto& p : out)
    for (auto& x : p) x = d(rng);
  return out;
}

}  // namespace fixtures
