#pragma once

// Reduced basis surrogate: X-orthonormal snapshot basis, least-squares
// reduced solve and residual-based a posteriori estimates. The offline data
// is the triangular factor R of
//     Z = sqrt(cell_area) * [f_1 .. f_Qf, L_1 xi_1 .. L_QL xi_1, L_1 xi_2 ...],
// so that for any coefficient vector the residual f(mu) - L(mu) V c equals
// Z * t(mu, c) and its X norm is ||R t(mu, c)||_2. Everything online is
// independent of the number of truth unknowns.

#include <Eigen/Dense>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "rbgpc/quadrature.hpp"
#include "rbgpc/truthpde.hpp"

namespace rbgpc {

class ReducedBasisSpace {
 public:
  ReducedBasisSpace(AffineCoefficients coefficients, double cell_area, std::size_t dofs);
  // Rebuilds a space from persisted data; basis is dofs x N, rfactor is
  // rows x (Qf + QL * N).
  ReducedBasisSpace(AffineCoefficients coefficients, double cell_area, Eigen::MatrixXd basis,
                    Eigen::MatrixXd rfactor, std::vector<std::vector<double>> parameters);

  std::size_t dim() const { return static_cast<std::size_t>(basis_.cols()); }
  std::size_t dofs() const { return static_cast<std::size_t>(basis_.rows()); }
  const AffineCoefficients& coefficients() const { return coef_; }
  double cell_area() const { return cell_area_; }
  const Eigen::MatrixXd& basis() const { return basis_; }
  const Eigen::MatrixXd& rfactor() const { return rfactor_; }
  const std::vector<std::vector<double>>& parameters() const { return parameters_; }

  // Residual Gram matrix R^T R = Z^T Z; entries are the blocks
  // <L_q xi_i, L_q' xi_j>, <L_q xi_i, f_q'>, <f_q, f_q'> in the X inner product.
  Eigen::MatrixXd gram() const { return rfactor_.transpose() * rfactor_; }

  // Leading N basis functions with their offline data (nested spaces).
  ReducedBasisSpace truncated(std::size_t n) const;

  // Orthonormalizes the snapshot against the basis (two Gram-Schmidt passes)
  // and refactors the offline data. Returns false, leaving the space
  // unchanged, when the snapshot is numerically inside the span.
  bool add_snapshot(const AffineProblem& problem, const Eigen::VectorXd& snapshot,
                    std::span<const double> mu);

  Eigen::VectorXd lift(const Eigen::VectorXd& coeffs) const { return basis_ * coeffs; }

 private:
  std::size_t column_count(std::size_t n) const {
    return coef_.n_load_terms + coef_.n_operator_terms * n;
  }
  void refactor();

  AffineCoefficients coef_;
  double cell_area_;
  Eigen::MatrixXd basis_;
  Eigen::MatrixXd stacked_;  // Z; only populated while building offline
  Eigen::MatrixXd rfactor_;
  std::vector<std::vector<double>> parameters_;
};

struct RbSolution {
  Eigen::VectorXd coeffs;
  double residual_norm = 0.0;  // ||f(mu) - L(mu) V c||_X
  bool regularized = false;    // minimum-norm fallback was used
};

// Least-squares reduced solve: c minimizes ||L(mu) V c - f(mu)||_X.
RbSolution rb_solve(const ReducedBasisSpace& space, std::span<const double> mu);

// ||R_N(mu)||_X for an arbitrary coefficient vector.
double residual_norm(const ReducedBasisSpace& space, std::span<const double> mu,
                     const Eigen::VectorXd& coeffs);

enum class BetaMode { Analytic, ExactEig };

// Lower bound on lambda_min(L(mu)^T L(mu)).
//   Analytic: coercivity_floor^2, uniform in mu.
//   ExactEig: computed from the assembled operator (truth-sized; validation).
double beta_lb(const AffineProblem& problem, std::span<const double> mu, BetaMode mode);
// lambda_min(L^T L) of a square matrix.
double smallest_squared_singular_value(const Eigen::MatrixXd& L);

// ||R|| / sqrt(beta) * sqrt(Q |w_q|)
inline double weighted_estimator(double residual, double beta, std::size_t Q, double weight) {
  return residual / std::sqrt(beta) * std::sqrt(static_cast<double>(Q) * std::abs(weight));
}

// C_QM * sqrt(mean(delta^2)).
double epsilon_estimate(std::span<const double> deltas, double c_qm);

struct GreedyOptions {
  double eps_tol = 1e-6;
  std::size_t n_max = 60;
  double c_qm = 1.0;
  std::uint64_t seed = 0;
  BetaMode beta_mode = BetaMode::Analytic;
  int threads = 1;
};

struct GreedyIteration {
  std::size_t n = 0;             // basis dimension after this iteration
  std::size_t selected = 0;      // training index added in this iteration
  double epsilon = 0.0;
  double max_delta = 0.0;        // max of live weighted estimates
  std::size_t active_before = 0; // n(Xi, k): points swept this iteration
  std::size_t active_after = 0;
  double seconds = 0.0;
};

// Per-training-point bookkeeping shared by the sweep and the stopping test.
struct EstimatorData {
  BetaMode beta_mode = BetaMode::Analytic;
  std::vector<double> beta;      // beta_LB per training node
  std::vector<double> delta;     // last-known weighted estimate (running minimum)
  std::vector<std::uint8_t> active;
  std::vector<std::uint8_t> selected;
  std::size_t q_trim = 0;        // sum over iterations of n(Xi, k)
};

struct GreedyResult {
  ReducedBasisSpace space;
  EstimatorData data;
  std::vector<GreedyIteration> history;
  std::vector<std::size_t> selected;
  bool converged = false;
};


// Goal-oriented greedy over the training set given by the rule's nodes.
GreedyResult greedy_build(const AffineProblem& problem, const QuadratureRule& rule,
                          const GreedyOptions& options);

struct EstimateSweep {
  std::vector<double> residual;  // ||R_N(mu^q)||_X
  std::vector<double> beta;
  std::vector<double> delta_w;   // weighted estimates
  std::size_t regularized = 0;
};

// Fresh weighted estimates on every node of `rule` (no running minimum).
// `beta_cache` may hold precomputed values per node.
EstimateSweep evaluate_estimates(const AffineProblem& problem, const ReducedBasisSpace& space,
                                 const QuadratureRule& rule, BetaMode mode,
                                 std::span<const double> beta_cache = {}, int threads = 1);

}  // namespace rbgpc
