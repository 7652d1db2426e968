// Goal-oriented weighted greedy construction of the reduced basis.

#include <chrono>
#include <cmath>
#include <limits>
#include <random>

#include "parallel.hpp"
#include "rbgpc/error.hpp"
#include "rbgpc/quadrature.hpp"
#include "rbgpc/rbm.hpp"

namespace rbgpc {
namespace {

void fill_beta(const AffineProblem& problem, const QuadratureRule& rule, BetaMode mode,
               std::vector<double>& beta, const std::vector<std::uint8_t>* mask, int threads) {
  const std::size_t Q = rule.size();
  if (beta.size() != Q) beta.assign(Q, std::numeric_limits<double>::quiet_NaN());
  if (mode == BetaMode::Analytic) {
    const double b = problem.coercivity_floor() * problem.coercivity_floor();
    std::fill(beta.begin(), beta.end(), b);
    return;
  }
  detail::parallel_for(Q, threads, [&](std::size_t b, std::size_t e) {
    for (std::size_t q = b; q < e; ++q)
      if (std::isnan(beta[q]) && (mask == nullptr || (*mask)[q]))
        beta[q] = beta_lb(problem, rule.node(q), mode);
  });
}

}  // namespace

EstimateSweep evaluate_estimates(const AffineProblem& problem, const ReducedBasisSpace& space,
                                 const QuadratureRule& rule, BetaMode mode,
                                 std::span<const double> beta_cache, int threads) {
  const std::size_t Q = rule.size();
  EstimateSweep out;
  out.beta.assign(beta_cache.begin(), beta_cache.end());
  fill_beta(problem, rule, mode, out.beta, nullptr, threads);
  out.residual.resize(Q);
  out.delta_w.resize(Q);
  std::vector<std::uint8_t> reg(Q, 0);
  detail::parallel_for(Q, threads, [&](std::size_t b, std::size_t e) {
    for (std::size_t q = b; q < e; ++q) {
      const RbSolution s = rb_solve(space, rule.node(q));
      out.residual[q] = s.residual_norm;
      out.delta_w[q] = weighted_estimator(s.residual_norm, out.beta[q], Q, rule.weight(q));
      reg[q] = s.regularized;
    }
  });
  for (auto r : reg) out.regularized += r;
  return out;
}

GreedyResult greedy_build(const AffineProblem& problem, const QuadratureRule& rule,
                          const GreedyOptions& opt) {
  const std::size_t Q = rule.size();
  require(Q > 0, ErrorKind::ParameterDomain, "greedy training set is empty");
  require(rule.dim() == problem.param_dim(), ErrorKind::Shape,
          "training rule dimension does not match the problem");
  require(opt.eps_tol > 0.0, ErrorKind::ParameterDomain, "eps_tol must be positive");
  require(opt.n_max >= 1, ErrorKind::ParameterDomain, "N_max must be >= 1");
  require(opt.c_qm > 0.0, ErrorKind::ParameterDomain, "C_QM must be positive");

  GreedyResult res{ReducedBasisSpace(problem.coefficients(), problem.grid().cell_area(),
                                     problem.dofs()),
                   {}, {}, {}, false};
  EstimatorData& data = res.data;
  data.beta_mode = opt.beta_mode;
  data.delta.assign(Q, std::numeric_limits<double>::infinity());
  data.active.assign(Q, 1);
  data.selected.assign(Q, 0);

  const double trim_threshold = opt.eps_tol / (2.0 * opt.c_qm);

  std::mt19937_64 rng(opt.seed);
  std::uniform_int_distribution<std::size_t> pick(0, Q - 1);
  std::size_t next = pick(rng);

  std::vector<double> fresh(Q);
  while (true) {
    const auto t0 = std::chrono::steady_clock::now();
    GreedyIteration it;
    it.selected = next;

    const TruthSolution snap = truth_solve(problem, rule.node(next));
    const bool added = res.space.add_snapshot(problem, snap.field, rule.node(next));
    data.selected[next] = 1;
    data.active[next] = 0;
    data.delta[next] = 0.0;  // stale-zero: reproduced by the basis
    if (added) res.selected.push_back(next);

    it.active_before = 0;
    for (auto a : data.active) it.active_before += a;
    data.q_trim += it.active_before;

    fill_beta(problem, rule, opt.beta_mode, data.beta, &data.active, opt.threads);
    detail::parallel_for(Q, opt.threads, [&](std::size_t b, std::size_t e) {
      for (std::size_t q = b; q < e; ++q) {
        if (!data.active[q]) continue;
        const RbSolution s = rb_solve(res.space, rule.node(q));
        fresh[q] = weighted_estimator(s.residual_norm, data.beta[q], Q, rule.weight(q));
      }
    });

    double max_live = 0.0;
    for (std::size_t q = 0; q < Q; ++q) {
      if (!data.active[q]) continue;
      data.delta[q] = std::min(data.delta[q], fresh[q]);
      max_live = std::max(max_live, fresh[q]);
    }
    it.epsilon = epsilon_estimate(data.delta, opt.c_qm);
    it.max_delta = max_live;
    for (std::size_t q = 0; q < Q; ++q)
      if (data.active[q] && data.delta[q] < trim_threshold) data.active[q] = 0;
    it.active_after = 0;
    for (auto a : data.active) it.active_after += a;
    it.n = res.space.dim();
    it.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    res.history.push_back(it);

    if (it.epsilon <= opt.eps_tol) {
      res.converged = true;
      break;
    }
    if (res.space.dim() >= opt.n_max) break;

    // argmax over the active set, ties to the smallest index.
    std::size_t best = Q;
    double best_val = -1.0;
    for (std::size_t q = 0; q < Q; ++q)
      if (data.active[q] && data.delta[q] > best_val) {
        best_val = data.delta[q];
        best = q;
      }
    if (best == Q) {
      // Every point is trimmed or selected, so epsilon is at most eps_tol / 2.
      res.converged = it.epsilon <= opt.eps_tol;
      break;
    }
    next = best;
  }
  return res;
}

}  // namespace rbgpc
