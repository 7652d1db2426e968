#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>

#include "rbgpc/binio.hpp"
#include "rbgpc/error.hpp"
#include "rbgpc/harness.hpp"

namespace rbgpc::harness {
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::ofstream open_out(const fs::path& path) {
  fs::create_directories(path.parent_path());
  std::ofstream os(path);
  if (!os) raise(ErrorKind::Io, "cannot write " + path.string());
  return os;
}

fs::path artifact_dir(const ExperimentConfig& cfg) { return fs::path(cfg.output_dir) / "artifact"; }

void write_qoi_fields(const fs::path& dir, const std::string& stem, const GpcExpansion& e,
                      const SpatialGrid& grid) {
  for (QoiKind k : {QoiKind::Mean, QoiKind::Variance, QoiKind::NormSquared}) {
    const Eigen::VectorXd f = qoi(e, {k, 1.0});
    auto os = open_out(dir / (stem + "_" + to_string(k) + ".csv"));
    write_field_csv(grid, {f.data(), static_cast<std::size_t>(f.size())}, os);
  }
}

// Seconds for one truth solve, measured after a warm-up solve.
double probe_solve_seconds(const AffineProblem& prob, const QuadratureRule& rule) {
  truth_solve(prob, rule.node(0));
  const auto t0 = Clock::now();
  truth_solve(prob, rule.node(0));
  return since(t0);
}

}  // namespace

OfflineResult cmd_offline(const ExperimentConfig& cfg) {
  check(cfg);
  const AffineProblem prob = problem(cfg);
  const QuadratureRule rule = training_rule(cfg);
  const MultiIndexSet set = basis_set(cfg);
  const auto fam = families(cfg);

  OfflineResult out{GreedyResult{ReducedBasisSpace(prob.coefficients(), prob.grid().cell_area(),
                                                   prob.dofs()),
                                 {}, {}, {}, false}};
  auto t0 = Clock::now();
  out.c_qm = c_qm(b_qm(rule, set, fam), cfg.qoi);
  out.t_cqm = since(t0);

  GreedyOptions opt;
  opt.eps_tol = cfg.eps_tol;
  opt.n_max = cfg.n_max;
  opt.c_qm = out.c_qm;
  opt.seed = cfg.seed;
  opt.beta_mode = cfg.beta;
  opt.threads = cfg.threads;
  t0 = Clock::now();
  out.greedy = greedy_build(prob, rule, opt);
  out.t_greedy = since(t0);

  save_artifact(artifact_dir(cfg), cfg, out.greedy, out.c_qm);
  std::vector<ConvergenceRow> rows;
  for (const auto& it : out.greedy.history) rows.push_back({it.n, it.epsilon, {}, {}});
  auto os = open_out(fs::path(cfg.output_dir) / "epsilon.csv");
  write_convergence_csv(rows, os);
  out.exit_code = out.greedy.converged ? kExitOk : kExitNotConverged;
  return out;
}

OnlineResult cmd_online(const ExperimentConfig& cfg) {
  check(cfg);
  const Artifact art = load_artifact(artifact_dir(cfg), cfg);
  const QuadratureRule rule = training_rule(cfg);
  const MultiIndexSet set = basis_set(cfg);
  const SpatialGrid grid(cfg.nx, cfg.ny);

  const std::size_t solves0 = counters::truth_solves();
  const std::size_t facts0 = counters::factorizations();
  OnlineResult out;
  const auto t0 = Clock::now();
  out.expansion = rb_gpc(art.space, rule, set, grid, cfg.threads);
  out.qoi_field = qoi(out.expansion, {cfg.qoi, 1.0});
  out.seconds = since(t0);
  if (counters::truth_solves() != solves0 || counters::factorizations() != facts0)
    raise(ErrorKind::Numeric, "online phase performed truth-sized solves");

  const fs::path dir = fs::path(cfg.output_dir) / "online";
  write_expansion(dir, "rb_coefficients", out.expansion);
  write_qoi_fields(dir, "rb", out.expansion, grid);
  return out;
}

DirectResult cmd_direct(const ExperimentConfig& cfg, bool force) {
  check(cfg);
  const AffineProblem prob = problem(cfg);
  const QuadratureRule rule = training_rule(cfg);
  const MultiIndexSet set = basis_set(cfg);

  const double projected = probe_solve_seconds(prob, rule) * static_cast<double>(rule.size());
  if (projected > cfg.direct_budget_seconds && !force)
    raise(ErrorKind::Budget, "direct baseline needs about " + std::to_string(projected) +
                                 " s for " + std::to_string(rule.size()) +
                                 " truth solves, above the budget of " +
                                 std::to_string(cfg.direct_budget_seconds) + " s (use --force)");

  DirectResult out;
  const std::size_t solves0 = counters::truth_solves();
  const auto t0 = Clock::now();
  out.expansion = direct_gpc(prob, rule, set);
  out.seconds = since(t0);
  out.truth_solves = counters::truth_solves() - solves0;

  const fs::path dir = fs::path(cfg.output_dir) / "direct";
  write_expansion(dir, "truth_coefficients", out.expansion);
  write_qoi_fields(dir, "truth", out.expansion, prob.grid());
  return out;
}

ReproduceResult cmd_reproduce(const ExperimentConfig& cfg, ReproduceOptions opts) {
  check(cfg);
  ReproduceResult res;
  RunReport& rep = res.report;

  const OfflineResult off = cmd_offline(cfg);
  const OnlineResult on = cmd_online(cfg);
  res.exit_code = off.exit_code;

  rep.t_greedy = off.t_greedy;
  rep.t_cqm = off.t_cqm;
  rep.timing.K = cfg.K;
  rep.timing.t_offline = off.t_greedy + off.t_cqm;
  rep.timing.t_online = on.seconds;
  rep.selected = off.greedy.selected;
  rep.selected_parameters = off.greedy.space.parameters();
  rep.Q = off.greedy.data.delta.size();
  rep.M = on.expansion.size();
  rep.N = off.greedy.space.dim();
  rep.converged = off.greedy.converged;
  rep.c_qm = off.c_qm;

  std::optional<DirectResult> direct;
  if (!opts.skip_direct) {
    try {
      direct = cmd_direct(cfg, opts.force_direct);
    } catch (const Error& err) {
      if (err.kind() != ErrorKind::Budget) throw;
    }
  }

  const QuadratureRule rule = training_rule(cfg);
  const MultiIndexSet set = basis_set(cfg);
  const SpatialGrid grid(cfg.nx, cfg.ny);
  for (const auto& it : off.greedy.history) {
    ConvergenceRow row{it.n, it.epsilon, {}, {}};
    if (direct) {
      const GpcExpansion e =
          it.n == rep.N ? on.expansion
                        : rb_gpc(off.greedy.space.truncated(it.n), rule, set, grid, cfg.threads);
      row.xi_mean = qoi_error(direct->expansion, e, {QoiKind::Mean, 1.0});
      row.xi_norm = qoi_error(direct->expansion, e, {QoiKind::NormSquared, 1.0});
    }
    rep.convergence.push_back(row);
  }
  if (direct) {
    rep.timing.t_direct = direct->seconds;
    rep.timing.ratio = direct->seconds / (rep.timing.t_offline + rep.timing.t_online);
  }

  const fs::path dir(cfg.output_dir);
  {
    auto os = open_out(dir / "convergence.csv");
    write_convergence_csv(rep.convergence, os);
  }
  {
    auto os = open_out(dir / "timing.csv");
    write_timing_csv({rep.timing}, os);
  }
  {
    auto os = open_out(dir / "report.json");
    os << report_json(rep) << '\n';
  }
  return res;
}

std::size_t ValidationResult::violations() const {
  std::size_t n = 0;
  for (const auto& c : checks) n += !c.pass;
  return n;
}

ValidationResult cmd_validate(const ExperimentConfig& cfg_in) {
  ExperimentConfig cfg = cfg_in;
  cfg.beta = BetaMode::ExactEig;
  check(cfg);
  const AffineProblem prob = problem(cfg);
  const QuadratureRule rule = training_rule(cfg);
  const MultiIndexSet set = basis_set(cfg);
  const auto fam = families(cfg);
  const SpatialGrid& grid = prob.grid();
  const std::vector<double> bqm = b_qm(rule, set, fam);
  GreedyOptions opt;
  opt.eps_tol = cfg.eps_tol;
  opt.n_max = cfg.n_max;
  opt.c_qm = c_qm(bqm, cfg.qoi);
  opt.seed = cfg.seed;
  opt.beta_mode = BetaMode::ExactEig;
  opt.threads = cfg.threads;
  const GreedyResult g = greedy_build(prob, rule, opt);
  const EstimateSweep sweep =
      evaluate_estimates(prob, g.space, rule, BetaMode::ExactEig, g.data.beta, cfg.threads);

  ValidationResult out;
  out.N = g.space.dim();
  const double analytic = beta_lb(prob, rule.node(0), BetaMode::Analytic);
  double worst_beta = -std::numeric_limits<double>::infinity();
  double worst_cert = worst_beta;
  std::size_t q = 0;
  const GpcExpansion truth = pseudospectral_coefficients(
      [&](std::span<const double> mu) {
        TruthSolution t = truth_solve(prob, mu);
        const RbSolution s = rb_solve(g.space, mu);
        const double err = grid.norm(Eigen::VectorXd(t.field - g.space.lift(s.coeffs)));
        const double bound = sweep.residual[q] / std::sqrt(sweep.beta[q]);
        worst_cert = std::max(worst_cert, err - bound);
        worst_beta = std::max(worst_beta, analytic - sweep.beta[q]);
        ++q;
        return t.field;
      },
      rule, set, grid);
  const GpcExpansion rb = rb_gpc(g.space, rule, set, grid, cfg.threads);
  // Round-off slack for nodes the basis reproduces exactly.
  const double slack = 1e-12 * uniform_bound(prob);
  out.checks.push_back({"pointwise certification: max(err - residual/sqrt(beta))", worst_cert,
                        slack, worst_cert <= slack});
  out.checks.push_back({"analytic beta <= exact beta: max(analytic - exact)", worst_beta, 0.0,
                        worst_beta <= 0.0});

  const auto coef_bounds = coefficient_error_bound_check(truth, rb, bqm, sweep.delta_w);
  for (std::size_t m = 0; m < coef_bounds.terms.size(); ++m)
    out.checks.push_back({"coefficient bound m=" + std::to_string(m + 1), coef_bounds.terms[m].error,
                          coef_bounds.terms[m].bound, coef_bounds.terms[m].pass()});
  const double U = uniform_bound(prob);
  for (QoiKind k : {QoiKind::Mean, QoiKind::Variance, QoiKind::NormSquared}) {
    const QoiBound b = qoi_bound_check(truth, rb, make_qoi_spec(k, U), bqm, sweep.delta_w);
    out.checks.push_back({"qoi bound " + to_string(k), b.error, b.bound, b.pass()});
  }

  auto os = open_out(fs::path(cfg.output_dir) / "validation.csv");
  os << "check,lhs,rhs,pass\n";
  char buf[64];
  for (const auto& c : out.checks) {
    os << '"' << c.name << "\",";
    std::snprintf(buf, sizeof buf, "%.17g,", c.lhs);
    os << buf;
    std::snprintf(buf, sizeof buf, "%.17g,", c.rhs);
    os << buf << (c.pass ? 1 : 0) << '\n';
  }
  return out;
}

}  // namespace rbgpc::harness
