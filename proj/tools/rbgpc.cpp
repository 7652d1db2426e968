// rbgpc: offline / online / direct / reproduce / validate.

#include <CLI11.hpp>
#include <cstdio>
#include <iostream>

#include "rbgpc/error.hpp"
#include "rbgpc/harness.hpp"
#include "rbgpc/kernels.hpp"

using namespace rbgpc;
using namespace rbgpc::harness;

namespace {

struct Common {
  std::string config;
  std::string output_dir;
  int threads = 0;
  std::string kernels;
};

void add_common(CLI::App* app, Common& c) {
  app->add_option("-c,--config", c.config, "experiment config (JSON); defaults if omitted");
  app->add_option("-o,--output-dir", c.output_dir, "override output_dir");
  app->add_option("-j,--threads", c.threads, "override thread count");
  app->add_option("--kernels", c.kernels, "scalar | avx2 | neon");
}

ExperimentConfig resolve(const Common& c) {
  ExperimentConfig cfg = c.config.empty() ? ExperimentConfig{} : load_config(c.config);
  if (!c.output_dir.empty()) cfg.output_dir = c.output_dir;
  if (c.threads > 0) cfg.threads = c.threads;
  check(cfg);
  if (!c.kernels.empty()) kernels::set_backend(kernels::parse_backend(c.kernels));
  return cfg;
}

int exit_code_for(ErrorKind k) {
  switch (k) {
    case ErrorKind::Config:
    case ErrorKind::ParameterDomain: return kExitConfig;
    case ErrorKind::Budget: return kExitBudget;
    default: return 1;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hybrid reduced basis / generalized polynomial chaos solver"};
  app.require_subcommand(1);

  Common c;
  bool force = false, force_direct = false, skip_direct = false, print_config = false;
  auto* off = app.add_subcommand("offline", "greedy reduced basis construction");
  auto* on = app.add_subcommand("online", "gPC coefficients from the stored reduced basis");
  auto* dir = app.add_subcommand("direct", "truth gPC baseline by brute-force quadrature");
  auto* rep = app.add_subcommand("reproduce", "offline + online + direct with error/timing tables");
  auto* val = app.add_subcommand("validate", "certification suite in exact-eig mode");
  for (auto* s : {off, on, dir, rep, val}) add_common(s, c);
  dir->add_flag("--force", force, "run even above direct_budget_seconds");
  rep->add_flag("--force-direct", force_direct, "run the baseline even above the budget");
  rep->add_flag("--skip-direct", skip_direct, "hybrid path only");
  auto* cfgcmd = app.add_subcommand("config", "print the resolved configuration");
  add_common(cfgcmd, c);
  cfgcmd->add_flag("--print", print_config);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitConfig;
  }

  try {
    const ExperimentConfig cfg = resolve(c);
    if (cfgcmd->parsed()) {
      std::cout << to_json(cfg) << '\n';
      return kExitOk;
    }
    if (off->parsed()) {
      const OfflineResult r = cmd_offline(cfg);
      std::printf("offline: N = %zu, epsilon = %.3e, converged = %s, C_QM = %.6g\n",
                  r.greedy.space.dim(),
                  r.greedy.history.empty() ? 0.0 : r.greedy.history.back().epsilon,
                  r.greedy.converged ? "yes" : "no", r.c_qm);
      std::printf("offline time: greedy %.3f s, C_QM %.3f s\n", r.t_greedy, r.t_cqm);
      return r.exit_code;
    }
    if (on->parsed()) {
      const OnlineResult r = cmd_online(cfg);
      std::printf("online: M = %zu, N = %zu, %.3f s\n", r.expansion.size(),
                  r.expansion.reduced_dim, r.seconds);
      return kExitOk;
    }
    if (dir->parsed()) {
      const DirectResult r = cmd_direct(cfg, force);
      std::printf("direct: %zu truth solves, %.3f s\n", r.truth_solves, r.seconds);
      return kExitOk;
    }
    if (rep->parsed()) {
      const ReproduceResult r = cmd_reproduce(cfg, {force_direct, skip_direct});
      const RunReport& R = r.report;
      std::printf("Q = %zu, M = %zu, N = %zu, converged = %s\n", R.Q, R.M, R.N,
                  R.converged ? "yes" : "no");
      for (const auto& row : R.convergence)
        if (row.xi_mean)
          std::printf("N=%3zu  eps=%.3e  xi_mean=%.3e  xi_norm=%.3e\n", row.N, row.epsilon,
                      *row.xi_mean, *row.xi_norm);
        else
          std::printf("N=%3zu  eps=%.3e\n", row.N, row.epsilon);
      std::printf("offline %.3f s, online %.3f s", R.timing.t_offline, R.timing.t_online);
      if (R.timing.t_direct)
        std::printf(", direct %.3f s, ratio %.2f", *R.timing.t_direct, *R.timing.ratio);
      std::printf("\n");
      return r.exit_code;
    }
    if (val->parsed()) {
      const ValidationResult r = cmd_validate(cfg);
      for (const auto& ch : r.checks)
        std::printf("%s  %s: %.3e <= %.3e\n", ch.pass ? "PASS" : "FAIL", ch.name.c_str(), ch.lhs,
                    ch.rhs);
      std::printf("%zu violation(s)\n", r.violations());
      return r.exit_code();
    }
  } catch (const Error& e) {
    std::fprintf(stderr, "rbgpc: %s\n", e.what());
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    std::fprintf(stderr, "rbgpc: %s\n", e.what());
    return 1;
  }
  return 1;
}
