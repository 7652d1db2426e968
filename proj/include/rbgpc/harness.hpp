#pragma once

// Experiment configuration, reports, persisted offline artifacts and the
// command implementations behind the rbgpc CLI.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "rbgpc/gpcqoi.hpp"
#include "rbgpc/polybasis.hpp"
#include "rbgpc/quadrature.hpp"
#include "rbgpc/rbm.hpp"
#include "rbgpc/truthpde.hpp"

namespace rbgpc::harness {

enum class Distribution { Uniform, Beta22 };
enum class QuadratureKind { Tensor, Sparse };

struct ExperimentConfig {
  int K = 2;
  int P = 5;
  double A = 5.0;
  int nx = 35;
  int ny = 35;
  Distribution distribution = Distribution::Uniform;
  QuadratureKind quadrature = QuadratureKind::Tensor;
  int q = 40;       // tensor points per dimension
  int level = 15;   // sparse level
  QoiKind qoi = QoiKind::Mean;
  double eps_tol = 1e-6;
  std::size_t n_max = 60;
  std::uint64_t seed = 0;
  BetaMode beta = BetaMode::Analytic;
  std::string output_dir = "rbgpc_out";
  int threads = 1;
  double direct_budget_seconds = 3600.0;
  std::size_t node_cap = kDefaultNodeCap;

  bool operator==(const ExperimentConfig&) const = default;
};

// Field-level problems; empty means valid.
std::vector<std::string> validate(const ExperimentConfig& cfg);
// Throws Error(Config) listing every problem.
void check(const ExperimentConfig& cfg);

std::string to_json(const ExperimentConfig& cfg);
// Missing fields take their defaults; unknown fields and type errors are
// config errors. The result is validated.
ExperimentConfig config_from_json(const std::string& text);
ExperimentConfig load_config(const std::filesystem::path& path);
void save_config(const ExperimentConfig& cfg, const std::filesystem::path& path);

std::string to_string(Distribution d);
std::string to_string(BetaMode m);

// Builders for the modules' inputs.
std::vector<PolynomialFamily> families(const ExperimentConfig& cfg);
QuadratureRule training_rule(const ExperimentConfig& cfg);
MultiIndexSet basis_set(const ExperimentConfig& cfg);
AffineProblem problem(const ExperimentConfig& cfg);
// Stable FNV-1a hash of everything that defines the truth problem.
std::string problem_hash(const ExperimentConfig& cfg);

struct ConvergenceRow {
  std::size_t N = 0;
  double epsilon = 0.0;
  std::optional<double> xi_mean;
  std::optional<double> xi_norm;
  bool operator==(const ConvergenceRow&) const = default;
};

struct TimingRow {
  int K = 0;
  std::optional<double> t_direct;
  double t_offline = 0.0;
  double t_online = 0.0;
  std::optional<double> ratio;  // t_direct / (t_offline + t_online)
  bool operator==(const TimingRow&) const = default;
};

struct RunReport {
  std::vector<ConvergenceRow> convergence;
  TimingRow timing;
  double t_greedy = 0.0;  // offline breakdown: greedy only
  double t_cqm = 0.0;     // offline breakdown: C_QM precomputation
  std::vector<std::size_t> selected;
  std::vector<std::vector<double>> selected_parameters;
  std::size_t Q = 0;
  std::size_t M = 0;
  std::size_t N = 0;
  bool converged = false;
  double c_qm = 0.0;
};

void write_convergence_csv(const std::vector<ConvergenceRow>& rows, std::ostream& os);
std::vector<ConvergenceRow> read_convergence_csv(std::istream& is);
void write_timing_csv(const std::vector<TimingRow>& rows, std::ostream& os);
std::vector<TimingRow> read_timing_csv(std::istream& is);
std::string report_json(const RunReport& report);

// Offline artifact: meta.json, basis.f64 (dofs x N) and rfactor.f64, both
// column-major little-endian float64.
struct Artifact {
  ReducedBasisSpace space;
  std::vector<double> epsilon_history;
  std::vector<std::size_t> selected;
  bool converged = false;
  double c_qm = 0.0;
};

void save_artifact(const std::filesystem::path& dir, const ExperimentConfig& cfg,
                   const GreedyResult& result, double c_qm);
// Throws Error(Compatibility) when the artifact was built for another problem.
Artifact load_artifact(const std::filesystem::path& dir, const ExperimentConfig& cfg);
// Metadata without timestamps, used for determinism comparisons.
std::string artifact_metadata(const std::filesystem::path& dir, bool strip_timestamps = true);

// Command results. Exit codes follow the CLI convention.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNotConverged = 3;
inline constexpr int kExitBudget = 4;
inline constexpr int kExitCertification = 5;

struct OfflineResult {
  GreedyResult greedy;
  double c_qm = 0.0;
  double t_greedy = 0.0;
  double t_cqm = 0.0;
  int exit_code = kExitOk;
};

struct OnlineResult {
  GpcExpansion expansion;
  Eigen::VectorXd qoi_field;
  double seconds = 0.0;
};

struct DirectResult {
  GpcExpansion expansion;
  double seconds = 0.0;
  std::size_t truth_solves = 0;
};

struct ReproduceOptions {
  bool force_direct = false;  // run the baseline even above the budget
  bool skip_direct = false;
};

struct ReproduceResult {
  RunReport report;
  int exit_code = kExitOk;
};

struct ValidationCheck {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  bool pass = false;
};

struct ValidationResult {
  std::vector<ValidationCheck> checks;
  std::size_t N = 0;  // reduced dimension that was certified
  std::size_t violations() const;
  int exit_code() const { return violations() ? kExitCertification : kExitOk; }
};

// Each command writes its outputs below cfg.output_dir.
OfflineResult cmd_offline(const ExperimentConfig& cfg);
OnlineResult cmd_online(const ExperimentConfig& cfg);
// Throws Error(Budget) when the projected cost exceeds the budget and
// force is false.
DirectResult cmd_direct(const ExperimentConfig& cfg, bool force = false);
ReproduceResult cmd_reproduce(const ExperimentConfig& cfg, ReproduceOptions opts = {});
// Certification suite in exact-eig mode on the configured problem.
ValidationResult cmd_validate(const ExperimentConfig& cfg);

}  // namespace rbgpc::harness
