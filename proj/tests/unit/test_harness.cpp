#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "rbgpc/binio.hpp"
#include "rbgpc/error.hpp"
#include "rbgpc/harness.hpp"

using namespace rbgpc;
using namespace rbgpc::harness;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("rbgpc_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

ExperimentConfig small_config(const std::string& name) {
  ExperimentConfig c;
  c.nx = c.ny = 9;
  c.q = 6;
  c.P = 3;
  c.eps_tol = 1e-6;
  c.n_max = 15;
  c.output_dir = scratch(name).string();
  return c;
}

}  // namespace

TEST_CASE("harness: config defaults and round trip") {
  const ExperimentConfig d = config_from_json("{}");
  CHECK(d.K == 2);
  CHECK(d.P == 5);
  CHECK(d.A == 5.0);
  CHECK(d.nx == 35);
  CHECK(d.ny == 35);
  CHECK(d.distribution == Distribution::Uniform);
  CHECK(d.quadrature == QuadratureKind::Tensor);
  CHECK(d.q == 40);
  CHECK(d.qoi == QoiKind::Mean);
  CHECK(d.eps_tol == 1e-6);
  CHECK(d.n_max == 60);
  CHECK(d.seed == 0);
  CHECK(d.beta == BetaMode::Analytic);
  CHECK(config_from_json(to_json(d)) == d);

  ExperimentConfig c;
  c.K = 4;
  c.A = 5.123456789012345;
  c.distribution = Distribution::Beta22;
  c.quadrature = QuadratureKind::Sparse;
  c.level = 15;
  c.qoi = QoiKind::NormSquared;
  c.eps_tol = 3.3e-7;
  c.seed = 12345678901234ull;
  c.beta = BetaMode::ExactEig;
  CHECK(config_from_json(to_json(c)) == c);

  const fs::path dir = scratch("cfg");
  save_config(c, dir / "c.json");
  CHECK(load_config(dir / "c.json") == c);
}

TEST_CASE("harness: config validation diagnostics") {
  auto message = [](const std::string& js) {
    try {
      config_from_json(js);
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::Config);
      return std::string(e.what());
    }
    return std::string();
  };
  const std::string m = message(R"({"K": 0, "eps_tol": -1})");
  CHECK(m.find("K:") != std::string::npos);
  CHECK(m.find("eps_tol:") != std::string::npos);
  CHECK(message(R"({"colour": 3})").find("colour: unknown field") != std::string::npos);
  CHECK(message(R"({"K": "two"})").find("wrong type") != std::string::npos);
  CHECK(message(R"({"A": 1.0})").find("A:") != std::string::npos);
  CHECK(message("{nope").find("not valid JSON") != std::string::npos);
  CHECK(message(R"({"quadrature": {"type": "simplex"}})").find("quadrature.type") != std::string::npos);
  CHECK_THROWS_AS(load_config("/nonexistent/cfg.json"), Error);
}

TEST_CASE("harness: CSV tables parse back exactly") {
  const std::vector<ConvergenceRow> rows = {{1, 0.1, 0.0123456789012345678, 1e-300},
                                            {2, 1.0 / 3, std::nullopt, std::nullopt}};
  std::stringstream ss;
  write_convergence_csv(rows, ss);
  CHECK(read_convergence_csv(ss) == rows);
  const std::vector<TimingRow> t = {{2, 144.25, 0.4451, 0.0031, 320.1}, {4, std::nullopt, 1.5, 0.2, std::nullopt}};
  std::stringstream st;
  write_timing_csv(t, st);
  CHECK(read_timing_csv(st) == t);
  std::stringstream bad("N,eps\n1,2\n");
  CHECK_THROWS_AS(read_convergence_csv(bad), Error);
}

TEST_CASE("harness: binary float64 files") {
  const fs::path dir = scratch("bin");
  const std::vector<double> v = {1.5, -0.0, 1e-310, 3.141592653589793};
  write_f64(dir / "a.f64", v);
  CHECK(fs::file_size(dir / "a.f64") == 32);
  CHECK(read_f64(dir / "a.f64") == v);
  CHECK_THROWS_AS(read_f64(dir / "a.f64", 5), Error);
  std::ifstream is(dir / "a.f64", std::ios::binary);
  unsigned char b[8];
  is.read(reinterpret_cast<char*>(b), 8);
  // 1.5 = 0x3FF8000000000000, little-endian
  CHECK(b[7] == 0x3F);
  CHECK(b[6] == 0xF8);
  CHECK(b[0] == 0x00);

  GpcExpansion e;
  e.set = MultiIndexSet(2, 2);
  e.nx = 2;
  e.ny = 3;
  e.cell_area = 0.25;
  e.coefficients = Eigen::MatrixXd::Random(6, 6);
  e.source = FieldSource::ReducedBasis;
  e.reduced_dim = 4;
  write_expansion(dir, "exp", e);
  const GpcExpansion r = read_expansion(dir, "exp");
  CHECK(r.coefficients == e.coefficients);
  CHECK(r.reduced_dim == 4);
  CHECK(r.set.size() == 6);
}

TEST_CASE("harness: offline artifact, determinism and compatibility") {
  const ExperimentConfig c = small_config("offline");
  const OfflineResult a = cmd_offline(c);
  CHECK(a.exit_code == kExitOk);
  const std::string meta_a = artifact_metadata(fs::path(c.output_dir) / "artifact");
  const OfflineResult b = cmd_offline(c);
  CHECK(artifact_metadata(fs::path(c.output_dir) / "artifact") == meta_a);
  CHECK(a.greedy.selected == b.greedy.selected);

  const Artifact art = load_artifact(fs::path(c.output_dir) / "artifact", c);
  CHECK(art.space.dim() == a.greedy.space.dim());
  CHECK(art.space.basis() == a.greedy.space.basis());
  CHECK(art.epsilon_history.size() == a.greedy.history.size());

  ExperimentConfig other = c;
  other.A = 6.0;
  try {
    load_artifact(fs::path(c.output_dir) / "artifact", other);
    FAIL("expected a compatibility error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Compatibility);
  }
  CHECK(problem_hash(c) != problem_hash(other));

  ExperimentConfig tight = c;
  tight.eps_tol = 1e-15;
  tight.n_max = 2;
  CHECK(cmd_offline(tight).exit_code == kExitNotConverged);
}

TEST_CASE("harness: online performs no truth solves; direct performs Q") {
  ExperimentConfig c = small_config("online");
  cmd_offline(c);
  const std::size_t before = counters::truth_solves();
  const OnlineResult on = cmd_online(c);
  CHECK(counters::truth_solves() == before);
  CHECK(on.expansion.size() == 10);
  CHECK(fs::exists(fs::path(c.output_dir) / "online" / "rb_coefficients.f64"));

  const DirectResult d = cmd_direct(c);
  CHECK(d.truth_solves == 36);
  const double xi = qoi_error(d.expansion, on.expansion, {QoiKind::Mean, 1.0});
  CHECK(xi <= 1e-6);

  c.direct_budget_seconds = 0.0;
  try {
    cmd_direct(c);
    FAIL("expected a budget refusal");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Budget);
  }
  CHECK(cmd_direct(c, true).truth_solves == 36);
}

TEST_CASE("harness: degenerate single-node rule") {
  ExperimentConfig c = small_config("q1");
  c.q = 1;
  c.P = 2;
  const DirectResult d = cmd_direct(c);
  const AffineProblem p = problem(c);
  const double mu[] = {0.0, 0.0};
  const Eigen::VectorXd u = truth_solve(p, mu).field;
  // Phi_m(0) for the P = 2 Legendre set: 1, 0, 0, -sqrt(5)/2, 0, -sqrt(5)/2
  CHECK((d.expansion.coefficients.col(0) - u).norm() <= 1e-14);
  CHECK(d.expansion.coefficients.col(1).norm() == 0.0);
  CHECK((d.expansion.coefficients.col(3) + std::sqrt(5.0) / 2 * u).norm() <= 1e-13);
}

TEST_CASE("harness: reproduce writes parseable tables") {
  const ExperimentConfig c = small_config("reproduce");
  const ReproduceResult r = cmd_reproduce(c);
  CHECK(r.exit_code == kExitOk);
  REQUIRE(r.report.timing.ratio.has_value());
  std::ifstream conv(fs::path(c.output_dir) / "convergence.csv");
  CHECK(read_convergence_csv(conv) == r.report.convergence);
  std::ifstream tim(fs::path(c.output_dir) / "timing.csv");
  CHECK(read_timing_csv(tim) == std::vector<TimingRow>{r.report.timing});
  for (const auto& row : r.report.convergence) CHECK(row.xi_mean.has_value());

  const ReproduceResult h = cmd_reproduce(c, {false, true});
  CHECK_FALSE(h.report.timing.ratio.has_value());
}

TEST_CASE("harness: validate passes on a small instance") {
  ExperimentConfig c = small_config("validate");
  c.n_max = 4;
  c.eps_tol = 1e-14;
  const ValidationResult v = cmd_validate(c);
  CHECK(v.violations() == 0);
  CHECK(v.exit_code() == kExitOk);
  CHECK(v.checks.size() == 2 + 10 + 3);
}
