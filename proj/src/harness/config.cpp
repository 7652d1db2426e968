#include <cmath>
#include <cstdio>
#include <fstream>
#include <json.hpp>
#include <set>
#include <sstream>

#include "rbgpc/error.hpp"
#include "rbgpc/harness.hpp"

namespace rbgpc::harness {
using nlohmann::json;

std::string to_string(Distribution d) { return d == Distribution::Uniform ? "uniform" : "beta22"; }
std::string to_string(BetaMode m) { return m == BetaMode::Analytic ? "analytic" : "exact-eig"; }

std::vector<std::string> validate(const ExperimentConfig& c) {
  std::vector<std::string> d;
  if (c.K < 1) d.push_back("K: must be >= 1");
  if (c.P < 0) d.push_back("P: must be >= 0");
  if (!(std::isfinite(c.A) && c.A > 0)) d.push_back("A: must be positive and finite");
  if (c.K >= 1 && std::isfinite(c.A) && c.A > 0 && cosine_ellipticity_floor(c.K, c.A) <= 0)
    d.push_back("A: must exceed sum_{k<=K} 1/k^2 for a uniformly elliptic coefficient");
  if (c.nx < 1 || c.ny < 1) d.push_back("grid: nx and ny must be >= 1");
  if (c.quadrature == QuadratureKind::Tensor && c.q < 1) d.push_back("quadrature.q: must be >= 1");
  if (c.quadrature == QuadratureKind::Sparse && c.level < 0)
    d.push_back("quadrature.level: must be >= 0");
  if (!(c.eps_tol > 0)) d.push_back("eps_tol: must be > 0");
  if (c.n_max < 1) d.push_back("n_max: must be >= 1");
  if (c.threads < 1) d.push_back("threads: must be >= 1");
  if (!(c.direct_budget_seconds >= 0)) d.push_back("direct_budget_seconds: must be >= 0");
  if (c.node_cap < 1) d.push_back("node_cap: must be >= 1");
  if (c.output_dir.empty()) d.push_back("output_dir: must be nonempty");
  return d;
}

void check(const ExperimentConfig& cfg) {
  const auto d = validate(cfg);
  if (d.empty()) return;
  std::string msg = "invalid configuration:";
  for (const auto& s : d) msg += "\n  " + s;
  raise(ErrorKind::Config, msg);
}

std::string to_json(const ExperimentConfig& c) {
  json j;
  j["K"] = c.K;
  j["P"] = c.P;
  j["A"] = c.A;
  j["grid"] = {{"nx", c.nx}, {"ny", c.ny}};
  j["distribution"] = to_string(c.distribution);
  if (c.quadrature == QuadratureKind::Tensor)
    j["quadrature"] = {{"type", "tensor"}, {"q", c.q}};
  else
    j["quadrature"] = {{"type", "sparse"}, {"level", c.level}};
  j["qoi"] = to_string(c.qoi);
  j["eps_tol"] = c.eps_tol;
  j["n_max"] = c.n_max;
  j["seed"] = c.seed;
  j["beta"] = to_string(c.beta);
  j["output_dir"] = c.output_dir;
  j["threads"] = c.threads;
  j["direct_budget_seconds"] = c.direct_budget_seconds;
  j["node_cap"] = c.node_cap;
  return j.dump(2);
}

namespace {

template <class T>
void read_field(const json& j, const char* key, T& out, std::vector<std::string>& diag) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception&) {
    diag.push_back(std::string(key) + ": wrong type (" + j.at(key).dump() + ")");
  }
}

void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& where,
                std::vector<std::string>& diag) {
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!allowed.count(it.key())) diag.push_back(where + it.key() + ": unknown field");
}

}  // namespace

ExperimentConfig config_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& err) {
    raise(ErrorKind::Config, std::string("config is not valid JSON: ") + err.what());
  }
  if (!j.is_object()) raise(ErrorKind::Config, "config must be a JSON object");

  ExperimentConfig c;
  std::vector<std::string> diag;
  check_keys(j,
             {"K", "P", "A", "grid", "distribution", "quadrature", "qoi", "eps_tol", "n_max",
              "seed", "beta", "output_dir", "threads", "direct_budget_seconds", "node_cap"},
             "", diag);
  read_field(j, "K", c.K, diag);
  read_field(j, "P", c.P, diag);
  read_field(j, "A", c.A, diag);
  if (j.contains("grid")) {
    const json& g = j["grid"];
    if (!g.is_object()) {
      diag.push_back("grid: must be an object {nx, ny}");
    } else {
      check_keys(g, {"nx", "ny"}, "grid.", diag);
      read_field(g, "nx", c.nx, diag);
      read_field(g, "ny", c.ny, diag);
    }
  }
  if (j.contains("distribution")) {
    std::string s;
    read_field(j, "distribution", s, diag);
    if (s == "uniform") c.distribution = Distribution::Uniform;
    else if (s == "beta22") c.distribution = Distribution::Beta22;
    else diag.push_back("distribution: expected uniform | beta22, got '" + s + "'");
  }
  if (j.contains("quadrature")) {
    const json& q = j["quadrature"];
    if (!q.is_object()) {
      diag.push_back("quadrature: must be an object {type, q | level}");
    } else {
      check_keys(q, {"type", "q", "level"}, "quadrature.", diag);
      std::string t = "tensor";
      read_field(q, "type", t, diag);
      if (t == "tensor") c.quadrature = QuadratureKind::Tensor;
      else if (t == "sparse") c.quadrature = QuadratureKind::Sparse;
      else diag.push_back("quadrature.type: expected tensor | sparse, got '" + t + "'");
      read_field(q, "q", c.q, diag);
      read_field(q, "level", c.level, diag);
    }
  }
  if (j.contains("qoi")) {
    std::string s;
    read_field(j, "qoi", s, diag);
    if (s == "mean") c.qoi = QoiKind::Mean;
    else if (s == "variance") c.qoi = QoiKind::Variance;
    else if (s == "norm-squared") c.qoi = QoiKind::NormSquared;
    else diag.push_back("qoi: expected mean | variance | norm-squared, got '" + s + "'");
  }
  read_field(j, "eps_tol", c.eps_tol, diag);
  read_field(j, "n_max", c.n_max, diag);
  read_field(j, "seed", c.seed, diag);
  if (j.contains("beta")) {
    std::string s;
    read_field(j, "beta", s, diag);
    if (s == "analytic") c.beta = BetaMode::Analytic;
    else if (s == "exact-eig") c.beta = BetaMode::ExactEig;
    else diag.push_back("beta: expected analytic | exact-eig, got '" + s + "'");
  }
  read_field(j, "output_dir", c.output_dir, diag);
  read_field(j, "threads", c.threads, diag);
  read_field(j, "direct_budget_seconds", c.direct_budget_seconds, diag);
  read_field(j, "node_cap", c.node_cap, diag);

  for (auto& s : validate(c)) diag.push_back(s);
  if (!diag.empty()) {
    std::string msg = "invalid configuration:";
    for (const auto& s : diag) msg += "\n  " + s;
    raise(ErrorKind::Config, msg);
  }
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) raise(ErrorKind::Config, "cannot read config " + path.string());
  std::stringstream ss;
  ss << is.rdbuf();
  return config_from_json(ss.str());
}

void save_config(const ExperimentConfig& cfg, const std::filesystem::path& path) {
  std::ofstream os(path);
  if (!os) raise(ErrorKind::Io, "cannot write " + path.string());
  os << to_json(cfg) << '\n';
}

std::vector<PolynomialFamily> families(const ExperimentConfig& cfg) {
  const PolynomialFamily f = cfg.distribution == Distribution::Uniform
                                 ? PolynomialFamily::legendre()
                                 : PolynomialFamily::beta_distribution(2.0, 2.0);
  return std::vector<PolynomialFamily>(static_cast<std::size_t>(cfg.K), f);
}

QuadratureRule training_rule(const ExperimentConfig& cfg) {
  const auto fam = families(cfg);
  if (cfg.quadrature == QuadratureKind::Tensor) return tensor_gauss_rule(fam, cfg.q, cfg.node_cap);
  return sparse_rule(fam, cfg.level, cfg.node_cap);
}

MultiIndexSet basis_set(const ExperimentConfig& cfg) { return total_degree_set(cfg.K, cfg.P); }

AffineProblem problem(const ExperimentConfig& cfg) {
  return assemble_cosine_problem(cfg.K, cfg.A, SpatialGrid(cfg.nx, cfg.ny));
}

std::string problem_hash(const ExperimentConfig& cfg) {
  char a[64];
  std::snprintf(a, sizeof a, "%.17g", cfg.A);
  const std::string key = "diffusion-cos-series;K=" + std::to_string(cfg.K) + ";A=" + a +
                          ";nx=" + std::to_string(cfg.nx) + ";ny=" + std::to_string(cfg.ny);
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : key) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  char out[17];
  std::snprintf(out, sizeof out, "%016llx", static_cast<unsigned long long>(h));
  return out;
}

}  // namespace rbgpc::harness
