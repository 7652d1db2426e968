#include <chrono>
#include <ctime>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "rbgpc/binio.hpp"
#include "rbgpc/error.hpp"
#include "rbgpc/harness.hpp"

namespace rbgpc::harness {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kFormatVersion = 1;

json read_json(const fs::path& path) {
  std::ifstream is(path);
  if (!is) raise(ErrorKind::Io, "cannot open " + path.string());
  try {
    return json::parse(is);
  } catch (const json::exception& err) {
    raise(ErrorKind::Io, path.string() + ": " + err.what());
  }
}

}  // namespace

void save_artifact(const fs::path& dir, const ExperimentConfig& cfg, const GreedyResult& result,
                   double c_qm) {
  fs::create_directories(dir);
  const ReducedBasisSpace& s = result.space;
  const Eigen::MatrixXd& basis = s.basis();
  const Eigen::MatrixXd& R = s.rfactor();
  write_f64(dir / "basis.f64", {basis.data(), static_cast<std::size_t>(basis.size())});
  write_f64(dir / "rfactor.f64", {R.data(), static_cast<std::size_t>(R.size())});

  json j;
  j["format"] = "rbgpc-offline";
  j["version"] = kFormatVersion;
  j["problem_hash"] = problem_hash(cfg);
  j["config"] = json::parse(to_json(cfg));
  j["beta_mode"] = to_string(cfg.beta);
  RuleProvenance prov;
  if (cfg.quadrature == QuadratureKind::Tensor) {
    prov.kind = RuleProvenance::Kind::Tensor;
    prov.points_per_dim.assign(static_cast<std::size_t>(cfg.K), cfg.q);
  } else {
    prov.kind = RuleProvenance::Kind::Sparse;
    prov.level = cfg.level;
  }
  j["rule"] = prov.describe();
  j["c_qm"] = c_qm;
  j["converged"] = result.converged;
  j["selected"] = result.selected;
  j["selected_parameters"] = s.parameters();
  json hist = json::array();
  for (const auto& it : result.history)
    hist.push_back({{"N", it.n},
                    {"selected", it.selected},
                    {"epsilon", it.epsilon},
                    {"max_delta", it.max_delta},
                    {"active_before", it.active_before},
                    {"active_after", it.active_after}});
  j["history"] = hist;
  j["q_trim"] = result.data.q_trim;
  j["arrays"] = {
      {"basis", {{"file", "basis.f64"}, {"shape", {basis.rows(), basis.cols()}},
                 {"order", "column-major"}, {"dtype", "float64-le"}}},
      {"rfactor", {{"file", "rfactor.f64"}, {"shape", {R.rows(), R.cols()}},
                   {"order", "column-major"}, {"dtype", "float64-le"}}}};
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  char stamp[32];
  std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  j["created"] = stamp;

  std::ofstream os(dir / "meta.json");
  if (!os) raise(ErrorKind::Io, "cannot write " + (dir / "meta.json").string());
  os << j.dump(2) << '\n';
}

Artifact load_artifact(const fs::path& dir, const ExperimentConfig& cfg) {
  const json j = read_json(dir / "meta.json");
  if (j.value("format", "") != "rbgpc-offline" || j.value("version", 0) != kFormatVersion)
    raise(ErrorKind::Compatibility, dir.string() + " is not a supported offline artifact");
  const std::string want = problem_hash(cfg);
  const std::string have = j.at("problem_hash");
  if (have != want)
    raise(ErrorKind::Compatibility, "artifact was built for problem " + have +
                                        " but the config describes problem " + want);
  try {
    const auto bshape = j.at("arrays").at("basis").at("shape").get<std::vector<Eigen::Index>>();
    const auto rshape = j.at("arrays").at("rfactor").at("shape").get<std::vector<Eigen::Index>>();
    const auto b = read_f64(dir / "basis.f64", static_cast<std::size_t>(bshape[0] * bshape[1]));
    const auto r = read_f64(dir / "rfactor.f64", static_cast<std::size_t>(rshape[0] * rshape[1]));
    Eigen::MatrixXd basis = Eigen::Map<const Eigen::MatrixXd>(b.data(), bshape[0], bshape[1]);
    Eigen::MatrixXd rf = Eigen::Map<const Eigen::MatrixXd>(r.data(), rshape[0], rshape[1]);
    // A zero-sized array reads back as an empty file.
    if (bshape[0] * bshape[1] == 0) basis.resize(bshape[0], bshape[1]);
    if (rshape[0] * rshape[1] == 0) rf.resize(rshape[0], rshape[1]);
    const SpatialGrid grid(cfg.nx, cfg.ny);
    require(static_cast<std::size_t>(basis.rows()) == grid.size(), ErrorKind::Compatibility,
            "artifact basis does not match the grid");
    Artifact a{ReducedBasisSpace(cosine_coefficients(cfg.K, cfg.A), grid.cell_area(),
                                 std::move(basis), std::move(rf),
                                 j.at("selected_parameters").get<std::vector<std::vector<double>>>()),
               {}, j.at("selected").get<std::vector<std::size_t>>(), j.at("converged"),
               j.at("c_qm")};
    for (const auto& h : j.at("history")) a.epsilon_history.push_back(h.at("epsilon"));
    return a;
  } catch (const json::exception& err) {
    raise(ErrorKind::Io, "malformed artifact metadata: " + std::string(err.what()));
  }
}

std::string artifact_metadata(const fs::path& dir, bool strip_timestamps) {
  json j = read_json(dir / "meta.json");
  if (strip_timestamps) j.erase("created");
  return j.dump(2);
}

}  // namespace rbgpc::harness
