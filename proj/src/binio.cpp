#include "rbgpc/binio.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <json.hpp>

#include "rbgpc/error.hpp"

namespace rbgpc {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::uint64_t bswap64(std::uint64_t v) {
  v = ((v & 0x00000000FFFFFFFFull) << 32) | (v >> 32);
  v = ((v & 0x0000FFFF0000FFFFull) << 16) | ((v & 0xFFFF0000FFFF0000ull) >> 16);
  return ((v & 0x00FF00FF00FF00FFull) << 8) | ((v & 0xFF00FF00FF00FF00ull) >> 8);
}

std::uint64_t to_le(double x) {
  auto u = std::bit_cast<std::uint64_t>(x);
  if constexpr (std::endian::native == std::endian::big) u = bswap64(u);
  return u;
}

double from_le(std::uint64_t u) {
  if constexpr (std::endian::native == std::endian::big) u = bswap64(u);
  return std::bit_cast<double>(u);
}

json provenance_json(const RuleProvenance& p) {
  json j;
  j["kind"] = p.kind == RuleProvenance::Kind::Sparse   ? "sparse"
              : p.kind == RuleProvenance::Kind::Tensor ? "tensor"
                                                       : "gauss1d";
  j["points_per_dim"] = p.points_per_dim;
  j["level"] = p.level;
  return j;
}

RuleProvenance provenance_from_json(const json& j) {
  RuleProvenance p;
  const std::string k = j.at("kind");
  p.kind = k == "sparse"   ? RuleProvenance::Kind::Sparse
           : k == "tensor" ? RuleProvenance::Kind::Tensor
                           : RuleProvenance::Kind::Gauss1D;
  p.points_per_dim = j.at("points_per_dim").get<std::vector<int>>();
  p.level = j.at("level");
  return p;
}

}  // namespace

void write_f64(const fs::path& path, std::span<const double> values) {
  std::vector<std::uint64_t> buf(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) buf[i] = to_le(values[i]);
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) raise(ErrorKind::Io, "cannot open " + path.string() + " for writing");
  os.write(reinterpret_cast<const char*>(buf.data()),
           static_cast<std::streamsize>(buf.size() * sizeof(std::uint64_t)));
  if (!os) raise(ErrorKind::Io, "write failed: " + path.string());
}

std::vector<double> read_f64(const fs::path& path, std::size_t expected_count) {
  std::ifstream is(path, std::ios::binary);
  if (!is) raise(ErrorKind::Io, "cannot open " + path.string());
  is.seekg(0, std::ios::end);
  const auto bytes = static_cast<std::size_t>(is.tellg());
  is.seekg(0);
  if (bytes % 8 != 0) raise(ErrorKind::Io, path.string() + ": size is not a multiple of 8");
  const std::size_t n = bytes / 8;
  if (expected_count != 0 && n != expected_count)
    raise(ErrorKind::Io, path.string() + ": expected " + std::to_string(expected_count) +
                             " values, found " + std::to_string(n));
  std::vector<std::uint64_t> buf(n);
  is.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(bytes));
  if (!is) raise(ErrorKind::Io, "read failed: " + path.string());
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = from_le(buf[i]);
  return out;
}

void write_expansion(const fs::path& dir, const std::string& stem, const GpcExpansion& e) {
  fs::create_directories(dir);
  write_f64(dir / (stem + ".f64"),
            {e.coefficients.data(), static_cast<std::size_t>(e.coefficients.size())});
  json j;
  j["M"] = e.size();
  j["dofs"] = e.dofs();
  j["nx"] = e.nx;
  j["ny"] = e.ny;
  j["cell_area"] = e.cell_area;
  j["layout"] = "column-major dofs x M, float64 little-endian";
  j["source"] = e.source == FieldSource::Truth ? "truth" : "rb";
  j["reduced_dim"] = e.reduced_dim;
  j["dim"] = e.set.dim();
  j["degree"] = e.set.degree();
  json idx = json::array();
  for (std::size_t m = 0; m < e.set.size(); ++m) {
    const auto a = e.set[m];
    idx.push_back(std::vector<int>(a.begin(), a.end()));
  }
  j["multi_indices"] = idx;
  j["rule"] = provenance_json(e.rule);
  std::ofstream os(dir / (stem + ".json"));
  if (!os) raise(ErrorKind::Io, "cannot write " + (dir / (stem + ".json")).string());
  os << j.dump(2) << '\n';
}

GpcExpansion read_expansion(const fs::path& dir, const std::string& stem) {
  std::ifstream is(dir / (stem + ".json"));
  if (!is) raise(ErrorKind::Io, "cannot open " + (dir / (stem + ".json")).string());
  json j;
  try {
    is >> j;
  } catch (const json::exception& err) {
    raise(ErrorKind::Io, std::string("malformed expansion metadata: ") + err.what());
  }
  GpcExpansion e;
  const std::size_t M = j.at("M");
  const std::size_t dofs = j.at("dofs");
  e.nx = j.at("nx");
  e.ny = j.at("ny");
  e.cell_area = j.at("cell_area");
  e.source = j.at("source") == "truth" ? FieldSource::Truth : FieldSource::ReducedBasis;
  e.reduced_dim = j.at("reduced_dim");
  e.set = MultiIndexSet(j.at("dim"), j.at("degree"));
  require(e.set.size() == M, ErrorKind::Io, "expansion metadata: M does not match the degree");
  e.rule = provenance_from_json(j.at("rule"));
  const auto v = read_f64(dir / (stem + ".f64"), dofs * M);
  e.coefficients = Eigen::Map<const Eigen::MatrixXd>(v.data(), static_cast<Eigen::Index>(dofs),
                                                     static_cast<Eigen::Index>(M));
  return e;
}

}  // namespace rbgpc
