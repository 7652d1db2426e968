#include <cstdio>
#include <istream>
#include <json.hpp>
#include <ostream>
#include <sstream>

#include "rbgpc/error.hpp"
#include "rbgpc/harness.hpp"

namespace rbgpc::harness {
namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string opt(const std::optional<double>& v) { return v ? num(*v) : std::string(); }

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_num(const std::string& s) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    raise(ErrorKind::Io, "malformed number in CSV: '" + s + "'");
  }
}

std::optional<double> parse_opt(const std::string& s) {
  if (s.empty()) return std::nullopt;
  return parse_num(s);
}

std::vector<std::vector<std::string>> read_rows(std::istream& is, const std::string& header,
                                                std::size_t cols) {
  std::string line;
  if (!std::getline(is, line) || line != header)
    raise(ErrorKind::Io, "CSV header mismatch, expected '" + header + "'");
  std::vector<std::vector<std::string>> rows;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    auto cells = split(line);
    if (cells.size() != cols) raise(ErrorKind::Io, "CSV row has wrong column count: " + line);
    rows.push_back(std::move(cells));
  }
  return rows;
}

}  // namespace

void write_convergence_csv(const std::vector<ConvergenceRow>& rows, std::ostream& os) {
  os << "N,epsilon,xi_mean,xi_norm\n";
  for (const auto& r : rows)
    os << r.N << ',' << num(r.epsilon) << ',' << opt(r.xi_mean) << ',' << opt(r.xi_norm) << '\n';
}

std::vector<ConvergenceRow> read_convergence_csv(std::istream& is) {
  std::vector<ConvergenceRow> out;
  for (const auto& c : read_rows(is, "N,epsilon,xi_mean,xi_norm", 4))
    out.push_back({static_cast<std::size_t>(parse_num(c[0])), parse_num(c[1]), parse_opt(c[2]),
                   parse_opt(c[3])});
  return out;
}

void write_timing_csv(const std::vector<TimingRow>& rows, std::ostream& os) {
  os << "K,t_direct,t_offline,t_online,ratio\n";
  for (const auto& r : rows)
    os << r.K << ',' << opt(r.t_direct) << ',' << num(r.t_offline) << ',' << num(r.t_online)
       << ',' << opt(r.ratio) << '\n';
}

std::vector<TimingRow> read_timing_csv(std::istream& is) {
  std::vector<TimingRow> out;
  for (const auto& c : read_rows(is, "K,t_direct,t_offline,t_online,ratio", 5))
    out.push_back({static_cast<int>(parse_num(c[0])), parse_opt(c[1]), parse_num(c[2]),
                   parse_num(c[3]), parse_opt(c[4])});
  return out;
}

std::string report_json(const RunReport& r) {
  using nlohmann::json;
  json j;
  json conv = json::array();
  for (const auto& row : r.convergence) {
    json e = {{"N", row.N}, {"epsilon", row.epsilon}};
    if (row.xi_mean) e["xi_mean"] = *row.xi_mean;
    if (row.xi_norm) e["xi_norm"] = *row.xi_norm;
    conv.push_back(e);
  }
  j["convergence"] = conv;
  j["timing"] = {{"K", r.timing.K},
                 {"t_offline", r.timing.t_offline},
                 {"t_offline_greedy", r.t_greedy},
                 {"t_offline_cqm", r.t_cqm},
                 {"t_online", r.timing.t_online}};
  if (r.timing.t_direct) j["timing"]["t_direct"] = *r.timing.t_direct;
  if (r.timing.ratio) j["timing"]["efficiency_ratio"] = *r.timing.ratio;
  j["selected"] = r.selected;
  j["selected_parameters"] = r.selected_parameters;
  j["Q"] = r.Q;
  j["M"] = r.M;
  j["N"] = r.N;
  j["converged"] = r.converged;
  j["c_qm"] = r.c_qm;
  return j.dump(2);
}

}  // namespace rbgpc::harness
