#include "rbgpc/truthpde.hpp"

#include <Eigen/Cholesky>
#include <Eigen/LU>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>

#include "rbgpc/error.hpp"

namespace rbgpc {

namespace counters {
namespace {
std::atomic<std::size_t> g_truth_solves{0};
std::atomic<std::size_t> g_factorizations{0};
}  // namespace
std::size_t truth_solves() { return g_truth_solves.load(); }
std::size_t factorizations() { return g_factorizations.load(); }
void reset() {
  g_truth_solves = 0;
  g_factorizations = 0;
}
void count_factorization() { ++g_factorizations; }
}  // namespace counters

SpatialGrid::SpatialGrid(int nx, int ny)
    : nx_(nx), ny_(ny), hx_(2.0 / (nx + 1)), hy_(2.0 / (ny + 1)) {
  require(nx >= 1 && ny >= 1, ErrorKind::ParameterDomain, "grid needs at least one interior node");
}

double SpatialGrid::norm(std::span<const double> v) const {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(cell_area() * s);
}

double SpatialGrid::laplacian_lambda_min() const {
  const double sx = std::sin(std::numbers::pi / (2.0 * (nx_ + 1)));
  const double sy = std::sin(std::numbers::pi / (2.0 * (ny_ + 1)));
  return 4.0 * sx * sx / (hx_ * hx_) + 4.0 * sy * sy / (hy_ * hy_);
}

std::vector<double> AffineCoefficients::operator_thetas(std::span<const double> mu) const {
  std::vector<double> t(n_operator_terms);
  theta_operator(mu, t);
  return t;
}

std::vector<double> AffineCoefficients::load_thetas(std::span<const double> mu) const {
  std::vector<double> t(n_load_terms);
  theta_load(mu, t);
  return t;
}

AffineProblem::AffineProblem(SpatialGrid grid, AffineCoefficients coefficients,
                             std::vector<Eigen::MatrixXd> operators,
                             std::vector<Eigen::VectorXd> loads, double coercivity_floor,
                             double load_bound, std::string description)
    : grid_(grid),
      coef_(std::move(coefficients)),
      operators_(std::move(operators)),
      loads_(std::move(loads)),
      coercivity_floor_(coercivity_floor),
      load_bound_(load_bound),
      description_(std::move(description)) {
  const auto n = static_cast<Eigen::Index>(grid_.size());
  require(!operators_.empty() && !loads_.empty(), ErrorKind::Shape,
          "affine problem needs operator and load terms");
  require(operators_.size() == coef_.n_operator_terms && loads_.size() == coef_.n_load_terms,
          ErrorKind::Shape, "affine problem: term counts do not match the theta maps");
  for (const auto& L : operators_)
    require(L.rows() == n && L.cols() == n, ErrorKind::Shape, "operator term has wrong shape");
  for (const auto& f : loads_)
    require(f.size() == n, ErrorKind::Shape, "load term has wrong length");
  require(coercivity_floor_ > 0.0, ErrorKind::Domain, "coercivity floor must be positive");
}

void AffineProblem::check_parameter(std::span<const double> mu) const {
  require(static_cast<int>(mu.size()) == param_dim(), ErrorKind::Shape,
          "parameter has dimension " + std::to_string(mu.size()) + ", expected " +
              std::to_string(param_dim()));
  for (double m : mu)
    require(m >= -1.0 && m <= 1.0, ErrorKind::Domain,
            "parameter component " + std::to_string(m) + " outside [-1, 1]");
}

Eigen::MatrixXd AffineProblem::assemble_at(std::span<const double> mu) const {
  check_parameter(mu);
  const auto theta = coef_.operator_thetas(mu);
  Eigen::MatrixXd L = theta[0] * operators_[0];
  for (std::size_t q = 1; q < operators_.size(); ++q)
    if (theta[q] != 0.0) L.noalias() += theta[q] * operators_[q];
  return L;
}

Eigen::VectorXd AffineProblem::load_at(std::span<const double> mu) const {
  check_parameter(mu);
  const auto theta = coef_.load_thetas(mu);
  Eigen::VectorXd f = theta[0] * loads_[0];
  for (std::size_t q = 1; q < loads_.size(); ++q) f += theta[q] * loads_[q];
  return f;
}

AffineProblem AffineProblem::with_scaled_load(double factor) const {
  auto loads = loads_;
  for (auto& f : loads) f *= factor;
  return {grid_, coef_, operators_, std::move(loads), coercivity_floor_,
          std::abs(factor) * load_bound_, description_};
}

Eigen::MatrixXd discretize_diffusion(const SpatialGrid& grid,
                                     const std::function<double(double, double)>& coefficient) {
  const int nx = grid.nx();
  const int ny = grid.ny();
  const auto n = static_cast<Eigen::Index>(grid.size());
  const double ihx2 = 1.0 / (grid.hx() * grid.hx());
  const double ihy2 = 1.0 / (grid.hy() * grid.hy());
  Eigen::MatrixXd L = Eigen::MatrixXd::Zero(n, n);
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const Eigen::Index r = static_cast<Eigen::Index>(j) * nx + i;
      const double x = grid.x(i);
      const double y = grid.y(j);
      const double ce = coefficient(x + 0.5 * grid.hx(), y) * ihx2;
      const double cw = coefficient(x - 0.5 * grid.hx(), y) * ihx2;
      const double cn = coefficient(x, y + 0.5 * grid.hy()) * ihy2;
      const double cs = coefficient(x, y - 0.5 * grid.hy()) * ihy2;
      L(r, r) = ce + cw + cn + cs;
      if (i + 1 < nx) L(r, r + 1) = -ce;
      if (i > 0) L(r, r - 1) = -cw;
      if (j + 1 < ny) L(r, r + nx) = -cn;
      if (j > 0) L(r, r - nx) = -cs;
    }
  }
  return L;
}

double cosine_ellipticity_floor(int K, double A, double fluctuation_scale) {
  double s = 0.0;
  for (int k = 1; k <= K; ++k) s += 1.0 / (static_cast<double>(k) * k);
  return A - std::abs(fluctuation_scale) * s;
}

AffineCoefficients cosine_coefficients(int K, double A, double fluctuation_scale) {
  AffineCoefficients c;
  c.param_dim = K;
  c.n_operator_terms = static_cast<std::size_t>(K) + 1;
  c.n_load_terms = 1;
  c.theta_operator = [K, A, fluctuation_scale](std::span<const double> mu, std::span<double> out) {
    out[0] = A;
    for (int k = 1; k <= K; ++k)
      out[k] = fluctuation_scale * std::cos(30.0 * mu[k - 1] - 1.0) / (static_cast<double>(k) * k);
  };
  c.theta_load = [](std::span<const double>, std::span<double> out) { out[0] = 1.0; };
  return c;
}

AffineProblem assemble_cosine_problem(int K, double A, const SpatialGrid& grid,
                                     CosineProblemOptions opts) {
  require(K >= 1, ErrorKind::ParameterDomain, "parameter dimension K must be >= 1");
  const double a_min = cosine_ellipticity_floor(K, A, opts.fluctuation_scale);
  if (!(a_min > 0.0)) {
    raise(ErrorKind::Domain, "A = " + std::to_string(A) +
                                 " does not guarantee ellipticity; need A > " +
                                 std::to_string(A - a_min));
  }
  std::vector<Eigen::MatrixXd> ops;
  ops.reserve(static_cast<std::size_t>(K) + 1);
  ops.push_back(discretize_diffusion(grid, [](double, double) { return 1.0; }));
  for (int k = 1; k <= K; ++k)
    ops.push_back(discretize_diffusion(
        grid, [k](double x, double y) { return std::cos(k * x) * std::sin(k * y); }));
  std::vector<Eigen::VectorXd> loads{Eigen::VectorXd::Ones(static_cast<Eigen::Index>(grid.size()))};
  const double load_bound = grid.norm(loads[0]);
  const double floor = a_min * grid.laplacian_lambda_min();
  char desc[128];
  std::snprintf(desc, sizeof desc, "cosine(K=%d,A=%.17g,grid=%dx%d,scale=%.17g)", K, A, grid.nx(),
                grid.ny(), opts.fluctuation_scale);
  return {grid, cosine_coefficients(K, A, opts.fluctuation_scale), std::move(ops),
          std::move(loads), floor, load_bound, desc};
}

TruthSolution truth_solve(const AffineProblem& problem, std::span<const double> mu) {
  const auto t0 = std::chrono::steady_clock::now();
  const Eigen::MatrixXd L = problem.assemble_at(mu);
  const Eigen::VectorXd f = problem.load_at(mu);

  TruthSolution sol;
  sol.mu.assign(mu.begin(), mu.end());
  counters::count_factorization();
  Eigen::LLT<Eigen::MatrixXd> llt(L);
  if (llt.info() == Eigen::Success) {
    sol.field = llt.solve(f);
  } else {
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(L);
    sol.field = lu.solve(f);
  }
  const double fn = f.norm();
  const double rn = (L * sol.field - f).norm();
  if (!std::isfinite(rn) || rn > 1e-10 * fn)
    raise(ErrorKind::Numeric, "truth solve residual " + std::to_string(rn) +
                                  " exceeds 1e-10 * ||f||; operator is (near) singular");
  ++counters::g_truth_solves;
  sol.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return sol;
}

double uniform_bound(const AffineProblem& problem) {
  return problem.load_bound() / problem.coercivity_floor();
}

void write_field_csv(const SpatialGrid& grid, std::span<const double> field, std::ostream& os) {
  require(field.size() == grid.size(), ErrorKind::Shape, "field length does not match the grid");
  os << "x,y,value\n";
  char buf[96];
  for (int j = 0; j < grid.ny(); ++j)
    for (int i = 0; i < grid.nx(); ++i) {
      std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", grid.x(i), grid.y(j),
                    field[static_cast<std::size_t>(j) * grid.nx() + i]);
      os << buf;
    }
}

}  // namespace rbgpc
