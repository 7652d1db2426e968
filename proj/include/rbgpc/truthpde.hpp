#pragma once

// Affine-parametric truth discretization of -div(a(x, mu) grad u) = f on
// D = [-1, 1]^2 with homogeneous Dirichlet data: second-order conservative
// finite differences, coefficients sampled at cell-edge midpoints.

#include <Eigen/Dense>
#include <atomic>
#include <cstddef>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace rbgpc {

// Interior nodes of a uniform nx x ny grid on [-1, 1]^2; the boundary is
// eliminated. Unknown index is j * nx + i (x fastest).
class SpatialGrid {
 public:
  SpatialGrid(int nx, int ny);

  int nx() const { return nx_; }
  int ny() const { return ny_; }
  std::size_t size() const { return static_cast<std::size_t>(nx_) * ny_; }
  double hx() const { return hx_; }
  double hy() const { return hy_; }
  double x(int i) const { return -1.0 + (i + 1) * hx_; }
  double y(int j) const { return -1.0 + (j + 1) * hy_; }
  // Trapezoidal mass weight of an interior node (all equal on a uniform grid).
  double cell_area() const { return hx_ * hy_; }

  // Discrete X norm: sqrt(cell_area * sum v_i^2).
  double norm(std::span<const double> v) const;
  double norm(const Eigen::VectorXd& v) const { return norm(std::span(v.data(), v.size())); }
  // Smallest eigenvalue of the 5-point Dirichlet Laplacian, in closed form.
  double laplacian_lambda_min() const;

  bool operator==(const SpatialGrid& o) const { return nx_ == o.nx_ && ny_ == o.ny_; }

 private:
  int nx_;
  int ny_;
  double hx_;
  double hy_;
};

// theta(mu) for all affine terms at once.
using ThetaFunction = std::function<void(std::span<const double> mu, std::span<double> out)>;

struct AffineCoefficients {
  int param_dim = 0;
  std::size_t n_operator_terms = 0;  // Q_L
  std::size_t n_load_terms = 0;      // Q_f
  ThetaFunction theta_operator;
  ThetaFunction theta_load;

  std::vector<double> operator_thetas(std::span<const double> mu) const;
  std::vector<double> load_thetas(std::span<const double> mu) const;
};

class AffineProblem {
 public:
  // coercivity_floor: certified lower bound on sigma_min(L(mu)) over Gamma.
  // load_bound: upper bound on ||f(mu)||_X over Gamma.
  AffineProblem(SpatialGrid grid, AffineCoefficients coefficients,
                std::vector<Eigen::MatrixXd> operators, std::vector<Eigen::VectorXd> loads,
                double coercivity_floor, double load_bound, std::string description = {});

  const SpatialGrid& grid() const { return grid_; }
  const AffineCoefficients& coefficients() const { return coef_; }
  int param_dim() const { return coef_.param_dim; }
  std::size_t dofs() const { return grid_.size(); }
  std::size_t n_operator_terms() const { return operators_.size(); }
  std::size_t n_load_terms() const { return loads_.size(); }
  const Eigen::MatrixXd& operator_term(std::size_t q) const { return operators_[q]; }
  const Eigen::VectorXd& load_term(std::size_t q) const { return loads_[q]; }
  double coercivity_floor() const { return coercivity_floor_; }
  double load_bound() const { return load_bound_; }
  const std::string& description() const { return description_; }

  // Throws Error(Domain) unless mu is in [-1, 1]^K.
  void check_parameter(std::span<const double> mu) const;

  Eigen::MatrixXd assemble_at(std::span<const double> mu) const;
  Eigen::VectorXd load_at(std::span<const double> mu) const;

  // Same operators and coefficients with every load term scaled.
  AffineProblem with_scaled_load(double factor) const;

 private:
  SpatialGrid grid_;
  AffineCoefficients coef_;
  std::vector<Eigen::MatrixXd> operators_;
  std::vector<Eigen::VectorXd> loads_;
  double coercivity_floor_;
  double load_bound_;
  std::string description_;
};

// Dense flux-form matrix of -div(c(x, y) grad .) on the grid.
Eigen::MatrixXd discretize_diffusion(const SpatialGrid& grid,
                                     const std::function<double(double, double)>& coefficient);

struct CosineProblemOptions {
  // Multiplies every fluctuation term; 0 yields the constant coefficient a = A.
  double fluctuation_scale = 1.0;
};

// a(x, mu) = A + sum_k cos(30 mu_k - 1) / k^2 * cos(k x) sin(k y), f = 1.
// Throws Error(Domain) unless A exceeds the fluctuation bound sum 1/k^2.
AffineProblem assemble_cosine_problem(int K, double A, const SpatialGrid& grid,
                                     CosineProblemOptions opts = {});
AffineCoefficients cosine_coefficients(int K, double A, double fluctuation_scale = 1.0);
// Lower bound on a(x, mu): A - scale * sum_{k<=K} 1/k^2.
double cosine_ellipticity_floor(int K, double A, double fluctuation_scale = 1.0);

struct TruthSolution {
  Eigen::VectorXd field;
  std::vector<double> mu;
  double seconds = 0.0;
};

TruthSolution truth_solve(const AffineProblem& problem, std::span<const double> mu);

// U = load_bound / coercivity_floor >= ||u(mu)||_X for all mu.
double uniform_bound(const AffineProblem& problem);

// Instrumentation for the no-truth-solve contracts of the online phase.
namespace counters {
std::size_t truth_solves();
std::size_t factorizations();
void reset();
void count_factorization();
}  // namespace counters

// CSV with header x,y,value.
void write_field_csv(const SpatialGrid& grid, std::span<const double> field, std::ostream& os);

}  // namespace rbgpc
