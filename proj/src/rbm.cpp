#include "rbgpc/rbm.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>
#include <cmath>

#include "rbgpc/error.hpp"
#include "rbgpc/kernels.hpp"

namespace rbgpc {

ReducedBasisSpace::ReducedBasisSpace(AffineCoefficients coefficients, double cell_area,
                                     std::size_t dofs)
    : coef_(std::move(coefficients)),
      cell_area_(cell_area),
      basis_(static_cast<Eigen::Index>(dofs), 0) {}

ReducedBasisSpace::ReducedBasisSpace(AffineCoefficients coefficients, double cell_area,
                                     Eigen::MatrixXd basis, Eigen::MatrixXd rfactor,
                                     std::vector<std::vector<double>> parameters)
    : coef_(std::move(coefficients)),
      cell_area_(cell_area),
      basis_(std::move(basis)),
      rfactor_(std::move(rfactor)),
      parameters_(std::move(parameters)) {
  require(static_cast<std::size_t>(rfactor_.cols()) == column_count(dim()), ErrorKind::Shape,
          "reduced basis: R factor does not match the basis dimension");
  require(parameters_.size() == dim(), ErrorKind::Shape,
          "reduced basis: one parameter per basis function required");
}

ReducedBasisSpace ReducedBasisSpace::truncated(std::size_t n) const {
  require(n <= dim(), ErrorKind::Shape, "cannot truncate to a larger space");
  const auto cols = static_cast<Eigen::Index>(column_count(n));
  const Eigen::Index rows = std::min(rfactor_.rows(), cols);
  std::vector<std::vector<double>> params(parameters_.begin(),
                                          parameters_.begin() + static_cast<std::ptrdiff_t>(n));
  return {coef_, cell_area_, basis_.leftCols(static_cast<Eigen::Index>(n)),
          rfactor_.topLeftCorner(rows, cols), std::move(params)};
}

bool ReducedBasisSpace::add_snapshot(const AffineProblem& problem, const Eigen::VectorXd& snapshot,
                                     std::span<const double> mu) {
  require(static_cast<std::size_t>(snapshot.size()) == dofs(), ErrorKind::Shape,
          "snapshot length does not match the space");
  const std::size_t n = dofs();
  Eigen::VectorXd v = snapshot;
  const double scale = std::sqrt(cell_area_ * kernels::dot({v.data(), n}, {v.data(), n}));
  for (int pass = 0; pass < 2; ++pass) {
    for (Eigen::Index i = 0; i < basis_.cols(); ++i) {
      const double* xi = basis_.col(i).data();
      const double c = cell_area_ * kernels::dot({xi, n}, {v.data(), n});
      kernels::axpy(-c, {xi, n}, {v.data(), n});
    }
  }
  const double nv = std::sqrt(cell_area_ * kernels::dot({v.data(), n}, {v.data(), n}));
  if (!(nv > 1e-12 * scale)) return false;
  v /= nv;

  const auto N = basis_.cols();
  basis_.conservativeResize(Eigen::NoChange, N + 1);
  basis_.col(N) = v;
  parameters_.emplace_back(mu.begin(), mu.end());

  const double s = std::sqrt(cell_area_);
  const auto QL = static_cast<Eigen::Index>(coef_.n_operator_terms);
  const auto Qf = static_cast<Eigen::Index>(coef_.n_load_terms);
  if (stacked_.cols() == 0) {
    stacked_.resize(static_cast<Eigen::Index>(n), Qf);
    for (Eigen::Index q = 0; q < Qf; ++q) stacked_.col(q) = s * problem.load_term(q);
  }
  const Eigen::Index c0 = stacked_.cols();
  stacked_.conservativeResize(Eigen::NoChange, c0 + QL);
  for (Eigen::Index q = 0; q < QL; ++q)
    stacked_.col(c0 + q).noalias() = s * (problem.operator_term(q) * v);
  refactor();
  return true;
}

void ReducedBasisSpace::refactor() {
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(stacked_);
  const Eigen::Index rows = std::min(stacked_.rows(), stacked_.cols());
  rfactor_ = qr.matrixQR().topRows(rows).triangularView<Eigen::Upper>();
}

namespace {

// Reduced least-squares system M c ~ g with M = sum_q theta_q R_{:, L_q xi_n},
// g = sum_q theta^f_q R_{:, f_q}.
void reduced_system(const ReducedBasisSpace& space, std::span<const double> mu,
                    Eigen::MatrixXd& M, Eigen::VectorXd& g) {
  const auto& coef = space.coefficients();
  const auto theta_l = coef.operator_thetas(mu);
  const auto theta_f = coef.load_thetas(mu);
  const auto& R = space.rfactor();
  const Eigen::Index rows = R.rows();
  const auto N = static_cast<Eigen::Index>(space.dim());
  const auto QL = static_cast<Eigen::Index>(coef.n_operator_terms);
  const auto Qf = static_cast<Eigen::Index>(coef.n_load_terms);
  const auto urows = static_cast<std::size_t>(rows);

  g.setZero(rows);
  for (Eigen::Index q = 0; q < Qf; ++q)
    kernels::axpy(theta_f[q], {R.col(q).data(), urows}, {g.data(), urows});
  M.setZero(rows, N);
  for (Eigen::Index j = 0; j < N; ++j)
    for (Eigen::Index q = 0; q < QL; ++q) {
      // R is upper triangular: column c has nonzeros only in rows < c + 1.
      const Eigen::Index c = Qf + j * QL + q;
      const auto len = static_cast<std::size_t>(std::min(rows, c + 1));
      kernels::axpy(theta_l[q], {R.col(c).data(), len}, {M.col(j).data(), len});
    }
}

}  // namespace

RbSolution rb_solve(const ReducedBasisSpace& space, std::span<const double> mu) {
  require(space.dim() >= 1, ErrorKind::Shape, "reduced solve needs N >= 1");
  Eigen::MatrixXd M;
  Eigen::VectorXd g;
  reduced_system(space, mu, M, g);

  RbSolution sol;
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(M);
  const auto N = M.cols();
  const auto diag = qr.matrixQR().diagonal().head(std::min(M.rows(), N)).cwiseAbs();
  const bool full_rank = M.rows() >= N && diag.size() > 0 &&
                         diag.minCoeff() > 1e-13 * std::max(diag.maxCoeff(), 1e-300);
  if (full_rank) {
    sol.coeffs = qr.solve(g);
  } else {
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(M);
    sol.coeffs = cod.solve(g);
    sol.regularized = true;
  }
  sol.residual_norm = (M * sol.coeffs - g).norm();
  return sol;
}

double residual_norm(const ReducedBasisSpace& space, std::span<const double> mu,
                     const Eigen::VectorXd& coeffs) {
  require(static_cast<std::size_t>(coeffs.size()) == space.dim(), ErrorKind::Shape,
          "coefficient vector does not match the reduced dimension");
  Eigen::MatrixXd M;
  Eigen::VectorXd g;
  reduced_system(space, mu, M, g);
  return (M * coeffs - g).norm();
}

double smallest_squared_singular_value(const Eigen::MatrixXd& L) {
  require(L.rows() == L.cols() && L.rows() > 0, ErrorKind::Shape, "operator must be square");
  if (L.isApprox(L.transpose(), 1e-14)) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(L, Eigen::EigenvaluesOnly);
    require(es.info() == Eigen::Success, ErrorKind::Numeric, "eigen-solver failed");
    const double s = es.eigenvalues().cwiseAbs().minCoeff();
    return s * s;
  }
  Eigen::BDCSVD<Eigen::MatrixXd> svd(L);
  const double s = svd.singularValues().minCoeff();
  return s * s;
}

double beta_lb(const AffineProblem& problem, std::span<const double> mu, BetaMode mode) {
  double b = 0.0;
  if (mode == BetaMode::Analytic) {
    problem.check_parameter(mu);
    b = problem.coercivity_floor() * problem.coercivity_floor();
  } else {
    b = smallest_squared_singular_value(problem.assemble_at(mu));
  }
  require(b > 0.0 && std::isfinite(b), ErrorKind::Numeric,
          "beta_LB is not positive; the operator lost ellipticity");
  return b;
}

double epsilon_estimate(std::span<const double> deltas, double c_qm) {
  if (deltas.empty()) return 0.0;
  double s = 0.0;
  for (double d : deltas) s += d * d;
  return c_qm * std::sqrt(s / static_cast<double>(deltas.size()));
}

}  // namespace rbgpc
