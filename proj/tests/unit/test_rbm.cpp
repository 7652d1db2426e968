#include <doctest.h>

#include <cmath>
#include <limits>

#include "fixtures.hpp"
#include "rbgpc/error.hpp"
#include "rbgpc/quadrature.hpp"
#include "rbgpc/rbm.hpp"

using namespace rbgpc;

namespace {

ReducedBasisSpace build_space(const AffineProblem& p, int n, unsigned seed) {
  ReducedBasisSpace s(p.coefficients(), p.grid().cell_area(), p.dofs());
  for (const auto& mu : fixtures::random_points(p.param_dim(), n, seed))
    s.add_snapshot(p, truth_solve(p, mu).field, mu);
  return s;
}

// Full-order least squares in the X norm: min ||L V c - f||.
Eigen::VectorXd full_order_coeffs(const AffineProblem& p, const ReducedBasisSpace& s,
                                  std::span<const double> mu) {
  const Eigen::MatrixXd LV = p.assemble_at(mu) * s.basis();
  return LV.colPivHouseholderQr().solve(p.load_at(mu));
}

}  // namespace

TEST_CASE("rbm: basis is X-orthonormal and reproduces snapshots") {
  const AffineProblem p = assemble_cosine_problem(2, 5.0, SpatialGrid(12, 12));
  ReducedBasisSpace s(p.coefficients(), p.grid().cell_area(), p.dofs());
  const auto pts = fixtures::random_points(2, 6, 11);
  std::vector<Eigen::VectorXd> snaps;
  for (const auto& mu : pts) {
    snaps.push_back(truth_solve(p, mu).field);
    CHECK(s.add_snapshot(p, snaps.back(), mu));
  }
  REQUIRE(s.dim() == 6);
  const Eigen::MatrixXd G = p.grid().cell_area() * s.basis().transpose() * s.basis();
  CHECK((G - Eigen::MatrixXd::Identity(6, 6)).cwiseAbs().maxCoeff() <= 1e-10);
  for (std::size_t k = 0; k < snaps.size(); ++k) {
    const Eigen::VectorXd c = p.grid().cell_area() * s.basis().transpose() * snaps[k];
    CHECK(p.grid().norm(Eigen::VectorXd(snaps[k] - s.lift(c))) <= 1e-9 * p.grid().norm(snaps[k]));
    // rb_solve at a selected parameter recovers the snapshot
    const RbSolution r = rb_solve(s, pts[k]);
    CHECK(p.grid().norm(Eigen::VectorXd(snaps[k] - s.lift(r.coeffs))) <= 1e-8);
  }
  // a dependent snapshot is rejected
  CHECK_FALSE(s.add_snapshot(p, 2.0 * snaps[0], pts[0]));
  CHECK(s.dim() == 6);
}

TEST_CASE("rbm: reduced least squares equals full-order least squares") {
  const AffineProblem p = assemble_cosine_problem(3, 5.0, SpatialGrid(14, 14));
  const ReducedBasisSpace s = build_space(p, 7, 5);
  for (const auto& mu : fixtures::random_points(3, 50, 99)) {
    const RbSolution r = rb_solve(s, mu);
    const Eigen::VectorXd ref = full_order_coeffs(p, s, mu);
    CHECK((r.coeffs - ref).norm() <= 1e-8 * ref.norm());
    CHECK_FALSE(r.regularized);
  }
}

TEST_CASE("rbm: offline-online residual equals the direct residual") {
  const AffineProblem p = assemble_cosine_problem(2, 5.0, SpatialGrid(14, 14));
  const ReducedBasisSpace s = build_space(p, 5, 8);
  for (const auto& mu : fixtures::random_points(2, 50, 17)) {
    const RbSolution r = rb_solve(s, mu);
    const Eigen::VectorXd direct = p.load_at(mu) - p.assemble_at(mu) * s.lift(r.coeffs);
    const double dn = p.grid().norm(direct);
    CHECK(std::abs(r.residual_norm - dn) <= 1e-8 * dn);
    // arbitrary coefficients too
    const Eigen::VectorXd c = Eigen::VectorXd::Constant(5, 0.01);
    const double dn2 = p.grid().norm(Eigen::VectorXd(p.load_at(mu) - p.assemble_at(mu) * s.lift(c)));
    CHECK(std::abs(residual_norm(s, mu, c) - dn2) <= 1e-8 * dn2);
  }
}

TEST_CASE("rbm: residual scales with the load") {
  const AffineProblem p = assemble_cosine_problem(2, 5.0, SpatialGrid(10, 10));
  const AffineProblem p2 = p.with_scaled_load(2.0);
  ReducedBasisSpace s1(p.coefficients(), p.grid().cell_area(), p.dofs());
  ReducedBasisSpace s2(p2.coefficients(), p2.grid().cell_area(), p2.dofs());
  for (const auto& mu : fixtures::random_points(2, 3, 4)) {
    s1.add_snapshot(p, truth_solve(p, mu).field, mu);
    s2.add_snapshot(p2, truth_solve(p2, mu).field, mu);
  }
  const double mu[] = {0.33, -0.61};
  CHECK(rb_solve(s2, mu).residual_norm == doctest::Approx(2 * rb_solve(s1, mu).residual_norm).epsilon(1e-8));
}

TEST_CASE("rbm: rank-one manifold is exact at N = 1") {
  const AffineProblem p = fixtures::rank_one_problem(2, SpatialGrid(10, 10));
  const double nu[] = {0.2, 0.1};
  ReducedBasisSpace s(p.coefficients(), p.grid().cell_area(), p.dofs());
  s.add_snapshot(p, truth_solve(p, nu).field, nu);
  for (const auto& mu : fixtures::random_points(2, 10, 1)) {
    const RbSolution r = rb_solve(s, mu);
    CHECK(r.residual_norm <= 1e-10);
    CHECK(p.grid().norm(Eigen::VectorXd(truth_solve(p, mu).field - s.lift(r.coeffs))) <= 1e-10);
  }
}

TEST_CASE("rbm: truncation and persisted reconstruction") {
  const AffineProblem p = assemble_cosine_problem(2, 5.0, SpatialGrid(10, 10));
  const ReducedBasisSpace s = build_space(p, 5, 21);
  const ReducedBasisSpace t = s.truncated(3);
  CHECK(t.dim() == 3);
  const ReducedBasisSpace t3 = build_space(p, 3, 21);
  const double mu[] = {-0.4, 0.8};
  CHECK(rb_solve(t, mu).residual_norm == doctest::Approx(rb_solve(t3, mu).residual_norm).epsilon(1e-9));
  const ReducedBasisSpace r(p.coefficients(), p.grid().cell_area(), s.basis(), s.rfactor(), s.parameters());
  CHECK(rb_solve(r, mu).residual_norm == rb_solve(s, mu).residual_norm);
  CHECK_THROWS_AS(ReducedBasisSpace(p.coefficients(), 1.0, s.basis(), t.rfactor(), s.parameters()), Error);
}

TEST_CASE("rbm: beta lower bounds") {
  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(2, 2);
  D(0, 0) = 2;
  D(1, 1) = 3;
  CHECK(smallest_squared_singular_value(D) == doctest::Approx(4.0));
  Eigen::MatrixXd N(2, 2);
  N << 1, 2, 0, 1;
  // singular values of [[1,2],[0,1]] are sqrt(2) -+ 1
  CHECK(smallest_squared_singular_value(N) == doctest::Approx(std::pow(std::sqrt(2.0) - 1, 2)));

  const AffineProblem p = assemble_cosine_problem(2, 5.0, SpatialGrid(9, 9));
  const double a[] = {0.1, 0.2}, b[] = {-0.9, 0.7};
  CHECK(beta_lb(p, a, BetaMode::Analytic) == beta_lb(p, b, BetaMode::Analytic));
  for (const auto& mu : fixtures::random_points(2, 20, 6))
    CHECK(beta_lb(p, mu, BetaMode::Analytic) <= beta_lb(p, mu, BetaMode::ExactEig));
}

TEST_CASE("rbm: estimator arithmetic") {
  CHECK(weighted_estimator(1e-3, 4.0, 100, 0.01) == doctest::Approx(5e-4));
  CHECK(weighted_estimator(1e-3, 4.0, 100, 0.0) == 0.0);
  const std::vector<double> zeros(5, 0.0), d(7, 0.25);
  CHECK(epsilon_estimate(zeros, 3.0) == 0.0);
  CHECK(epsilon_estimate(d, 3.0) == doctest::Approx(0.75));
  const std::vector<double> v = {1, 2, 3};
  CHECK(epsilon_estimate(v, 1.0) == doctest::Approx(std::sqrt(14.0 / 3)));
}

TEST_CASE("rbm: certification in exact-eig mode") {
  const AffineProblem p = assemble_cosine_problem(2, 5.0, SpatialGrid(12, 12));
  const ReducedBasisSpace s = build_space(p, 3, 2);
  for (const auto& mu : fixtures::random_points(2, 50, 12)) {
    const RbSolution r = rb_solve(s, mu);
    const double err = p.grid().norm(Eigen::VectorXd(truth_solve(p, mu).field - s.lift(r.coeffs)));
    CHECK(err <= r.residual_norm / std::sqrt(beta_lb(p, mu, BetaMode::ExactEig)) * (1 + 1e-10));
  }
}

TEST_CASE("rbm: best-approximation error is non-increasing in N") {
  const AffineProblem p = assemble_cosine_problem(2, 5.0, SpatialGrid(12, 12));
  const ReducedBasisSpace s = build_space(p, 10, 31);
  const auto pts = fixtures::random_points(2, 10, 32);
  for (const auto& mu : pts) {
    const Eigen::VectorXd u = truth_solve(p, mu).field;
    double prev = std::numeric_limits<double>::infinity();
    for (std::size_t n = 1; n <= 10; ++n) {
      const Eigen::MatrixXd V = s.basis().leftCols(n);
      const Eigen::VectorXd c = p.grid().cell_area() * V.transpose() * u;
      const double e = p.grid().norm(Eigen::VectorXd(u - V * c));
      CHECK(e <= prev * (1 + 1e-12));
      prev = e;
    }
  }
}
