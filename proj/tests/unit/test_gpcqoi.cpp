#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "fixtures.hpp"
#include "rbgpc/error.hpp"
#include "rbgpc/gpcqoi.hpp"

using namespace rbgpc;

namespace {

std::vector<PolynomialFamily> legendre(int K) {
  return std::vector<PolynomialFamily>(static_cast<std::size_t>(K), PolynomialFamily::legendre());
}

Eigen::VectorXd shape_field(const SpatialGrid& g) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(g.size()));
  for (int j = 0; j < g.ny(); ++j)
    for (int i = 0; i < g.nx(); ++i) v(j * g.nx() + i) = std::sin(g.x(i) + 2 * g.y(j)) + 0.3;
  return v;
}

}  // namespace

TEST_CASE("gpcqoi: projection of a single basis function") {
  const SpatialGrid g(5, 4);
  const auto fam = legendre(2);
  const QuadratureRule rule = tensor_gauss_rule(fam, 6);
  const MultiIndexSet set(2, 4);
  const Eigen::VectorXd gx = shape_field(g);
  const GpcExpansion e = pseudospectral_coefficients(
      [&](std::span<const double> mu) { return Eigen::VectorXd(gx * eval_multivariate(set, fam, mu)[2]); },
      rule, set, g);
  REQUIRE(e.size() == set.size());
  for (std::size_t m = 0; m < e.size(); ++m) {
    const Eigen::VectorXd expect = m == 2 ? gx : Eigen::VectorXd::Zero(gx.size());
    CHECK((e.coefficients.col(m) - expect).cwiseAbs().maxCoeff() <= 1e-12);
  }
  // constant in mu
  const GpcExpansion c = pseudospectral_coefficients([&](std::span<const double>) { return gx; }, rule, set, g);
  CHECK((c.coefficients.col(0) - gx).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK(c.coefficients.rightCols(set.size() - 1).cwiseAbs().maxCoeff() <= 1e-12);
  // evaluation identity at a node
  const auto mu = rule.node(7);
  CHECK((e.evaluate(fam, mu) - gx * eval_multivariate(set, fam, mu)[2]).norm() <= 1e-12);
}

TEST_CASE("gpcqoi: reaction toy mean") {
  const SpatialGrid g(2, 2);
  const auto fam = legendre(1);
  const MultiIndexSet set(1, 3);
  auto solver = [&](std::span<const double> mu) {
    return Eigen::VectorXd(Eigen::VectorXd::Constant(4, 1.0 / (3.0 + mu[0])));
  };
  double prev = 1.0;
  for (int q : {2, 4, 8, 16}) {
    const GpcExpansion e = pseudospectral_coefficients(solver, tensor_gauss_rule(fam, q), set, g);
    const double err = std::abs(e.coefficients(0, 0) - 0.5 * std::log(2.0));
    CHECK(err <= prev);
    prev = err;
  }
  CHECK(prev <= 1e-12);
}

TEST_CASE("gpcqoi: solver failures report the node") {
  const SpatialGrid g(2, 2);
  const auto fam = legendre(1);
  const QuadratureRule rule = tensor_gauss_rule(fam, 3);
  try {
    pseudospectral_coefficients(
        [](std::span<const double> mu) -> Eigen::VectorXd {
          if (mu[0] > 0.5) raise(ErrorKind::Numeric, "boom");
          return Eigen::VectorXd::Zero(4);
        },
        rule, MultiIndexSet(1, 2), g);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Numeric);
    CHECK(std::string(e.what()).find("node 2") != std::string::npos);
  }
}

TEST_CASE("gpcqoi: QoI identities") {
  const SpatialGrid g(3, 3);
  GpcExpansion e;
  e.set = MultiIndexSet(2, 2);
  e.nx = e.ny = 3;
  e.cell_area = g.cell_area();
  e.coefficients = Eigen::MatrixXd::Random(9, 6);
  const auto mean = qoi(e, {QoiKind::Mean, 1});
  const auto var = qoi(e, {QoiKind::Variance, 1});
  const auto nsq = qoi(e, {QoiKind::NormSquared, 1});
  CHECK((mean - e.coefficients.col(0)).norm() == 0.0);
  CHECK((nsq - var - mean.cwiseAbs2()).norm() <= 1e-14);
  GpcExpansion only = e;
  only.coefficients.rightCols(5).setZero();
  CHECK(qoi(only, {QoiKind::Variance, 1}).norm() == 0.0);

  CHECK(qoi_error(e, e, {QoiKind::NormSquared, 1}) == 0.0);
  GpcExpansion zero = e;
  zero.coefficients.setZero();
  CHECK(qoi_error(e, zero, {QoiKind::NormSquared, 1}) == doctest::Approx(g.norm(nsq)));
  GpcExpansion small = e;
  small.coefficients = e.coefficients.leftCols(3);
  CHECK_THROWS_AS(qoi_error(e, small, {QoiKind::Mean, 1}), Error);

  CHECK(make_qoi_spec(QoiKind::Mean, 7.0).c_lip == 1.0);
  CHECK(make_qoi_spec(QoiKind::Variance, 7.0).c_lip == 14.0);
  CHECK(parse_qoi_kind("norm-squared") == QoiKind::NormSquared);
  CHECK_THROWS_AS(parse_qoi_kind("median"), Error);
}

TEST_CASE("gpcqoi: B_{Q,m} and C_{Q,M} for exact tensor rules") {
  const auto fam = legendre(2);
  const MultiIndexSet set(2, 5);
  const std::vector<double> b = b_qm(tensor_gauss_rule(fam, 6), set, fam);
  REQUIRE(b.size() == 21);
  for (double v : b) CHECK(std::abs(v - 1.0) <= 1e-10);
  CHECK(std::abs(c_qm(b, QoiKind::Mean) - 1.0) <= 1e-10);
  CHECK(std::abs(c_qm(b, QoiKind::Variance) - 20.0) <= 1e-9);
  CHECK(std::abs(c_qm(b, QoiKind::NormSquared) - 21.0) <= 1e-9);
  const QuadratureRule r40 = tensor_gauss_rule(fam, 40);
  CHECK(std::abs(c_qm(r40, set, fam, {QoiKind::Variance, 1}) - 20.0) <= 1e-9);

  const auto beta = std::vector<PolynomialFamily>(2, PolynomialFamily::beta_distribution(2, 2));
  for (double v : b_qm(tensor_gauss_rule(beta, 6), set, beta)) CHECK(std::abs(v - 1.0) <= 1e-10);
  CHECK(qoi_functional_weights(QoiKind::Variance, 3) == std::vector<double>{0, 1, 1});
}

TEST_CASE("gpcqoi: B_{Q,m} on the K = 4 sparse grid") {
  const auto fam = legendre(4);
  const QuadratureRule r = sparse_rule(fam, 15);
  REQUIRE(r.size() == 22401);
  const std::vector<double> b = b_qm(r, MultiIndexSet(4, 5), fam);
  CHECK(b.size() == 126);
  // Phi_1 == 1, so B_1^2 is the absolute weight sum (above 1: negative weights).
  double abs_sum = 0;
  for (double w : r.weights()) abs_sum += std::abs(w);
  CHECK(b[0] == doctest::Approx(std::sqrt(abs_sum)).epsilon(1e-12));
  for (double v : b) {
    CHECK(v > 0.5);
    CHECK(v < 5.0);
  }
  // the rule is exact on products of basis functions of degree <= 5
  const MultiIndexSet set(4, 3);
  Eigen::MatrixXd G = Eigen::MatrixXd::Zero(set.size(), set.size());
  for (std::size_t q = 0; q < r.size(); ++q) {
    const auto phi = eval_multivariate(set, fam, r.node(q));
    const Eigen::Map<const Eigen::VectorXd> v(phi.data(), static_cast<Eigen::Index>(phi.size()));
    G += r.weight(q) * v * v.transpose();
  }
  CHECK((G - Eigen::MatrixXd::Identity(set.size(), set.size())).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("gpcqoi: B_{Q,m} is invariant under node reordering") {
  const auto fam = legendre(2);
  const QuadratureRule r = sparse_rule(fam, 5);
  std::vector<std::size_t> perm(r.size());
  std::iota(perm.begin(), perm.end(), 0);
  std::reverse(perm.begin(), perm.end());
  std::vector<double> nodes, weights;
  for (std::size_t q : perm) {
    nodes.insert(nodes.end(), r.node(q).begin(), r.node(q).end());
    weights.push_back(r.weight(q));
  }
  const QuadratureRule rr(2, nodes, weights, r.provenance(), fam);
  const MultiIndexSet set(2, 4);
  const auto a = b_qm(r, set, fam), b = b_qm(rr, set, fam);
  for (std::size_t m = 0; m < a.size(); ++m) CHECK(a[m] == doctest::Approx(b[m]).epsilon(1e-13));
}

TEST_CASE("gpcqoi: Parseval consistency") {
  const SpatialGrid g(3, 2);
  const auto fam = legendre(2);
  const MultiIndexSet set(2, 3);
  const QuadratureRule rule = tensor_gauss_rule(fam, 5);
  // u(x, mu) = g(x) (1 + mu_1 - mu_1 mu_2), degree 2 in mu.
  const Eigen::VectorXd gx = shape_field(g);
  auto solver = [&](std::span<const double> mu) { return Eigen::VectorXd(gx * (1 + mu[0] - mu[0] * mu[1])); };
  const GpcExpansion e = pseudospectral_coefficients(solver, rule, set, g);
  const Eigen::VectorXd nsq = qoi(e, {QoiKind::NormSquared, 1});
  Eigen::VectorXd quad = Eigen::VectorXd::Zero(gx.size());
  for (std::size_t q = 0; q < rule.size(); ++q) {
    const Eigen::VectorXd u = e.evaluate(fam, rule.node(q));
    quad += rule.weight(q) * u.cwiseAbs2();
  }
  CHECK((nsq - quad).cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("gpcqoi: surrogate expansion and coefficient bound check") {
  const AffineProblem p = fixtures::rank_one_problem(2, SpatialGrid(8, 8));
  const auto fam = legendre(2);
  const QuadratureRule rule = tensor_gauss_rule(fam, 5);
  const MultiIndexSet set(2, 3);
  GreedyOptions o;
  o.eps_tol = 1e-10;
  const GreedyResult g = greedy_build(p, rule, o);
  const GpcExpansion truth = direct_gpc(p, rule, set);
  const GpcExpansion rb = rb_gpc(g.space, rule, set, p.grid(), 2);
  CHECK(rb.source_tag() == "rb(1)");
  CHECK(truth.source_tag() == "truth");
  CHECK((truth.coefficients - rb.coefficients).cwiseAbs().maxCoeff() <= 1e-10);
  const auto sweep = evaluate_estimates(p, g.space, rule, BetaMode::ExactEig);
  const auto bqm = b_qm(rule, set, fam);
  const auto rep = coefficient_error_bound_check(truth, rb, bqm, sweep.delta_w);
  CHECK(rep.terms.size() == set.size());
  for (const auto& t : rep.terms) {
    CHECK(t.error <= 1e-10);
    CHECK(t.bound <= 1e-10);
  }
  const auto same = coefficient_error_bound_check(truth, truth, bqm, sweep.delta_w);
  CHECK(same.violations() == 0);
  for (const auto& t : same.terms) CHECK(t.error == 0.0);
}
