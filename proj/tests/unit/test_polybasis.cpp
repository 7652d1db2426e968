#include <doctest.h>

#include <cmath>

#include "rbgpc/error.hpp"
#include "rbgpc/polybasis.hpp"
#include "rbgpc/quadrature.hpp"

using namespace rbgpc;

namespace {

void check_orthonormal(const PolynomialFamily& f, int maxdeg) {
  const QuadratureRule r = gauss_rule_1d(f, maxdeg + 2);
  for (int i = 0; i <= maxdeg; ++i)
    for (int j = 0; j <= maxdeg; ++j) {
      double s = 0;
      for (std::size_t q = 0; q < r.size(); ++q)
        s += r.weight(q) * f.eval(i, r.node(q)[0]) * f.eval(j, r.node(q)[0]);
      CHECK(s == doctest::Approx(i == j ? 1.0 : 0.0).epsilon(1e-12).scale(1.0));
    }
}

}  // namespace

TEST_CASE("polybasis: Legendre orthonormal values") {
  const auto f = PolynomialFamily::legendre();
  CHECK(f.eval(0, 0.3) == 1.0);
  CHECK(f.eval(1, 0.5) == doctest::Approx(std::sqrt(3.0) * 0.5).epsilon(1e-14));
  // sqrt(5) * (3x^2 - 1) / 2
  CHECK(f.eval(2, 0.4) == doctest::Approx(std::sqrt(5.0) * (3 * 0.16 - 1) / 2).epsilon(1e-14));
  CHECK(f.density(0.2) == doctest::Approx(0.5));
  check_orthonormal(f, 12);
}

TEST_CASE("polybasis: Jacobi and Beta(2,2)") {
  const auto b = PolynomialFamily::beta_distribution(2, 2);
  CHECK(b == PolynomialFamily::jacobi(1, 1));
  CHECK(b.density(0.0) == doctest::Approx(0.75));
  check_orthonormal(b, 10);
  check_orthonormal(PolynomialFamily::jacobi(0.5, -0.3), 8);
  // Beta(2,2) on [-1,1]: E[x^2] = 1/5, so phi_1 = sqrt(5) x.
  CHECK(b.eval(1, 0.3) == doctest::Approx(std::sqrt(5.0) * 0.3).epsilon(1e-14));
  CHECK_THROWS_AS(PolynomialFamily::jacobi(-1.0, 0.0), Error);
  CHECK(make_family(FamilyKind::Jacobi, std::pair{1.0, 1.0}) == b);
}

TEST_CASE("polybasis: eval_all agrees with eval") {
  const auto f = PolynomialFamily::jacobi(2, 0.5);
  std::vector<double> out(9);
  f.eval_all(8, -0.71, out);
  for (int n = 0; n <= 8; ++n) CHECK(out[n] == doctest::Approx(f.eval(n, -0.71)).epsilon(1e-14));
}

TEST_CASE("polybasis: total-degree set sizes and order") {
  CHECK(total_degree_size(2, 5) == 21);
  CHECK(total_degree_size(4, 5) == 126);
  CHECK(total_degree_size(6, 5) == 462);
  CHECK(total_degree_size(1, 0) == 1);
  CHECK_THROWS_AS(total_degree_size(40, 40), Error);

  const MultiIndexSet s(2, 3);
  REQUIRE(s.size() == 10);
  const std::vector<std::vector<int>> expect = {{0, 0}, {1, 0}, {0, 1}, {2, 0}, {1, 1},
                                                {0, 2}, {3, 0}, {2, 1}, {1, 2}, {0, 3}};
  for (std::size_t m = 0; m < s.size(); ++m) {
    CHECK(s[m][0] == expect[m][0]);
    CHECK(s[m][1] == expect[m][1]);
    CHECK(s.find(s[m]) == m);
  }
  const std::uint16_t missing[] = {4, 0};
  CHECK(s.find(missing) == s.size());
}

TEST_CASE("polybasis: multivariate evaluation") {
  const MultiIndexSet s(3, 4);
  const std::vector<PolynomialFamily> fam(3, PolynomialFamily::legendre());
  const double mu[] = {0.1, -0.4, 0.9};
  const auto phi = eval_multivariate(s, fam, mu);
  REQUIRE(phi.size() == s.size());
  for (std::size_t m = 0; m < s.size(); ++m) {
    double p = 1;
    for (int k = 0; k < 3; ++k) p *= fam[k].eval(s[m][k], mu[k]);
    CHECK(phi[m] == doctest::Approx(p).epsilon(1e-14));
  }
  const std::vector<PolynomialFamily> two(2, PolynomialFamily::legendre());
  CHECK_THROWS_AS(eval_multivariate(s, two, mu), Error);
}
