#include "rbgpc/gpcqoi.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "parallel.hpp"
#include "rbgpc/error.hpp"
#include "rbgpc/kernels.hpp"

namespace rbgpc {
namespace {

std::string format_node(std::size_t q, std::span<const double> mu) {
  std::ostringstream os;
  os.precision(17);
  os << "node " << q << " (mu = [";
  for (std::size_t k = 0; k < mu.size(); ++k) os << (k ? ", " : "") << mu[k];
  os << "])";
  return os.str();
}

void check_families(const QuadratureRule& rule, const MultiIndexSet& set) {
  require(rule.dim() == set.dim(), ErrorKind::Shape,
          "quadrature dimension " + std::to_string(rule.dim()) +
              " does not match multi-index dimension " + std::to_string(set.dim()));
  require(rule.families().size() == static_cast<std::size_t>(set.dim()), ErrorKind::Shape,
          "quadrature rule carries no polynomial families");
}

GpcExpansion empty_expansion(const QuadratureRule& rule, const MultiIndexSet& set,
                             const SpatialGrid& grid) {
  GpcExpansion e;
  e.coefficients = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(grid.size()),
                                         static_cast<Eigen::Index>(set.size()));
  e.nx = grid.nx();
  e.ny = grid.ny();
  e.cell_area = grid.cell_area();
  e.set = set;
  e.rule = rule.provenance();
  return e;
}

double x_norm(const Eigen::VectorXd& v, double cell_area) {
  return std::sqrt(cell_area * kernels::dot({v.data(), static_cast<std::size_t>(v.size())},
                                            {v.data(), static_cast<std::size_t>(v.size())}));
}

}  // namespace

std::string GpcExpansion::source_tag() const {
  return source == FieldSource::Truth ? "truth" : "rb(" + std::to_string(reduced_dim) + ")";
}

Eigen::VectorXd GpcExpansion::evaluate(std::span<const PolynomialFamily> families,
                                       std::span<const double> mu) const {
  const std::vector<double> phi = eval_multivariate(set, families, mu);
  return coefficients * Eigen::Map<const Eigen::VectorXd>(phi.data(),
                                                          static_cast<Eigen::Index>(phi.size()));
}

GpcExpansion pseudospectral_coefficients(const FieldSolver& solver, const QuadratureRule& rule,
                                         const MultiIndexSet& set, const SpatialGrid& grid) {
  check_families(rule, set);
  GpcExpansion e = empty_expansion(rule, set, grid);
  const std::size_t M = set.size();
  const std::size_t n = grid.size();
  std::vector<double> scratch(static_cast<std::size_t>(set.degree() + 1) * set.dim());
  std::vector<double> phi(M);
  for (std::size_t q = 0; q < rule.size(); ++q) {
    const auto mu = rule.node(q);
    Eigen::VectorXd u;
    try {
      u = solver(mu);
    } catch (const Error& err) {
      raise(err.kind(), "solver failed at " + format_node(q, mu) + ": " + err.what());
    } catch (const std::exception& err) {
      raise(ErrorKind::Numeric, "solver failed at " + format_node(q, mu) + ": " + err.what());
    }
    require(static_cast<std::size_t>(u.size()) == n, ErrorKind::Shape,
            "solver returned a field of the wrong size at " + format_node(q, mu));
    eval_multivariate(set, rule.families(), mu, scratch, phi);
    const double w = rule.weight(q);
    for (std::size_t m = 0; m < M; ++m)
      kernels::axpy(w * phi[m], {u.data(), n}, {e.coefficients.col(m).data(), n});
  }
  return e;
}

GpcExpansion direct_gpc(const AffineProblem& problem, const QuadratureRule& rule,
                        const MultiIndexSet& set) {
  GpcExpansion e = pseudospectral_coefficients(
      [&](std::span<const double> mu) { return truth_solve(problem, mu).field; }, rule, set,
      problem.grid());
  e.source = FieldSource::Truth;
  return e;
}

GpcExpansion rb_gpc(const ReducedBasisSpace& space, const QuadratureRule& rule,
                    const MultiIndexSet& set, const SpatialGrid& grid, int threads) {
  check_families(rule, set);
  require(space.dofs() == grid.size(), ErrorKind::Shape, "basis does not match the grid");
  const std::size_t N = space.dim();
  const std::size_t M = set.size();
  const std::size_t Q = rule.size();

  // Per-chunk partial sums in reduced coordinates, reduced in chunk order.
  const int t = std::max(1, threads);
  const std::size_t chunks = std::min<std::size_t>(static_cast<std::size_t>(t), std::max<std::size_t>(Q, 1));
  const std::size_t chunk = (Q + chunks - 1) / chunks;
  std::vector<Eigen::MatrixXd> partial(chunks, Eigen::MatrixXd::Zero(N, M));
  detail::parallel_for(chunks, t, [&](std::size_t cb, std::size_t ce) {
    std::vector<double> scratch(static_cast<std::size_t>(set.degree() + 1) * set.dim());
    std::vector<double> phi(M);
    for (std::size_t c = cb; c < ce; ++c) {
      Eigen::MatrixXd& acc = partial[c];
      for (std::size_t q = c * chunk; q < std::min(Q, (c + 1) * chunk); ++q) {
        const auto mu = rule.node(q);
        const RbSolution s = rb_solve(space, mu);
        eval_multivariate(set, rule.families(), mu, scratch, phi);
        const double w = rule.weight(q);
        for (std::size_t m = 0; m < M; ++m)
          kernels::axpy(w * phi[m], {s.coeffs.data(), N}, {acc.col(m).data(), N});
      }
    }
  });
  Eigen::MatrixXd reduced = Eigen::MatrixXd::Zero(N, M);
  for (const auto& p : partial) reduced += p;

  GpcExpansion e = empty_expansion(rule, set, grid);
  e.coefficients = space.basis() * reduced;
  e.source = FieldSource::ReducedBasis;
  e.reduced_dim = N;
  return e;
}

QoiSpec make_qoi_spec(QoiKind kind, double uniform_bound) {
  return {kind, kind == QoiKind::Mean ? 1.0 : 2.0 * uniform_bound};
}

std::string to_string(QoiKind kind) {
  switch (kind) {
    case QoiKind::Mean: return "mean";
    case QoiKind::Variance: return "variance";
    case QoiKind::NormSquared: return "norm-squared";
  }
  return "?";
}

QoiKind parse_qoi_kind(const std::string& s) {
  if (s == "mean") return QoiKind::Mean;
  if (s == "variance") return QoiKind::Variance;
  if (s == "norm-squared" || s == "norm_squared") return QoiKind::NormSquared;
  raise(ErrorKind::Config, "unknown QoI kind '" + s + "' (mean | variance | norm-squared)");
}

Eigen::VectorXd qoi(const GpcExpansion& e, const QoiSpec& spec) {
  require(e.size() > 0, ErrorKind::Shape, "empty expansion");
  const std::size_t n = e.dofs();
  if (spec.kind == QoiKind::Mean) return e.coefficients.col(0);
  Eigen::VectorXd out = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
  const std::size_t first = spec.kind == QoiKind::Variance ? 1 : 0;
  for (std::size_t m = first; m < e.size(); ++m)
    kernels::add_squares({e.coefficients.col(m).data(), n}, {out.data(), n});
  return out;
}

std::vector<double> qoi_functional_weights(QoiKind kind, std::size_t M) {
  std::vector<double> f(M, 1.0);
  if (M == 0) return f;
  if (kind == QoiKind::Mean) {
    std::fill(f.begin(), f.end(), 0.0);
    f[0] = 1.0;
  } else if (kind == QoiKind::Variance) {
    f[0] = 0.0;
  }
  return f;
}

std::vector<double> b_qm(const QuadratureRule& rule, const MultiIndexSet& set,
                         std::span<const PolynomialFamily> families) {
  require(families.size() == static_cast<std::size_t>(set.dim()) && rule.dim() == set.dim(),
          ErrorKind::Shape, "b_qm: dimension mismatch");
  const std::size_t M = set.size();
  const std::size_t Q = rule.size();
  constexpr std::size_t kBlock = 256;
  std::vector<double> sums(M, 0.0);
  std::vector<double> scratch(static_cast<std::size_t>(set.degree() + 1) * set.dim());
  std::vector<double> phi(M);
  // phi_block is M x block, row-major, so each basis function is contiguous.
  std::vector<double> phi_block(M * kBlock);
  std::vector<double> w_block(kBlock);
  for (std::size_t q0 = 0; q0 < Q; q0 += kBlock) {
    const std::size_t b = std::min(kBlock, Q - q0);
    for (std::size_t j = 0; j < b; ++j) {
      eval_multivariate(set, families, rule.node(q0 + j), scratch, phi);
      w_block[j] = rule.weight(q0 + j);
      for (std::size_t m = 0; m < M; ++m) phi_block[m * kBlock + j] = phi[m];
    }
    for (std::size_t m = 0; m < M; ++m)
      sums[m] += kernels::abs_weighted_sumsq({w_block.data(), b}, {phi_block.data() + m * kBlock, b});
  }
  for (auto& s : sums) s = std::sqrt(s);
  return sums;
}

double c_qm(std::span<const double> bqm, QoiKind kind) {
  const std::vector<double> f = qoi_functional_weights(kind, bqm.size());
  double c = 0.0;
  for (std::size_t m = 0; m < bqm.size(); ++m) c += bqm[m] * std::abs(f[m]);
  return c;
}

double c_qm(const QuadratureRule& rule, const MultiIndexSet& set,
            std::span<const PolynomialFamily> families, const QoiSpec& spec) {
  return c_qm(b_qm(rule, set, families), spec.kind);
}

double qoi_error(const GpcExpansion& truth, const GpcExpansion& rb, const QoiSpec& spec) {
  require(truth.size() == rb.size() && truth.dofs() == rb.dofs(), ErrorKind::Shape,
          "qoi_error: expansions differ in shape");
  return x_norm(qoi(truth, spec) - qoi(rb, spec), truth.cell_area);
}

double rms(std::span<const double> v) {
  if (v.empty()) return 0.0;
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s / static_cast<double>(v.size()));
}

std::size_t CoefficientBoundReport::violations() const {
  std::size_t n = 0;
  for (const auto& t : terms) n += !t.pass();
  return n;
}

CoefficientBoundReport coefficient_error_bound_check(const GpcExpansion& truth,
                                                     const GpcExpansion& rb,
                                                     std::span<const double> bqm,
                                                     std::span<const double> delta_w) {
  require(truth.size() == rb.size() && truth.dofs() == rb.dofs() && bqm.size() == truth.size(),
          ErrorKind::Shape, "coefficient bound check: shape mismatch");
  const double r = rms(delta_w);
  CoefficientBoundReport rep;
  for (std::size_t m = 0; m < truth.size(); ++m) {
    const Eigen::VectorXd d = truth.coefficients.col(m) - rb.coefficients.col(m);
    rep.terms.push_back({x_norm(d, truth.cell_area), bqm[m] * r});
  }
  return rep;
}

QoiBound qoi_bound_check(const GpcExpansion& truth, const GpcExpansion& rb, const QoiSpec& spec,
                         std::span<const double> bqm, std::span<const double> delta_w) {
  QoiBound b;
  b.kind = spec.kind;
  b.error = qoi_error(truth, rb, spec);
  b.bound = spec.c_lip * c_qm(bqm, spec.kind) * rms(delta_w);
  return b;
}

}  // namespace rbgpc
