#pragma once

// gPC coefficient fields by pseudospectral projection, quantities of interest
// and the quadrature constants B_{Q,m} and C_{Q,M}.

#include <Eigen/Dense>
#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "rbgpc/polybasis.hpp"
#include "rbgpc/quadrature.hpp"
#include "rbgpc/rbm.hpp"
#include "rbgpc/truthpde.hpp"

namespace rbgpc {

enum class FieldSource { Truth, ReducedBasis };

struct GpcExpansion {
  Eigen::MatrixXd coefficients;  // dofs x M; column m is u_hat_{m+1}
  FieldSource source = FieldSource::Truth;
  std::size_t reduced_dim = 0;   // N for ReducedBasis
  int nx = 0;
  int ny = 0;
  double cell_area = 1.0;
  MultiIndexSet set{1, 0};
  RuleProvenance rule;

  std::size_t size() const { return static_cast<std::size_t>(coefficients.cols()); }
  std::size_t dofs() const { return static_cast<std::size_t>(coefficients.rows()); }
  std::string source_tag() const;
  // u_M(x, mu) on the grid.
  Eigen::VectorXd evaluate(std::span<const PolynomialFamily> families,
                           std::span<const double> mu) const;
};

using FieldSolver = std::function<Eigen::VectorXd(std::span<const double> mu)>;

// u_hat_m = sum_q w_q solver(mu^q) Phi_m(mu^q), one solver call per node.
// A solver failure is rethrown with the node index and coordinates.
GpcExpansion pseudospectral_coefficients(const FieldSolver& solver, const QuadratureRule& rule,
                                         const MultiIndexSet& set, const SpatialGrid& grid);

// Truth baseline: one truth solve per node.
GpcExpansion direct_gpc(const AffineProblem& problem, const QuadratureRule& rule,
                        const MultiIndexSet& set);

// Surrogate expansion: coefficients are accumulated in reduced coordinates
// and lifted once, so the cost per node does not depend on the grid size.
GpcExpansion rb_gpc(const ReducedBasisSpace& space, const QuadratureRule& rule,
                    const MultiIndexSet& set, const SpatialGrid& grid, int threads = 1);

enum class QoiKind { Mean, Variance, NormSquared };

struct QoiSpec {
  QoiKind kind = QoiKind::Mean;
  double c_lip = 1.0;
};

// C_Lip = 1 for the mean, 2U otherwise.
QoiSpec make_qoi_spec(QoiKind kind, double uniform_bound);
std::string to_string(QoiKind kind);
QoiKind parse_qoi_kind(const std::string& s);  // throws Error(Config)

// Pointwise field of the quantity of interest.
Eigen::VectorXd qoi(const GpcExpansion& expansion, const QoiSpec& spec);

// F[Phi_m] for m = 1..M.
std::vector<double> qoi_functional_weights(QoiKind kind, std::size_t M);

// B_{Q,m} = sqrt(sum_q |w_q| Phi_m(mu^q)^2).
std::vector<double> b_qm(const QuadratureRule& rule, const MultiIndexSet& set,
                         std::span<const PolynomialFamily> families);
double c_qm(std::span<const double> bqm, QoiKind kind);
double c_qm(const QuadratureRule& rule, const MultiIndexSet& set,
            std::span<const PolynomialFamily> families, const QoiSpec& spec);

// X norm of the difference of the two QoI fields.
double qoi_error(const GpcExpansion& truth, const GpcExpansion& rb, const QoiSpec& spec);

struct CoefficientBound {
  double error = 0.0;  // ||u_hat^truth_m - u_hat^rb_m||_X
  double bound = 0.0;  // B_{Q,m} * rms(delta_w)
  bool pass() const { return error <= bound; }
};

struct CoefficientBoundReport {
  std::vector<CoefficientBound> terms;
  std::size_t violations() const;
};

CoefficientBoundReport coefficient_error_bound_check(const GpcExpansion& truth,
                                                     const GpcExpansion& rb,
                                                     std::span<const double> bqm,
                                                     std::span<const double> delta_w);

struct QoiBound {
  QoiKind kind = QoiKind::Mean;
  double error = 0.0;
  double bound = 0.0;  // C_Lip * C_QM * rms(delta_w)
  bool pass() const { return error <= bound; }
};

QoiBound qoi_bound_check(const GpcExpansion& truth, const GpcExpansion& rb,
                         const QoiSpec& spec, std::span<const double> bqm,
                         std::span<const double> delta_w);

// sqrt(mean(v^2)).
double rms(std::span<const double> v);

}  // namespace rbgpc
