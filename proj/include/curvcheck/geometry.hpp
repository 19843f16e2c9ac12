#pragma once

/**
 * @file geometry.hpp
 * @brief Pointwise Riemannian calculus on a coordinate chart.
 *
 * Index conventions (used by every module):
 *   - Gamma^k_ij is stored as gamma(k, i, j) and means (nabla_{d_i} d_j)^k.
 *   - dgamma(m, k, i, j) = d_m Gamma^k_ij.
 *   - riemann(l, k, i, j) = R^l_kij with (R(X,Y)Z)^l = R^l_kij Z^k X^i Y^j and
 *     R(X,Y)Z = nabla_X nabla_Y Z - nabla_Y nabla_X Z - nabla_[X,Y] Z.
 *   - riemann_lower(l, k, i, j) = g_la R^a_kij.
 *   - ricci(j, k) = S(d_j, d_k) = R^i_kij, the trace of X -> R(X, d_j) d_k.
 */

#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "curvcheck/errors.hpp"
#include "curvcheck/expr.hpp"
#include "curvcheck/tensor.hpp"

namespace curvcheck {

using Point = std::span<const double>;

struct Chart {
  CoordNames coords;
  std::optional<Expr> exclusion;  // zero set is the singular locus

  std::size_t dim() const { return coords->size(); }
  const std::vector<std::string>& names() const { return *coords; }

  /// Throws DimensionError for n < 2 and std::invalid_argument for bad names.
  static Chart make(std::vector<std::string> names, std::optional<std::string> exclusion = std::nullopt);
};

/// Symmetric (0,2) tensor field; only the lower triangle is stored.
class MetricField {
 public:
  MetricField() = default;
  MetricField(Chart chart, std::vector<Expr> lower_triangle);

  /// Builds from a full n x n table of expression strings; the table must be symmetric.
  static MetricField from_strings(const Chart& chart, const std::vector<std::vector<std::string>>& rows);
  static MetricField diagonal(const Chart& chart, const std::vector<std::string>& diag);

  const Chart& chart() const { return chart_; }
  std::size_t dim() const { return chart_.dim(); }
  const Expr& operator()(std::size_t i, std::size_t j) const;

 private:
  static std::size_t tri_index(std::size_t i, std::size_t j) {
    return i >= j ? i * (i + 1) / 2 + j : j * (j + 1) / 2 + i;
  }

  Chart chart_;
  std::vector<Expr> lower_;
};

struct VectorField {
  std::vector<Expr> components;  // contravariant

  std::size_t dim() const { return components.size(); }
  static VectorField from_strings(const Chart& chart, const std::vector<std::string>& comps);
};

struct OneFormField {
  std::vector<Expr> components;  // covariant

  std::size_t dim() const { return components.size(); }
  static OneFormField from_strings(const Chart& chart, const std::vector<std::string>& comps);
  static OneFormField zero(const Chart& chart);
};

struct FrameField {
  std::vector<VectorField> vectors;
};

struct MetricAt {
  Eigen::MatrixXd matrix;
  Eigen::MatrixXd inverse;
  double det = 0.0;
  double condition = 0.0;
};

/// Metric with first and second partials: d(m, i, j) = d_m g_ij, dd(m, l, i, j) = d_m d_l g_ij.
struct MetricJet {
  MetricAt at;
  Tensor3 d;
  Tensor4 dd;
};

/// Affine connection coefficients and their first partials at a point.
struct ConnectionAt {
  Tensor3 gamma;
  Tensor4 dgamma;
  bool torsion_free = true;

  std::size_t dim() const { return gamma.dim(); }
};

struct CurvatureAt {
  Tensor4 riemann;
  Tensor4 riemann_lower;
  Eigen::MatrixXd ricci;
  double scalar = 0.0;
};

/// Value and Jacobian of a vector or covector field: jac(k, i) = d_i V^k.
struct FieldJet {
  Eigen::VectorXd value;
  Eigen::MatrixXd jac;
};

/// Condition number above which a metric is treated as singular.
inline constexpr double kSingularCondition = 1e12;

/// Throws OutOfChartError if p lies on the exclusion locus.
void check_in_chart(const Chart& chart, Point p);

MetricAt metric_at(const MetricField& g, Point p);
MetricJet metric_jet(const MetricField& g, Point p);

/// d(m, k, l) = d_m g^kl = -g^ka (d_m g_ab) g^bl.
Tensor3 inverse_metric_derivative(const MetricJet& mj);

FieldJet field_jet(std::span<const Expr> components, Point p);
inline FieldJet field_jet(const VectorField& v, Point p) { return field_jet(v.components, p); }
inline FieldJet field_jet(const OneFormField& w, Point p) { return field_jet(w.components, p); }
Eigen::VectorXd field_value(std::span<const Expr> components, Point p);

/// Levi-Civita coefficients from the coordinate formula
/// Gamma^k_ij = 1/2 g^kl (d_i g_jl + d_j g_il - d_l g_ij), with dgamma in closed form.
ConnectionAt christoffel_at(const MetricField& g, Point p);
ConnectionAt christoffel_from_jet(const MetricJet& mj);

/// Riemann tensor from second derivatives of the metric (lowered form first),
/// then raised; Ricci by contraction and r = g^ij S_ij.
CurvatureAt curvature_at(const MetricField& g, Point p);

/// ricci(j, k) = R^i_kij for a given (l,k,i,j) Riemann tensor.
Eigen::MatrixXd ricci_from_riemann(const Tensor4& riemann);
Tensor4 lower_first_index(const Tensor4& riemann, const Eigen::MatrixXd& metric);

Eigen::VectorXd lie_bracket_at(const VectorField& x, const VectorField& y, Point p);

/// D(i, k) = (nabla_{d_i} tau)^k = d_i tau^k + Gamma^k_ij tau^j.
Eigen::MatrixXd covariant_derivative_at(const ConnectionAt& conn, const VectorField& tau, Point p);
Eigen::MatrixXd covariant_derivative_at(const ConnectionAt& conn, const FieldJet& tau);

/// (L_tau g)_ij computed from nabla tau and from the coordinate formula;
/// throws ConsistencyError if the two disagree by more than 1e-10 (relative to scale).
Eigen::MatrixXd lie_derivative_metric_at(const MetricField& g, const VectorField& tau, Point p);

/// Returns both routes for diagnostics: first the nabla-based form, then the coordinate form.
std::pair<Eigen::MatrixXd, Eigen::MatrixXd> lie_derivative_metric_routes(const MetricField& g,
                                                                         const VectorField& tau, Point p);

/// Columns are the frame vectors at p.
Eigen::MatrixXd frame_matrix_at(const FrameField& frame, Point p);

/// Coefficients c with sum_a c_a e_a(p) = v; throws FrameDegenerateError if |det| < 1e-10.
Eigen::VectorXd frame_components_at(const FrameField& frame, const Eigen::VectorXd& v, Point p);

}  // namespace curvcheck
