#pragma once

/**
 * @file solitons.hpp
 * @brief Torse-forming fits, *-Ricci curvature, closed-form soliton constants
 *        and soliton residuals.
 *
 * A vector field tau is torse-forming when nabla_X tau = phi X + alpha(X) tau
 * for a function phi and a 1-form alpha (Levi-Civita nabla). Soliton
 * equations checked here, with L' the Lie-type derivative of the chosen
 * connection and r' its scalar curvature:
 *
 *   conformal:  L'_tau g + [2 lambda - 2 r' - (p + 2/n)] g = 0
 *   yamabe:     L'_tau g + [2 lambda - 2 r'] g = 0
 *   star:       (1/2) L_tau g - (r* - lambda) g = 0
 */

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "curvcheck/connections.hpp"
#include "curvcheck/geometry.hpp"

namespace curvcheck {

inline constexpr double kDefaultClassifyTol = 1e-7;
inline constexpr double kDefaultResidualTol = 1e-8;
inline constexpr double kVerdictTol = 1e-9;

enum class TorseLabel { TorseForming, Concircular, Concurrent, Recurrent, Parallel, Torqued };
std::string_view to_string(TorseLabel label);

enum class SolitonKind { Yamabe, Conformal, Star };
std::string_view to_string(SolitonKind kind);
/// Accepts "yamabe", "conformal", "star".
SolitonKind parse_soliton_kind(std::string_view text);

enum class Verdict { Expanding, Steady, Shrinking, NotASoliton };
std::string_view to_string(Verdict v);

/// Sign convention: expanding iff lambda > tol, steady iff |lambda| <= tol.
Verdict verdict_for(double lambda, double tol = kVerdictTol);

/// (1,1)-tensor J^i_j given as an n x n table of expressions (row i, column j).
struct StructureTensorField {
  std::vector<Expr> components;  // row-major
  std::size_t n = 0;

  static StructureTensorField from_strings(const Chart& chart, const std::vector<std::vector<std::string>>& rows);
  Eigen::MatrixXd at(Point p) const;
};

struct TorseFit {
  double phi = 0.0;
  Eigen::VectorXd alpha;
  double alpha_tau = 0.0;   // alpha(tau)
  double alpha_norm = 0.0;  // |alpha|_g
  double residual = 0.0;    // Frobenius norm of nabla tau - phi Id - tau (x) alpha
  std::vector<TorseLabel> labels;
};

/// Least-squares (phi, alpha) for nabla_{d_i} tau^k = phi delta_i^k + alpha_i tau^k.
/// Throws ZeroFieldError if |tau|_g < 1e-10. Labels use kDefaultClassifyTol.
TorseFit fit_torse_forming_at(const MetricField& g, const VectorField& tau, Point p);

/// Labels whose defining quantities are <= tol at every fit. Throws
/// NotTorseFormingError if any residual exceeds tol.
std::vector<TorseLabel> classify(std::span<const TorseFit> fits, double tol = kDefaultClassifyTol);

/// Scalars entering the closed-form lambda at one point.
struct LambdaInputs {
  SolitonKind kind = SolitonKind::Conformal;
  ConnectionKind connection = ConnectionKind::LeviCivita;
  std::size_t n = 0;
  double r = 0.0;       // Levi-Civita scalar curvature
  double r_star = 0.0;  // *-scalar curvature (star kind only)
  double phi = 0.0;
  double alpha_tau = 0.0;
  double pi_tau = 0.0;
  double a = 0.0;
  double tr_theta = 0.0;
  double tr_omega = 0.0;
  double p = 0.0;
};

double lambda_closed_form(const LambdaInputs& in);

/// The closed-form lambda as text, specialised to the detected class.
std::string lambda_formula(SolitonKind kind, ConnectionKind connection, std::span<const TorseLabel> labels);

struct StarRicciAt {
  Eigen::MatrixXd s_star;  // S*(d_i, d_j) = 1/2 tr(Z -> J R(d_i, J d_j) Z)
  double r_star = 0.0;     // g^ij S*_ij
  double asymmetry = 0.0;  // max |S*_ij - S*_ji|
};

StarRicciAt star_ricci_at(const MetricField& g, const StructureTensorField& j, Point p);

struct SolitonResidualAt {
  Eigen::MatrixXd tensor;
  double sup = 0.0;
  double trace = 0.0;  // g^ij residual_ij
};

/// Left-hand side of the soliton equation for the given kind and connection.
/// The star kind requires `j` and only supports the Levi-Civita connection.
SolitonResidualAt soliton_residual_at(SolitonKind kind, const ConnectionSpec& spec, const MetricField& g,
                                      const VectorField& tau, double lambda, double p_field, Point p,
                                      const StructureTensorField* j = nullptr);

/// |g^ij (L'_tau g)_ij - (2 n phi + 2 alpha(tau) + c)| with c = 0 for Levi-Civita
/// and c = 2(n-1) pi(tau) for both modified connections.
double trace_identity_check(const ConnectionSpec& spec, const MetricField& g, const VectorField& tau, Point p,
                            double tol = kDefaultClassifyTol);

struct StarEinsteinFit {
  double lambda = 0.0;
  double nu = 0.0;
  double residual = 0.0;
  bool ill_conditioned = false;
};

/// Least squares S*_sym ~ lambda g + nu eta (x) eta; nu = 0 without eta.
StarEinsteinFit fit_star_einstein_at(const MetricField& g, const StructureTensorField& j, const OneFormField* eta,
                                     Point p);

/// Everything needed to check one soliton candidate over a set of points.
struct SolitonProblem {
  SolitonKind kind = SolitonKind::Conformal;
  ConnectionSpec connection;
  MetricField metric;
  VectorField field;
  std::optional<StructureTensorField> structure;
  double p_field = 0.0;
  double classify_tol = kDefaultClassifyTol;
  double residual_tol = kDefaultResidualTol;
};

struct SolitonPointRow {
  std::vector<double> point;
  TorseFit fit;
  LambdaInputs inputs;
  double lambda = 0.0;
  double trace_residual = 0.0;
  double full_residual_sup = 0.0;
};

struct SolitonReport {
  SolitonKind kind = SolitonKind::Conformal;
  ConnectionKind connection = ConnectionKind::LeviCivita;
  double p_field = 0.0;
  std::vector<SolitonPointRow> rows;
  double lambda = 0.0;  // mean over points
  double lambda_min = 0.0;
  double lambda_max = 0.0;
  double lambda_spread = 0.0;
  double trace_residual_sup = 0.0;
  double full_residual_sup = 0.0;
  double fit_residual_sup = 0.0;
  bool torse_forming = false;
  std::vector<TorseLabel> labels;
  std::string formula;
  Verdict verdict = Verdict::NotASoliton;
};

/// Fits tau, evaluates lambda per point, and measures residuals. Never
/// throws for a non-torse-forming field; the report says so instead.
SolitonReport check_soliton(const SolitonProblem& problem, std::span<const std::vector<double>> points);

}  // namespace curvcheck
