#pragma once

/**
 * @file connections.hpp
 * @brief Semi-symmetric metric and projective semi-symmetric connections.
 *
 * Both are built from a 1-form pi with pi(X) = g(X, rho):
 *
 *   semi-symmetric metric:       nabla'_X Y = nabla_X Y + pi(Y) X - g(X, Y) rho
 *   projective semi-symmetric:   nabla'_X Y = nabla_X Y + psi(Y) X + psi(X) Y + mu(Y) X - mu(X) Y
 *                                psi = (n-1)/(2(n+1)) pi,  mu = pi / 2
 *
 * (nabla_X pi)(Y) is always taken with the Levi-Civita connection, and every
 * trace of a (0,2) tensor is the metric trace g^ij T_ij.
 */

#include <optional>
#include <string_view>

#include "curvcheck/geometry.hpp"

namespace curvcheck {

enum class ConnectionKind { LeviCivita, SemiSymmetricMetric, ProjectiveSemiSymmetric };

std::string_view to_string(ConnectionKind kind);
/// Accepts "lc", "ssm", "pss".
ConnectionKind parse_connection_kind(std::string_view text);

struct ConnectionSpec {
  ConnectionKind kind = ConnectionKind::LeviCivita;
  std::optional<OneFormField> pi;

  static ConnectionSpec levi_civita() { return {}; }
  static ConnectionSpec semi_symmetric_metric(OneFormField pi) {
    return {ConnectionKind::SemiSymmetricMetric, std::move(pi)};
  }
  static ConnectionSpec projective_semi_symmetric(OneFormField pi) {
    return {ConnectionKind::ProjectiveSemiSymmetric, std::move(pi)};
  }
};

struct AuxTensorsAt {
  Eigen::VectorXd pi;
  Eigen::VectorXd rho;
  double pi_rho = 0.0;        // pi(rho)
  Eigen::MatrixXd nabla_pi;   // nabla_pi(i, j) = (nabla_{d_i} pi)(d_j)
  Eigen::MatrixXd P;          // P(X,Y) = (nabla_X pi)(Y) - pi(X)pi(Y) + pi(rho) g(X,Y) / 2
  Eigen::MatrixXd L;          // L(l, a): (L X)^l = L(l, a) X^a, g(LX, Y) = P(X, Y)
  double a = 0.0;             // Tr P
  Eigen::MatrixXd theta;      // theta(X,Y) = [(nabla_Y pi)(X) - (nabla_X pi)(Y)] / 2
  Eigen::MatrixXd omega;
  double tr_theta = 0.0;
  double tr_omega = 0.0;
};

/// rho with g(rho, X) = pi(X).
Eigen::VectorXd rho_from_pi(const MetricField& g, const OneFormField& pi, Point p);

ConnectionAt connection_at(const MetricField& g, const ConnectionSpec& spec, Point p);

AuxTensorsAt aux_tensors_at(const MetricField& g, const OneFormField& pi, Point p);

/// Curvature of the requested connection assembled from the Levi-Civita
/// curvature plus the closed-form corrections (P, L, a for the semi-symmetric
/// metric connection; theta, omega for the projective one). Ricci and scalar
/// use the corresponding closed forms as well.
CurvatureAt modified_curvature_at(const MetricField& g, const ConnectionSpec& spec, Point p);

/// R^l_kij = d_i G^l_jk - d_j G^l_ik + G^l_im G^m_jk - G^l_jm G^m_ik for any affine connection.
Tensor4 direct_curvature_at(const ConnectionAt& conn);

/// (L'_tau g)(d_i, d_j) = g(nabla'_{d_i} tau, d_j) + g(d_i, nabla'_{d_j} tau).
Eigen::MatrixXd modified_lie_derivative_metric_at(const MetricField& g, const ConnectionSpec& spec,
                                                  const VectorField& tau, Point p);

/// (nabla' g)(k, i, j) = d_k g_ij - G^m_ki g_mj - G^m_kj g_im.
Tensor3 nabla_metric_at(const MetricField& g, const ConnectionAt& conn, Point p);

}  // namespace curvcheck
