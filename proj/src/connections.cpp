#include "curvcheck/connections.hpp"

#include <stdexcept>
#include <string>

namespace curvcheck {

namespace {

using Index = Eigen::Index;
Index ix(std::size_t i) { return static_cast<Index>(i); }

double delta(std::size_t a, std::size_t b) { return a == b ? 1.0 : 0.0; }

const OneFormField& require_pi(const ConnectionSpec& spec) {
  if (!spec.pi) throw std::invalid_argument(std::string(to_string(spec.kind)) + " connection needs a 1-form pi");
  return *spec.pi;
}

// Everything the modified connections need at one point.
struct PointData {
  MetricJet mj;
  ConnectionAt lc;
  FieldJet pi;  // jac(j, m) = d_m pi_j
};

PointData point_data(const MetricField& g, const OneFormField& pi, Point p) {
  if (pi.dim() != g.dim()) throw DimensionError("1-form dimension does not match the chart");
  PointData d{metric_jet(g, p), {}, field_jet(pi, p)};
  d.lc = christoffel_from_jet(d.mj);
  return d;
}

// nabla_pi(i, j) = d_i pi_j - Gamma^k_ij pi_k
Eigen::MatrixXd levi_civita_nabla_pi(const PointData& d) {
  const std::size_t n = d.lc.dim();
  Eigen::MatrixXd out(ix(n), ix(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      double s = d.pi.jac(ix(j), ix(i));
      for (std::size_t k = 0; k < n; ++k) s -= d.lc.gamma(k, i, j) * d.pi.value(ix(k));
      out(ix(i), ix(j)) = s;
    }
  }
  return out;
}

double metric_trace(const Eigen::MatrixXd& ginv, const Eigen::MatrixXd& t) {
  return (ginv.array() * t.array()).sum();
}

ConnectionAt semi_symmetric_metric(const PointData& d) {
  const std::size_t n = d.lc.dim();
  const Eigen::MatrixXd& gm = d.mj.at.matrix;
  const Eigen::MatrixXd& ginv = d.mj.at.inverse;
  const Eigen::VectorXd rho = ginv * d.pi.value;
  const Tensor3 dginv = inverse_metric_derivative(d.mj);

  // drho(m, k) = d_m rho^k
  Eigen::MatrixXd drho(ix(n), ix(n));
  for (std::size_t m = 0; m < n; ++m) {
    for (std::size_t k = 0; k < n; ++k) {
      double s = 0.0;
      for (std::size_t l = 0; l < n; ++l) {
        s += dginv(m, k, l) * d.pi.value(ix(l)) + ginv(ix(k), ix(l)) * d.pi.jac(ix(l), ix(m));
      }
      drho(ix(m), ix(k)) = s;
    }
  }

  ConnectionAt c = d.lc;
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        // nabla'_{d_i} d_j = nabla_{d_i} d_j + pi_j d_i - g_ij rho
        c.gamma(k, i, j) += d.pi.value(ix(j)) * delta(k, i) - gm(ix(i), ix(j)) * rho(ix(k));
        for (std::size_t m = 0; m < n; ++m) {
          c.dgamma(m, k, i, j) += d.pi.jac(ix(j), ix(m)) * delta(k, i) - d.mj.d(m, i, j) * rho(ix(k)) -
                                  gm(ix(i), ix(j)) * drho(ix(m), ix(k));
        }
      }
    }
  }
  c.torsion_free = d.pi.value.isZero(0.0);
  return c;
}

ConnectionAt projective_semi_symmetric(const PointData& d) {
  const std::size_t n = d.lc.dim();
  const double nn = static_cast<double>(n);
  const double psi_factor = (nn - 1.0) / (2.0 * (nn + 1.0));
  const double mu_factor = 0.5;

  ConnectionAt c = d.lc;
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        // psi(Y) X + psi(X) Y + mu(Y) X - mu(X) Y with X = d_i, Y = d_j
        auto correction = [&](double pi_i, double pi_j) {
          return psi_factor * pi_j * delta(k, i) + psi_factor * pi_i * delta(k, j) + mu_factor * pi_j * delta(k, i) -
                 mu_factor * pi_i * delta(k, j);
        };
        c.gamma(k, i, j) += correction(d.pi.value(ix(i)), d.pi.value(ix(j)));
        for (std::size_t m = 0; m < n; ++m) {
          c.dgamma(m, k, i, j) += correction(d.pi.jac(ix(i), ix(m)), d.pi.jac(ix(j), ix(m)));
        }
      }
    }
  }
  c.torsion_free = d.pi.value.isZero(0.0);
  return c;
}

AuxTensorsAt aux_from(const PointData& d) {
  const std::size_t n = d.lc.dim();
  const double nn = static_cast<double>(n);
  const Eigen::MatrixXd& gm = d.mj.at.matrix;
  const Eigen::MatrixXd& ginv = d.mj.at.inverse;

  AuxTensorsAt aux;
  aux.pi = d.pi.value;
  aux.rho = ginv * aux.pi;
  aux.pi_rho = aux.pi.dot(aux.rho);
  aux.nabla_pi = levi_civita_nabla_pi(d);
  const Eigen::MatrixXd pipi = aux.pi * aux.pi.transpose();

  aux.P = aux.nabla_pi - pipi + 0.5 * aux.pi_rho * gm;
  aux.L = ginv * aux.P.transpose();  // L(l, a) = g^lb P(a, b)
  aux.a = metric_trace(ginv, aux.P);

  aux.theta = 0.5 * (aux.nabla_pi.transpose() - aux.nabla_pi);
  aux.omega = (nn - 1.0) / (2.0 * (nn + 1.0)) * aux.nabla_pi + 0.5 * aux.nabla_pi.transpose() -
              (nn * nn) / ((nn + 1.0) * (nn + 1.0)) * pipi;
  aux.tr_theta = metric_trace(ginv, aux.theta);
  aux.tr_omega = metric_trace(ginv, aux.omega);
  return aux;
}

}  // namespace

std::string_view to_string(ConnectionKind kind) {
  switch (kind) {
    case ConnectionKind::LeviCivita:
      return "lc";
    case ConnectionKind::SemiSymmetricMetric:
      return "ssm";
    case ConnectionKind::ProjectiveSemiSymmetric:
      return "pss";
  }
  return "?";
}

ConnectionKind parse_connection_kind(std::string_view text) {
  if (text == "lc") return ConnectionKind::LeviCivita;
  if (text == "ssm") return ConnectionKind::SemiSymmetricMetric;
  if (text == "pss") return ConnectionKind::ProjectiveSemiSymmetric;
  throw std::invalid_argument("unknown connection '" + std::string(text) + "' (expected lc, ssm or pss)");
}

Eigen::VectorXd rho_from_pi(const MetricField& g, const OneFormField& pi, Point p) {
  const MetricAt m = metric_at(g, p);
  return m.inverse * field_value(pi.components, p);
}

ConnectionAt connection_at(const MetricField& g, const ConnectionSpec& spec, Point p) {
  if (spec.kind == ConnectionKind::LeviCivita) return christoffel_at(g, p);
  const PointData d = point_data(g, require_pi(spec), p);
  return spec.kind == ConnectionKind::SemiSymmetricMetric ? semi_symmetric_metric(d) : projective_semi_symmetric(d);
}

AuxTensorsAt aux_tensors_at(const MetricField& g, const OneFormField& pi, Point p) {
  return aux_from(point_data(g, pi, p));
}

CurvatureAt modified_curvature_at(const MetricField& g, const ConnectionSpec& spec, Point p) {
  CurvatureAt base = curvature_at(g, p);
  if (spec.kind == ConnectionKind::LeviCivita) return base;

  const PointData d = point_data(g, require_pi(spec), p);
  const AuxTensorsAt aux = aux_from(d);
  const std::size_t n = g.dim();
  const double nn = static_cast<double>(n);
  const Eigen::MatrixXd& gm = d.mj.at.matrix;

  CurvatureAt out;
  out.riemann = base.riemann;
  if (spec.kind == ConnectionKind::SemiSymmetricMetric) {
    // R(X,Y)Z - P(Y,Z)X + P(X,Z)Y - g(Y,Z)LX + g(X,Z)LY
    for (std::size_t l = 0; l < n; ++l)
      for (std::size_t k = 0; k < n; ++k)
        for (std::size_t i = 0; i < n; ++i)
          for (std::size_t j = 0; j < n; ++j) {
            out.riemann(l, k, i, j) += -aux.P(ix(j), ix(k)) * delta(l, i) + aux.P(ix(i), ix(k)) * delta(l, j) -
                                       gm(ix(j), ix(k)) * aux.L(ix(l), ix(i)) +
                                       gm(ix(i), ix(k)) * aux.L(ix(l), ix(j));
          }
    out.ricci = base.ricci - (nn - 2.0) * aux.P - aux.a * gm;
    out.scalar = base.scalar - 2.0 * (nn - 1.0) * aux.a;
  } else {
    // R(X,Y)Z + theta(X,Y)Z + omega(X,Z)Y - omega(Y,Z)X
    for (std::size_t l = 0; l < n; ++l)
      for (std::size_t k = 0; k < n; ++k)
        for (std::size_t i = 0; i < n; ++i)
          for (std::size_t j = 0; j < n; ++j) {
            out.riemann(l, k, i, j) += aux.theta(ix(i), ix(j)) * delta(l, k) +
                                       aux.omega(ix(i), ix(k)) * delta(l, j) -
                                       aux.omega(ix(j), ix(k)) * delta(l, i);
          }
    out.ricci = base.ricci + aux.theta - (nn - 1.0) * aux.omega;
    out.scalar = base.scalar + aux.tr_theta - (nn - 1.0) * aux.tr_omega;
  }
  out.riemann_lower = lower_first_index(out.riemann, gm);
  return out;
}

Tensor4 direct_curvature_at(const ConnectionAt& conn) {
  const std::size_t n = conn.dim();
  const Tensor3& G = conn.gamma;
  const Tensor4& dG = conn.dgamma;
  Tensor4 r(n);
  for (std::size_t l = 0; l < n; ++l)
    for (std::size_t k = 0; k < n; ++k)
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
          double v = dG(i, l, j, k) - dG(j, l, i, k);
          for (std::size_t m = 0; m < n; ++m) v += G(l, i, m) * G(m, j, k) - G(l, j, m) * G(m, i, k);
          r(l, k, i, j) = v;
        }
  return r;
}

Eigen::MatrixXd modified_lie_derivative_metric_at(const MetricField& g, const ConnectionSpec& spec,
                                                  const VectorField& tau, Point p) {
  const ConnectionAt conn = connection_at(g, spec, p);
  const Eigen::MatrixXd gm = metric_at(g, p).matrix;
  const Eigen::MatrixXd d = covariant_derivative_at(conn, tau, p);
  const Eigen::MatrixXd gd = d * gm;  // gd(i, j) = g(nabla'_i tau, d_j)
  return gd + gd.transpose();
}

Tensor3 nabla_metric_at(const MetricField& g, const ConnectionAt& conn, Point p) {
  const MetricJet mj = metric_jet(g, p);
  const std::size_t n = g.dim();
  const Eigen::MatrixXd& gm = mj.at.matrix;
  Tensor3 out(n);
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        double v = mj.d(k, i, j);
        for (std::size_t m = 0; m < n; ++m) {
          v -= conn.gamma(m, k, i) * gm(ix(m), ix(j)) + conn.gamma(m, k, j) * gm(ix(i), ix(m));
        }
        out(k, i, j) = v;
      }
  return out;
}

}  // namespace curvcheck
