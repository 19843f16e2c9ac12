#include "curvcheck/geometry.hpp"

#include <cmath>
#include <limits>

namespace curvcheck {

namespace {

using Index = Eigen::Index;

Index ix(std::size_t i) { return static_cast<Index>(i); }

void require_dim(std::size_t got, std::size_t want, const char* what) {
  if (got != want) {
    throw DimensionError(std::string(what) + " has " + std::to_string(got) + " components, chart has " +
                         std::to_string(want));
  }
}

std::vector<Expr> parse_all(const Chart& chart, const std::vector<std::string>& comps, const char* what) {
  require_dim(comps.size(), chart.dim(), what);
  std::vector<Expr> out;
  out.reserve(comps.size());
  for (const auto& c : comps) out.push_back(parse(c, chart.coords));
  return out;
}

}  // namespace

Chart Chart::make(std::vector<std::string> names, std::optional<std::string> exclusion) {
  if (names.size() < 2) throw DimensionError("chart dimension must be at least 2");
  Chart c;
  c.coords = make_coords(std::move(names));
  if (exclusion) c.exclusion = parse(*exclusion, c.coords);
  return c;
}

MetricField::MetricField(Chart chart, std::vector<Expr> lower_triangle)
    : chart_(std::move(chart)), lower_(std::move(lower_triangle)) {
  const std::size_t n = chart_.dim();
  if (lower_.size() != n * (n + 1) / 2) throw DimensionError("metric lower triangle has the wrong size");
}

MetricField MetricField::from_strings(const Chart& chart, const std::vector<std::vector<std::string>>& rows) {
  const std::size_t n = chart.dim();
  require_dim(rows.size(), n, "metric");
  std::vector<Expr> lower;
  for (std::size_t i = 0; i < n; ++i) {
    require_dim(rows[i].size(), n, "metric row");
    for (std::size_t j = 0; j <= i; ++j) {
      Expr e = parse(rows[i][j], chart.coords);
      if (i != j && !(parse(rows[j][i], chart.coords) == e)) {
        throw std::invalid_argument("metric entries (" + std::to_string(i) + "," + std::to_string(j) +
                                    ") and (" + std::to_string(j) + "," + std::to_string(i) + ") differ");
      }
      lower.push_back(std::move(e));
    }
  }
  return MetricField(chart, std::move(lower));
}

MetricField MetricField::diagonal(const Chart& chart, const std::vector<std::string>& diag) {
  const std::size_t n = chart.dim();
  require_dim(diag.size(), n, "metric diagonal");
  std::vector<std::vector<std::string>> rows(n, std::vector<std::string>(n, "0"));
  for (std::size_t i = 0; i < n; ++i) rows[i][i] = diag[i];
  return from_strings(chart, rows);
}

const Expr& MetricField::operator()(std::size_t i, std::size_t j) const { return lower_[tri_index(i, j)]; }

VectorField VectorField::from_strings(const Chart& chart, const std::vector<std::string>& comps) {
  return VectorField{parse_all(chart, comps, "vector field")};
}

OneFormField OneFormField::from_strings(const Chart& chart, const std::vector<std::string>& comps) {
  return OneFormField{parse_all(chart, comps, "1-form")};
}

OneFormField OneFormField::zero(const Chart& chart) {
  return OneFormField{std::vector<Expr>(chart.dim(), Expr::constant(0.0, chart.coords))};
}

void check_in_chart(const Chart& chart, Point p) {
  require_dim(p.size(), chart.dim(), "point");
  if (chart.exclusion && eval_value(*chart.exclusion, p) == 0.0) {
    throw OutOfChartError("point lies on the excluded locus " + render(*chart.exclusion) + " = 0");
  }
}

MetricAt metric_at(const MetricField& g, Point p) {
  check_in_chart(g.chart(), p);
  const std::size_t n = g.dim();
  MetricAt out;
  out.matrix.resize(ix(n), ix(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      const double v = eval_value(g(i, j), p);
      out.matrix(ix(i), ix(j)) = v;
      out.matrix(ix(j), ix(i)) = v;
    }
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(out.matrix);
  const auto& s = svd.singularValues();
  const double smin = s(s.size() - 1);
  out.condition = smin > 0.0 ? s(0) / smin : std::numeric_limits<double>::infinity();
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(out.matrix);
  out.det = lu.determinant();
  if (out.det == 0.0 || !std::isfinite(out.condition) || out.condition > kSingularCondition) {
    throw SingularMetricError("metric is singular (condition estimate " + std::to_string(out.condition) + ")",
                              out.condition);
  }
  out.inverse = lu.inverse();
  return out;
}

MetricJet metric_jet(const MetricField& g, Point p) {
  const std::size_t n = g.dim();
  MetricJet mj;
  mj.at = metric_at(g, p);
  mj.d = Tensor3(n);
  mj.dd = Tensor4(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      const Jet2 jet = eval_jet2(g(i, j), p);
      for (std::size_t m = 0; m < n; ++m) {
        mj.d(m, i, j) = mj.d(m, j, i) = jet.grad(ix(m));
        for (std::size_t l = 0; l < n; ++l) mj.dd(m, l, i, j) = mj.dd(m, l, j, i) = jet.hess(ix(m), ix(l));
      }
    }
  }
  return mj;
}

FieldJet field_jet(std::span<const Expr> components, Point p) {
  const std::size_t n = components.size();
  FieldJet fj;
  fj.value.resize(ix(n));
  fj.jac.resize(ix(n), ix(p.size()));
  for (std::size_t k = 0; k < n; ++k) {
    const Jet2 jet = eval_jet2(components[k], p);
    fj.value(ix(k)) = jet.value;
    fj.jac.row(ix(k)) = jet.grad.transpose();
  }
  return fj;
}

Eigen::VectorXd field_value(std::span<const Expr> components, Point p) {
  Eigen::VectorXd v(ix(components.size()));
  for (std::size_t k = 0; k < components.size(); ++k) v(ix(k)) = eval_value(components[k], p);
  return v;
}

Tensor3 inverse_metric_derivative(const MetricJet& mj) {
  const std::size_t n = mj.d.dim();
  const Eigen::MatrixXd& ginv = mj.at.inverse;
  Tensor3 dginv(n);
  for (std::size_t m = 0; m < n; ++m) {
    for (std::size_t k = 0; k < n; ++k) {
      for (std::size_t l = 0; l < n; ++l) {
        double s = 0.0;
        for (std::size_t a = 0; a < n; ++a) {
          for (std::size_t b = 0; b < n; ++b) s += ginv(ix(k), ix(a)) * mj.d(m, a, b) * ginv(ix(b), ix(l));
        }
        dginv(m, k, l) = -s;
      }
    }
  }
  return dginv;
}

ConnectionAt christoffel_from_jet(const MetricJet& mj) {
  const std::size_t n = mj.d.dim();
  const Eigen::MatrixXd& ginv = mj.at.inverse;

  // first kind: first(l, i, j) = 1/2 (d_i g_jl + d_j g_il - d_l g_ij)
  Tensor3 first(n);
  Tensor4 dfirst(n);  // dfirst(m, l, i, j) = d_m first(l, i, j)
  for (std::size_t l = 0; l < n; ++l) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        first(l, i, j) = 0.5 * (mj.d(i, j, l) + mj.d(j, i, l) - mj.d(l, i, j));
        for (std::size_t m = 0; m < n; ++m) {
          dfirst(m, l, i, j) = 0.5 * (mj.dd(m, i, j, l) + mj.dd(m, j, i, l) - mj.dd(m, l, i, j));
        }
      }
    }
  }

  const Tensor3 dginv = inverse_metric_derivative(mj);

  ConnectionAt c;
  c.gamma = Tensor3(n);
  c.dgamma = Tensor4(n);
  c.torsion_free = true;
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        double s = 0.0;
        for (std::size_t l = 0; l < n; ++l) s += ginv(ix(k), ix(l)) * first(l, i, j);
        c.gamma(k, i, j) = s;
        for (std::size_t m = 0; m < n; ++m) {
          double ds = 0.0;
          for (std::size_t l = 0; l < n; ++l) ds += dginv(m, k, l) * first(l, i, j) + ginv(ix(k), ix(l)) * dfirst(m, l, i, j);
          c.dgamma(m, k, i, j) = ds;
        }
      }
    }
  }
  return c;
}

ConnectionAt christoffel_at(const MetricField& g, Point p) { return christoffel_from_jet(metric_jet(g, p)); }

Eigen::MatrixXd ricci_from_riemann(const Tensor4& riemann) {
  const std::size_t n = riemann.dim();
  Eigen::MatrixXd ric = Eigen::MatrixXd::Zero(ix(n), ix(n));
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t k = 0; k < n; ++k) {
      double s = 0.0;
      for (std::size_t i = 0; i < n; ++i) s += riemann(i, k, i, j);
      ric(ix(j), ix(k)) = s;
    }
  }
  return ric;
}

Tensor4 lower_first_index(const Tensor4& riemann, const Eigen::MatrixXd& metric) {
  const std::size_t n = riemann.dim();
  Tensor4 out(n);
  for (std::size_t l = 0; l < n; ++l)
    for (std::size_t k = 0; k < n; ++k)
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
          double s = 0.0;
          for (std::size_t a = 0; a < n; ++a) s += metric(ix(l), ix(a)) * riemann(a, k, i, j);
          out(l, k, i, j) = s;
        }
  return out;
}

CurvatureAt curvature_at(const MetricField& g, Point p) {
  const MetricJet mj = metric_jet(g, p);
  const ConnectionAt lc = christoffel_from_jet(mj);
  const std::size_t n = g.dim();
  const Eigen::MatrixXd& ginv = mj.at.inverse;

  // Christoffel symbols of the first kind, first(a, i, j) = g_ab Gamma^b_ij.
  Tensor3 first(n);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) first(a, i, j) = 0.5 * (mj.d(i, j, a) + mj.d(j, i, a) - mj.d(a, i, j));

  CurvatureAt out;
  out.riemann_lower = Tensor4(n);
  for (std::size_t l = 0; l < n; ++l)
    for (std::size_t k = 0; k < n; ++k)
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
          double v = 0.5 * (mj.dd(i, k, j, l) + mj.dd(j, l, i, k) - mj.dd(i, l, j, k) - mj.dd(j, k, i, l));
          for (std::size_t a = 0; a < n; ++a) v += first(a, j, l) * lc.gamma(a, i, k) - first(a, i, l) * lc.gamma(a, j, k);
          out.riemann_lower(l, k, i, j) = v;
        }

  out.riemann = Tensor4(n);
  for (std::size_t l = 0; l < n; ++l)
    for (std::size_t k = 0; k < n; ++k)
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
          double s = 0.0;
          for (std::size_t a = 0; a < n; ++a) s += ginv(ix(l), ix(a)) * out.riemann_lower(a, k, i, j);
          out.riemann(l, k, i, j) = s;
        }

  out.ricci = ricci_from_riemann(out.riemann);
  out.scalar = (ginv.array() * out.ricci.array()).sum();
  return out;
}

Eigen::VectorXd lie_bracket_at(const VectorField& x, const VectorField& y, Point p) {
  const FieldJet fx = field_jet(x, p);
  const FieldJet fy = field_jet(y, p);
  return fy.jac * fx.value - fx.jac * fy.value;
}

Eigen::MatrixXd covariant_derivative_at(const ConnectionAt& conn, const FieldJet& tau) {
  const std::size_t n = conn.dim();
  Eigen::MatrixXd d(ix(n), ix(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < n; ++k) {
      double s = tau.jac(ix(k), ix(i));
      for (std::size_t j = 0; j < n; ++j) s += conn.gamma(k, i, j) * tau.value(ix(j));
      d(ix(i), ix(k)) = s;
    }
  }
  return d;
}

Eigen::MatrixXd covariant_derivative_at(const ConnectionAt& conn, const VectorField& tau, Point p) {
  return covariant_derivative_at(conn, field_jet(tau, p));
}

std::pair<Eigen::MatrixXd, Eigen::MatrixXd> lie_derivative_metric_routes(const MetricField& g,
                                                                         const VectorField& tau, Point p) {
  const MetricJet mj = metric_jet(g, p);
  const ConnectionAt lc = christoffel_from_jet(mj);
  const FieldJet tj = field_jet(tau, p);
  const Eigen::MatrixXd& gm = mj.at.matrix;
  const std::size_t n = g.dim();

  // g(nabla_i tau, d_j) + g(d_i, nabla_j tau)
  const Eigen::MatrixXd d = covariant_derivative_at(lc, tj);
  const Eigen::MatrixXd gd = d * gm;  // gd(i, j) = D(i, k) g_kj
  Eigen::MatrixXd via_nabla = gd + gd.transpose();

  // tau^k d_k g_ij + g_kj d_i tau^k + g_ik d_j tau^k
  Eigen::MatrixXd coord(ix(n), ix(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < n; ++k) {
        s += tj.value(ix(k)) * mj.d(k, i, j) + gm(ix(k), ix(j)) * tj.jac(ix(k), ix(i)) +
             gm(ix(i), ix(k)) * tj.jac(ix(k), ix(j));
      }
      coord(ix(i), ix(j)) = s;
    }
  }
  return {via_nabla, coord};
}

Eigen::MatrixXd lie_derivative_metric_at(const MetricField& g, const VectorField& tau, Point p) {
  auto [via_nabla, coord] = lie_derivative_metric_routes(g, tau, p);
  const double scale = std::max(1.0, coord.cwiseAbs().maxCoeff());
  const double diff = (via_nabla - coord).cwiseAbs().maxCoeff();
  if (diff > 1e-10 * scale) {
    throw ConsistencyError("Lie derivative routes disagree by " + std::to_string(diff));
  }
  return 0.5 * (via_nabla + via_nabla.transpose());
}

Eigen::MatrixXd frame_matrix_at(const FrameField& frame, Point p) {
  const std::size_t n = p.size();
  require_dim(frame.vectors.size(), n, "frame");
  Eigen::MatrixXd e(ix(n), ix(n));
  for (std::size_t a = 0; a < n; ++a) e.col(ix(a)) = field_value(frame.vectors[a].components, p);
  return e;
}

Eigen::VectorXd frame_components_at(const FrameField& frame, const Eigen::VectorXd& v, Point p) {
  const Eigen::MatrixXd e = frame_matrix_at(frame, p);
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(e);
  const double det = lu.determinant();
  if (!(std::abs(det) >= 1e-10)) {
    throw FrameDegenerateError("frame is degenerate at the point (|det| = " + std::to_string(std::abs(det)) + ")");
  }
  return lu.solve(v);
}

}  // namespace curvcheck
