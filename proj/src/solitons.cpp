#include "curvcheck/solitons.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace curvcheck {

namespace {

using Index = Eigen::Index;
Index ix(std::size_t i) { return static_cast<Index>(i); }

double metric_trace(const Eigen::MatrixXd& ginv, const Eigen::MatrixXd& t) {
  return (ginv.array() * t.array()).sum();
}

bool has(std::span<const TorseLabel> labels, TorseLabel l) {
  return std::find(labels.begin(), labels.end(), l) != labels.end();
}

double conformal_term(SolitonKind kind, double p, double n) {
  return kind == SolitonKind::Conformal ? p + 2.0 / n : 0.0;
}

}  // namespace

std::string_view to_string(TorseLabel label) {
  switch (label) {
    case TorseLabel::TorseForming:
      return "torse-forming";
    case TorseLabel::Concircular:
      return "concircular";
    case TorseLabel::Concurrent:
      return "concurrent";
    case TorseLabel::Recurrent:
      return "recurrent";
    case TorseLabel::Parallel:
      return "parallel";
    case TorseLabel::Torqued:
      return "torqued";
  }
  return "?";
}

std::string_view to_string(SolitonKind kind) {
  switch (kind) {
    case SolitonKind::Yamabe:
      return "yamabe";
    case SolitonKind::Conformal:
      return "conformal";
    case SolitonKind::Star:
      return "star";
  }
  return "?";
}

SolitonKind parse_soliton_kind(std::string_view text) {
  if (text == "yamabe") return SolitonKind::Yamabe;
  if (text == "conformal") return SolitonKind::Conformal;
  if (text == "star") return SolitonKind::Star;
  throw std::invalid_argument("unknown soliton kind '" + std::string(text) + "' (expected yamabe, conformal or star)");
}

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::Expanding:
      return "expanding";
    case Verdict::Steady:
      return "steady";
    case Verdict::Shrinking:
      return "shrinking";
    case Verdict::NotASoliton:
      return "not-a-soliton";
  }
  return "?";
}

Verdict verdict_for(double lambda, double tol) {
  if (lambda > tol) return Verdict::Expanding;
  if (lambda < -tol) return Verdict::Shrinking;
  return Verdict::Steady;
}

StructureTensorField StructureTensorField::from_strings(const Chart& chart,
                                                        const std::vector<std::vector<std::string>>& rows) {
  const std::size_t n = chart.dim();
  if (rows.size() != n) throw DimensionError("structure tensor needs one row per coordinate");
  StructureTensorField j;
  j.n = n;
  for (const auto& row : rows) {
    if (row.size() != n) throw DimensionError("structure tensor row has the wrong length");
    for (const auto& s : row) j.components.push_back(parse(s, chart.coords));
  }
  return j;
}

Eigen::MatrixXd StructureTensorField::at(Point p) const {
  Eigen::MatrixXd m(ix(n), ix(n));
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c) m(ix(r), ix(c)) = eval_value(components[r * n + c], p);
  return m;
}

TorseFit fit_torse_forming_at(const MetricField& g, const VectorField& tau, Point p) {
  const std::size_t n = g.dim();
  if (n < 2) throw DimensionError("torse-forming fit needs dimension >= 2");
  if (tau.dim() != n) throw DimensionError("vector field dimension does not match the chart");

  const MetricJet mj = metric_jet(g, p);
  const ConnectionAt lc = christoffel_from_jet(mj);
  const FieldJet tj = field_jet(tau, p);
  const Eigen::VectorXd& t = tj.value;
  const double norm = std::sqrt(std::max(0.0, t.dot(mj.at.matrix * t)));
  if (!(norm >= 1e-10)) throw ZeroFieldError("vector field vanishes at the point (|tau| = " + std::to_string(norm) + ")");

  const Eigen::MatrixXd d = covariant_derivative_at(lc, tj);

  // Unknowns (phi, alpha_0..alpha_{n-1}); one equation per (i, k).
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(ix(n * n), ix(n + 1));
  Eigen::VectorXd b(ix(n * n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < n; ++k) {
      const Index row = ix(i * n + k);
      a(row, 0) = i == k ? 1.0 : 0.0;
      a(row, ix(1 + i)) = t(ix(k));
      b(row) = d(ix(i), ix(k));
    }
  }
  const Eigen::VectorXd x = a.colPivHouseholderQr().solve(b);

  TorseFit fit;
  fit.phi = x(0);
  fit.alpha = x.tail(ix(n));
  fit.alpha_tau = fit.alpha.dot(t);
  fit.alpha_norm = std::sqrt(std::max(0.0, fit.alpha.dot(mj.at.inverse * fit.alpha)));
  fit.residual = (a * x - b).norm();
  if (fit.residual <= kDefaultClassifyTol) {
    const TorseFit single[] = {fit};
    fit.labels = classify(single, kDefaultClassifyTol);
  }
  return fit;
}

std::vector<TorseLabel> classify(std::span<const TorseFit> fits, double tol) {
  bool concircular = true, concurrent = true, recurrent = true, parallel = true, torqued = true;
  for (const auto& f : fits) {
    if (f.residual > tol) {
      throw NotTorseFormingError("field is not torse-forming (fit residual " + std::to_string(f.residual) + ")",
                                 f.residual);
    }
    const bool alpha0 = f.alpha_norm <= tol;
    const bool phi0 = std::abs(f.phi) <= tol;
    concircular = concircular && alpha0;
    concurrent = concurrent && alpha0 && std::abs(f.phi - 1.0) <= tol;
    recurrent = recurrent && phi0;
    parallel = parallel && alpha0 && phi0;
    torqued = torqued && std::abs(f.alpha_tau) <= tol;
  }
  std::vector<TorseLabel> labels{TorseLabel::TorseForming};
  if (concircular) labels.push_back(TorseLabel::Concircular);
  if (concurrent) labels.push_back(TorseLabel::Concurrent);
  if (recurrent) labels.push_back(TorseLabel::Recurrent);
  if (parallel) labels.push_back(TorseLabel::Parallel);
  if (torqued) labels.push_back(TorseLabel::Torqued);
  return labels;
}

double lambda_closed_form(const LambdaInputs& in) {
  const double n = static_cast<double>(in.n);
  if (in.kind == SolitonKind::Star) return in.r_star - in.phi - in.alpha_tau / n;

  const double half_conf = 0.5 * conformal_term(in.kind, in.p, n);
  switch (in.connection) {
    case ConnectionKind::LeviCivita:
      return in.r - in.phi - in.alpha_tau / n + half_conf;
    case ConnectionKind::SemiSymmetricMetric:
      return in.r - in.phi - 2.0 * (n - 1.0) * in.a + half_conf - (n - 1.0) / n * in.pi_tau - in.alpha_tau / n;
    case ConnectionKind::ProjectiveSemiSymmetric:
      return in.r - in.phi + in.tr_theta - (n - 1.0) * in.tr_omega + half_conf - (n - 1.0) / n * in.pi_tau -
             in.alpha_tau / n;
  }
  return 0.0;
}

std::string lambda_formula(SolitonKind kind, ConnectionKind connection, std::span<const TorseLabel> labels) {
  const bool parallel = has(labels, TorseLabel::Parallel);
  const bool concurrent = has(labels, TorseLabel::Concurrent);
  const bool recurrent = has(labels, TorseLabel::Recurrent);
  const bool no_alpha_tau = parallel || concurrent || has(labels, TorseLabel::Concircular) ||
                            has(labels, TorseLabel::Torqued);

  std::string f = "lambda = ";
  f += kind == SolitonKind::Star ? "r*" : "r";
  if (!(parallel || recurrent)) f += concurrent ? " - 1" : " - phi";
  if (kind != SolitonKind::Star) {
    if (connection == ConnectionKind::SemiSymmetricMetric) f += " - 2(n-1)a";
    if (connection == ConnectionKind::ProjectiveSemiSymmetric) f += " + Tr(theta) - (n-1)Tr(omega)";
    if (kind == SolitonKind::Conformal) f += " + (p + 2/n)/2";
    if (connection != ConnectionKind::LeviCivita) f += " - ((n-1)/n) pi(tau)";
  }
  if (!no_alpha_tau) f += " - alpha(tau)/n";
  return f;
}

StarRicciAt star_ricci_at(const MetricField& g, const StructureTensorField& j, Point p) {
  const std::size_t n = g.dim();
  if (j.n != n) throw DimensionError("structure tensor dimension does not match the chart");
  const CurvatureAt curv = curvature_at(g, p);
  const MetricAt m = metric_at(g, p);
  const Eigen::MatrixXd jm = j.at(p);

  StarRicciAt out;
  out.s_star = Eigen::MatrixXd::Zero(ix(n), ix(n));
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t c = 0; c < n; ++c) {
      // 1/2 sum J^k_l R^l_{k a b} J^b_c
      double s = 0.0;
      for (std::size_t k = 0; k < n; ++k)
        for (std::size_t l = 0; l < n; ++l)
          for (std::size_t b = 0; b < n; ++b) s += jm(ix(k), ix(l)) * curv.riemann(l, k, a, b) * jm(ix(b), ix(c));
      out.s_star(ix(a), ix(c)) = 0.5 * s;
    }
  }
  out.r_star = metric_trace(m.inverse, out.s_star);
  out.asymmetry = (out.s_star - out.s_star.transpose()).cwiseAbs().maxCoeff();
  return out;
}

SolitonResidualAt soliton_residual_at(SolitonKind kind, const ConnectionSpec& spec, const MetricField& g,
                                      const VectorField& tau, double lambda, double p_field, Point p,
                                      const StructureTensorField* j) {
  const MetricAt m = metric_at(g, p);
  const double n = static_cast<double>(g.dim());
  SolitonResidualAt out;
  if (kind == SolitonKind::Star) {
    if (j == nullptr) throw std::invalid_argument("star soliton needs a structure tensor J");
    if (spec.kind != ConnectionKind::LeviCivita) throw std::invalid_argument("star soliton uses the Levi-Civita connection");
    const double r_star = star_ricci_at(g, *j, p).r_star;
    out.tensor = 0.5 * lie_derivative_metric_at(g, tau, p) - (r_star - lambda) * m.matrix;
  } else {
    const Eigen::MatrixXd lie = spec.kind == ConnectionKind::LeviCivita
                                    ? lie_derivative_metric_at(g, tau, p)
                                    : modified_lie_derivative_metric_at(g, spec, tau, p);
    const double r = modified_curvature_at(g, spec, p).scalar;
    out.tensor = lie + (2.0 * lambda - 2.0 * r - conformal_term(kind, p_field, n)) * m.matrix;
  }
  out.sup = out.tensor.cwiseAbs().maxCoeff();
  out.trace = metric_trace(m.inverse, out.tensor);
  return out;
}

double trace_identity_check(const ConnectionSpec& spec, const MetricField& g, const VectorField& tau, Point p,
                            double tol) {
  const TorseFit fit = fit_torse_forming_at(g, tau, p);
  if (fit.residual > tol) {
    throw NotTorseFormingError("field is not torse-forming (fit residual " + std::to_string(fit.residual) + ")",
                               fit.residual);
  }
  const MetricAt m = metric_at(g, p);
  const double n = static_cast<double>(g.dim());
  const Eigen::MatrixXd lie = spec.kind == ConnectionKind::LeviCivita
                                  ? lie_derivative_metric_at(g, tau, p)
                                  : modified_lie_derivative_metric_at(g, spec, tau, p);
  double c = 0.0;
  if (spec.kind != ConnectionKind::LeviCivita) {
    const Eigen::VectorXd pi = field_value(spec.pi->components, p);
    const Eigen::VectorXd t = field_value(tau.components, p);
    c = 2.0 * (n - 1.0) * pi.dot(t);
  }
  return std::abs(metric_trace(m.inverse, lie) - (2.0 * n * fit.phi + 2.0 * fit.alpha_tau + c));
}

StarEinsteinFit fit_star_einstein_at(const MetricField& g, const StructureTensorField& j, const OneFormField* eta,
                                     Point p) {
  const std::size_t n = g.dim();
  const MetricAt m = metric_at(g, p);
  const StarRicciAt sr = star_ricci_at(g, j, p);
  const Eigen::MatrixXd target = 0.5 * (sr.s_star + sr.s_star.transpose());

  const Index cols = eta ? 2 : 1;
  Eigen::MatrixXd a(ix(n * n), cols);
  Eigen::VectorXd b(ix(n * n));
  Eigen::VectorXd e;
  if (eta) e = field_value(eta->components, p);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < n; ++c) {
      const Index row = ix(r * n + c);
      a(row, 0) = m.matrix(ix(r), ix(c));
      if (eta) a(row, 1) = e(ix(r)) * e(ix(c));
      b(row) = target(ix(r), ix(c));
    }
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& s = svd.singularValues();
  StarEinsteinFit fit;
  fit.ill_conditioned = s(s.size() - 1) <= 1e-8 * s(0);
  svd.setThreshold(1e-8);
  const Eigen::VectorXd x = svd.solve(b);
  fit.lambda = x(0);
  fit.nu = eta ? x(1) : 0.0;
  fit.residual = (a * x - b).norm();
  return fit;
}

SolitonReport check_soliton(const SolitonProblem& problem, std::span<const std::vector<double>> points) {
  const MetricField& g = problem.metric;
  const std::size_t n = g.dim();
  if (problem.kind == SolitonKind::Star && !problem.structure) {
    throw std::invalid_argument("star soliton needs a structure tensor J");
  }
  if (problem.connection.kind != ConnectionKind::LeviCivita && !problem.connection.pi) {
    throw std::invalid_argument("modified connection needs a 1-form pi");
  }

  SolitonReport rep;
  rep.kind = problem.kind;
  rep.connection = problem.connection.kind;
  rep.p_field = problem.p_field;
  const StructureTensorField* j = problem.structure ? &*problem.structure : nullptr;

  for (const auto& pt : points) {
    SolitonPointRow row;
    row.point = pt;
    row.fit = fit_torse_forming_at(g, problem.field, pt);

    LambdaInputs& in = row.inputs;
    in.kind = problem.kind;
    in.connection = problem.connection.kind;
    in.n = n;
    in.r = curvature_at(g, pt).scalar;
    in.phi = row.fit.phi;
    in.alpha_tau = row.fit.alpha_tau;
    in.p = problem.p_field;
    if (problem.connection.kind != ConnectionKind::LeviCivita) {
      const AuxTensorsAt aux = aux_tensors_at(g, *problem.connection.pi, pt);
      in.pi_tau = aux.pi.dot(field_value(problem.field.components, pt));
      in.a = aux.a;
      in.tr_theta = aux.tr_theta;
      in.tr_omega = aux.tr_omega;
    }
    if (problem.kind == SolitonKind::Star) in.r_star = star_ricci_at(g, *j, pt).r_star;

    row.lambda = lambda_closed_form(in);
    const SolitonResidualAt res =
        soliton_residual_at(problem.kind, problem.connection, g, problem.field, row.lambda, problem.p_field, pt, j);
    row.trace_residual = std::abs(res.trace);
    row.full_residual_sup = res.sup;
    rep.rows.push_back(std::move(row));
  }

  if (rep.rows.empty()) return rep;

  double sum = 0.0;
  rep.lambda_min = rep.lambda_max = rep.rows.front().lambda;
  std::vector<TorseFit> fits;
  for (const auto& row : rep.rows) {
    sum += row.lambda;
    rep.lambda_min = std::min(rep.lambda_min, row.lambda);
    rep.lambda_max = std::max(rep.lambda_max, row.lambda);
    rep.trace_residual_sup = std::max(rep.trace_residual_sup, row.trace_residual);
    rep.full_residual_sup = std::max(rep.full_residual_sup, row.full_residual_sup);
    rep.fit_residual_sup = std::max(rep.fit_residual_sup, row.fit.residual);
    fits.push_back(row.fit);
  }
  rep.lambda = sum / static_cast<double>(rep.rows.size());
  rep.lambda_spread = rep.lambda_max - rep.lambda_min;

  rep.torse_forming = rep.fit_residual_sup <= problem.classify_tol;
  if (rep.torse_forming) rep.labels = classify(fits, problem.classify_tol);
  rep.formula = lambda_formula(problem.kind, problem.connection.kind, rep.labels);

  const bool constant = rep.lambda_spread <= 1e-6 * (1.0 + std::abs(rep.lambda));
  if (rep.torse_forming && constant && rep.full_residual_sup <= problem.residual_tol) {
    rep.verdict = verdict_for(rep.lambda);
  }
  return rep;
}

}  // namespace curvcheck
