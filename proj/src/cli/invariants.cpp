#include "curvcheck/invariants.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

namespace curvcheck {

namespace {

using Index = Eigen::Index;
Index ix(std::size_t i) { return static_cast<Index>(i); }

// Keeps results in first-seen order and folds repeated names into a max.
class Collector {
 public:
  void add(const std::string& module, const std::string& name, double defect, double tol) {
    InvariantResult& r = slot(module, name, tol);
    ++r.evaluations;
    if (!(defect <= r.defect)) r.defect = defect;  // NaN propagates
    r.pass = r.pass && defect <= tol;
  }

  void note(const std::string& module, const std::string& name, double tol, const std::string& text) {
    InvariantResult& r = slot(module, name, tol);
    if (r.note.empty()) r.note = text;
  }

  void fail(const std::string& module, const std::string& name, const std::string& why) {
    InvariantResult& r = slot(module, name, 0.0);
    r.pass = false;
    if (r.note.empty()) r.note = why;
  }

  std::vector<InvariantResult> take() { return std::move(results_); }

 private:
  InvariantResult& slot(const std::string& module, const std::string& name, double tol) {
    for (auto& r : results_)
      if (r.module == module && r.name == name) return r;
    results_.push_back({module, name, 0.0, tol, true, 0, {}});
    return results_.back();
  }

  std::vector<InvariantResult> results_;
};

double max_abs(const Eigen::MatrixXd& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

std::vector<const Expr*> all_expressions(const ManifoldConfig& cfg) {
  std::vector<const Expr*> out;
  const std::size_t n = cfg.dim();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j <= i; ++j) out.push_back(&cfg.metric(i, j));
  for (const auto& [_, v] : cfg.vectors)
    for (const auto& e : v.components) out.push_back(&e);
  for (const auto& [_, v] : cfg.forms)
    for (const auto& e : v.components) out.push_back(&e);
  for (const auto& [_, v] : cfg.frame)
    for (const auto& e : v.components) out.push_back(&e);
  if (cfg.structure)
    for (const auto& e : cfg.structure->components) out.push_back(&e);
  if (cfg.chart.exclusion) out.push_back(&*cfg.chart.exclusion);
  return out;
}

VectorField scaled(const VectorField& v, double c) {
  VectorField out;
  for (const auto& e : v.components) {
    auto node = std::make_shared<Node>();
    node->kind = Node::Kind::Mul;
    node->lhs = Expr::constant(c, e.coord_names()).root_ptr();
    node->rhs = e.root_ptr();
    out.components.emplace_back(node, e.coord_names());
  }
  return out;
}

void expr_invariants(Collector& c, const ManifoldConfig& cfg, std::span<const std::vector<double>> points) {
  for (const Expr* e : all_expressions(cfg)) {
    for (const auto& p : points) {
      const JetFdDefect d = jet_fd_defect(*e, p);
      c.add("expr", "ad-gradient-vs-fd", d.grad, 1e-6);
      c.add("expr", "ad-hessian-vs-fd", d.hess, 1e-6);
      c.add("expr", "hessian-symmetry", d.hess_asym, 0.0);
    }
  }
}

void geometry_invariants(Collector& c, const ManifoldConfig& cfg, std::span<const std::vector<double>> points) {
  const std::size_t n = cfg.dim();
  const auto frame = cfg.frame_field();
  for (const auto& p : points) {
    const MetricAt m = metric_at(cfg.metric, p);
    c.add("geometry", "metric-inverse", max_abs(m.matrix * m.inverse - Eigen::MatrixXd::Identity(ix(n), ix(n))),
          1e-12);

    const ConnectionAt lc = christoffel_at(cfg.metric, p);
    double gsym = 0.0;
    for (std::size_t k = 0; k < n; ++k)
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) gsym = std::max(gsym, std::abs(lc.gamma(k, i, j) - lc.gamma(k, j, i)));
    c.add("geometry", "christoffel-symmetry", gsym, 1e-14);
    c.add("geometry", "dgamma-vs-fd", dgamma_fd_defect(cfg.metric, p), 1e-5);

    const CurvatureAt curv = curvature_at(cfg.metric, p);
    const CurvatureSymmetryDefects s = curvature_symmetry_defects(curv);
    c.add("geometry", "riemann-antisymmetry-ij", s.antisym_last, 1e-9);
    c.add("geometry", "riemann-antisymmetry-lk", s.antisym_first, 1e-9);
    c.add("geometry", "riemann-pair-symmetry", s.pair, 1e-9);
    c.add("geometry", "first-bianchi", s.bianchi, 1e-9);
    c.add("geometry", "ricci-symmetry", s.ricci, 1e-10);
    c.add("geometry", "curvature-direct-vs-metric", max_abs_diff(direct_curvature_at(lc), curv.riemann), 1e-9);

    for (const auto& [name, v] : cfg.vectors) {
      const auto [via_nabla, coord] = lie_derivative_metric_routes(cfg.metric, v, p);
      const double scale = std::max(1.0, max_abs(coord));
      c.add("geometry", "lie-derivative-routes", max_abs(via_nabla - coord) / scale, 1e-10);
    }
    if (frame) {
      for (const auto& [name, v] : cfg.vectors) {
        const Eigen::VectorXd val = field_value(v.components, p);
        const Eigen::VectorXd coeff = frame_components_at(*frame, val, p);
        const Eigen::VectorXd back = frame_matrix_at(*frame, p) * coeff;
        c.add("geometry", "frame-reconstruction", (back - val).cwiseAbs().maxCoeff() / std::max(1.0, max_abs(val)),
              1e-10);
      }
    }
  }
}

void connection_invariants(Collector& c, const ManifoldConfig& cfg, std::span<const std::vector<double>> points) {
  const OneFormField zero = OneFormField::zero(cfg.chart);
  for (const auto& p : points) {
    const ConnectionAt lc = christoffel_at(cfg.metric, p);
    const CurvatureAt curv = curvature_at(cfg.metric, p);
    for (const auto& spec :
         {ConnectionSpec::semi_symmetric_metric(zero), ConnectionSpec::projective_semi_symmetric(zero)}) {
      const ConnectionAt z = connection_at(cfg.metric, spec, p);
      const CurvatureAt zc = modified_curvature_at(cfg.metric, spec, p);
      double d = std::max(max_abs_diff(z.gamma, lc.gamma), max_abs_diff(z.dgamma, lc.dgamma));
      d = std::max({d, max_abs_diff(zc.riemann, curv.riemann), max_abs(zc.ricci - curv.ricci),
                    std::abs(zc.scalar - curv.scalar)});
      c.add("connections", "zero-pi-collapse", d, 0.0);
    }

    for (const auto& [name, pi] : cfg.forms) {
      const MetricAt m = metric_at(cfg.metric, p);
      const Eigen::VectorXd pv = field_value(pi.components, p);
      const Eigen::VectorXd rho = rho_from_pi(cfg.metric, pi, p);
      c.add("connections", "rho-reproduces-pi", (m.matrix * rho - pv).cwiseAbs().maxCoeff() / std::max(1.0, max_abs(pv)),
            1e-12);

      const AuxTensorsAt aux = aux_tensors_at(cfg.metric, pi, p);
      c.add("connections", "theta-antisymmetry", max_abs(aux.theta + aux.theta.transpose()), 1e-10);
      c.add("connections", "theta-trace", std::abs(aux.tr_theta), 1e-10);

      const ConnectionSpec ssm = ConnectionSpec::semi_symmetric_metric(pi);
      const ConnectionSpec pss = ConnectionSpec::projective_semi_symmetric(pi);
      const ConnectionAt cs = connection_at(cfg.metric, ssm, p);
      c.add("connections", "ssm-metric-compatibility", nabla_metric_at(cfg.metric, cs, p).max_abs(), 1e-10);

      for (const auto& [label, spec, conn] :
           {std::tuple{"ssm", ssm, cs}, std::tuple{"pss", pss, connection_at(cfg.metric, pss, p)}}) {
        const CurvatureAt mc = modified_curvature_at(cfg.metric, spec, p);
        c.add("connections", std::string(label) + "-curvature-vs-direct", max_abs_diff(mc.riemann, direct_curvature_at(conn)),
              1e-8);
        const double trace = (m.inverse.array() * mc.ricci.array()).sum();
        c.add("connections", std::string(label) + "-ricci-trace-vs-scalar", std::abs(trace - mc.scalar), 1e-9);
      }
    }
  }
}

void soliton_invariants(Collector& c, const ManifoldConfig& cfg, std::span<const std::vector<double>> points,
                        double p_field) {
  const OneFormField* pi = cfg.soliton.pi ? cfg.find_form(*cfg.soliton.pi)
                                          : (cfg.forms.empty() ? nullptr : &cfg.forms.front().second);
  std::string skipped;
  for (const auto& [name, field] : cfg.vectors) {
    bool usable = true;
    std::vector<TorseFit> fits;
    for (const auto& p : points) {
      try {
        fits.push_back(fit_torse_forming_at(cfg.metric, field, p));
      } catch (const ZeroFieldError&) {
        usable = false;
        break;
      }
      if (fits.back().residual > cfg.soliton.classify_tol) usable = false;
    }
    if (!usable) {
      skipped += (skipped.empty() ? "" : ", ") + name;
      continue;
    }

    std::vector<ConnectionSpec> specs{ConnectionSpec::levi_civita()};
    if (pi) {
      specs.push_back(ConnectionSpec::semi_symmetric_metric(*pi));
      specs.push_back(ConnectionSpec::projective_semi_symmetric(*pi));
    }
    for (const auto& spec : specs) {
      SolitonProblem prob;
      prob.kind = SolitonKind::Conformal;
      prob.connection = spec;
      prob.metric = cfg.metric;
      prob.field = field;
      prob.p_field = p_field;
      const SolitonReport rep = check_soliton(prob, points);
      c.add("solitons", "lambda-trace-coherence", rep.trace_residual_sup, 1e-8);
      for (const auto& p : points) c.add("solitons", "trace-identity", trace_identity_check(spec, cfg.metric, field, p), 1e-8);
    }
    if (cfg.structure) {
      SolitonProblem prob;
      prob.kind = SolitonKind::Star;
      prob.metric = cfg.metric;
      prob.field = field;
      prob.structure = cfg.structure;
      c.add("solitons", "star-lambda-trace-coherence", check_soliton(prob, points).trace_residual_sup, 1e-8);
    }

    const VectorField doubled = scaled(field, 2.0);
    for (std::size_t k = 0; k < points.size(); ++k) {
      const TorseFit f2 = fit_torse_forming_at(cfg.metric, doubled, points[k]);
      const double d = std::max(std::abs(f2.phi - 2.0 * fits[k].phi), (f2.alpha - fits[k].alpha).cwiseAbs().maxCoeff());
      c.add("solitons", "fit-scaling", d, 1e-9);
    }
  }
  if (!skipped.empty()) c.note("solitons", "lambda-trace-coherence", 1e-8, "not torse-forming, skipped: " + skipped);
}

template <class F>
void guarded(Collector& c, const std::string& module, F&& f) {
  try {
    f();
  } catch (const std::exception& e) {
    c.fail(module, "evaluation", e.what());
  }
}

}  // namespace

CurvatureSymmetryDefects curvature_symmetry_defects(const CurvatureAt& c) {
  const std::size_t n = c.riemann.dim();
  const Tensor4& r = c.riemann_lower;
  CurvatureSymmetryDefects d;
  for (std::size_t l = 0; l < n; ++l)
    for (std::size_t k = 0; k < n; ++k)
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
          d.antisym_last = std::max(d.antisym_last, std::abs(r(l, k, i, j) + r(l, k, j, i)));
          d.antisym_first = std::max(d.antisym_first, std::abs(r(l, k, i, j) + r(k, l, i, j)));
          d.pair = std::max(d.pair, std::abs(r(l, k, i, j) - r(i, j, l, k)));
          d.bianchi = std::max(
              d.bianchi, std::abs(c.riemann(l, k, i, j) + c.riemann(l, i, j, k) + c.riemann(l, j, k, i)));
        }
  d.ricci = (c.ricci - c.ricci.transpose()).cwiseAbs().maxCoeff();
  return d;
}

JetFdDefect jet_fd_defect(const Expr& e, std::span<const double> p, double h) {
  const std::size_t n = p.size();
  const Jet2 jet = eval_jet2(e, p);
  JetFdDefect d;
  d.hess_asym = (jet.hess - jet.hess.transpose()).cwiseAbs().maxCoeff();
  std::vector<double> q(p.begin(), p.end());
  for (std::size_t i = 0; i < n; ++i) {
    q[i] = p[i] + h;
    const Jet2 plus = eval_jet2(e, q);
    q[i] = p[i] - h;
    const Jet2 minus = eval_jet2(e, q);
    q[i] = p[i];
    const double fd = (plus.value - minus.value) / (2.0 * h);
    d.grad = std::max(d.grad, std::abs(jet.grad(ix(i)) - fd) / std::max(std::abs(fd), 1e-2));
    for (std::size_t j = 0; j < n; ++j) {
      const double fdh = (plus.grad(ix(j)) - minus.grad(ix(j))) / (2.0 * h);
      d.hess = std::max(d.hess, std::abs(jet.hess(ix(j), ix(i)) - fdh) / std::max(std::abs(fdh), 1e-2));
    }
  }
  return d;
}

double dgamma_fd_defect(const MetricField& g, std::span<const double> p, double h) {
  const std::size_t n = p.size();
  const ConnectionAt c = christoffel_at(g, p);
  std::vector<double> q(p.begin(), p.end());
  double worst = 0.0;
  for (std::size_t m = 0; m < n; ++m) {
    q[m] = p[m] + h;
    const ConnectionAt plus = christoffel_at(g, q);
    q[m] = p[m] - h;
    const ConnectionAt minus = christoffel_at(g, q);
    q[m] = p[m];
    for (std::size_t k = 0; k < n; ++k)
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
          const double fd = (plus.gamma(k, i, j) - minus.gamma(k, i, j)) / (2.0 * h);
          worst = std::max(worst, std::abs(c.dgamma(m, k, i, j) - fd) / std::max(std::abs(fd), 1.0));
        }
  }
  return worst;
}

std::vector<InvariantResult> run_geometry_invariants(const ManifoldConfig& cfg,
                                                     std::span<const std::vector<double>> points) {
  Collector c;
  guarded(c, "geometry", [&] { geometry_invariants(c, cfg, points); });
  return c.take();
}

std::vector<InvariantResult> run_invariants(const ManifoldConfig& cfg, std::span<const std::vector<double>> points,
                                            double p_field) {
  Collector c;
  guarded(c, "expr", [&] { expr_invariants(c, cfg, points); });
  guarded(c, "geometry", [&] { geometry_invariants(c, cfg, points); });
  guarded(c, "connections", [&] { connection_invariants(c, cfg, points); });
  guarded(c, "solitons", [&] { soliton_invariants(c, cfg, points, p_field); });
  return c.take();
}

}  // namespace curvcheck
