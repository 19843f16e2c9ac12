#include <cmath>
#include <limits>

#include "curvcheck/expr.hpp"

namespace curvcheck {

Jet2 Jet2::constant(double v, std::size_t n) {
  Jet2 j;
  j.value = v;
  j.grad = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
  j.hess = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  return j;
}

Jet2 Jet2::variable(double v, std::size_t index, std::size_t n) {
  Jet2 j = constant(v, n);
  j.grad(static_cast<Eigen::Index>(index)) = 1.0;
  return j;
}

namespace {

using Index = Eigen::Index;

// Hessians below are filled on the upper triangle and mirrored so that
// symmetry is exact regardless of how the compiler orders the arithmetic.
void mirror_upper(Eigen::MatrixXd& h) {
  for (Index i = 0; i < h.rows(); ++i) {
    for (Index j = i + 1; j < h.cols(); ++j) h(j, i) = h(i, j);
  }
}

Jet2 add(const Jet2& a, const Jet2& b) {
  Jet2 r;
  r.value = a.value + b.value;
  r.grad = a.grad + b.grad;
  r.hess = a.hess + b.hess;
  return r;
}

Jet2 sub(const Jet2& a, const Jet2& b) {
  Jet2 r;
  r.value = a.value - b.value;
  r.grad = a.grad - b.grad;
  r.hess = a.hess - b.hess;
  return r;
}

Jet2 neg(const Jet2& a) {
  Jet2 r;
  r.value = -a.value;
  r.grad = -a.grad;
  r.hess = -a.hess;
  return r;
}

Jet2 mul(const Jet2& a, const Jet2& b) {
  const Index n = a.grad.size();
  Jet2 r;
  r.value = a.value * b.value;
  r.grad = b.value * a.grad + a.value * b.grad;
  r.hess.resize(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = i; j < n; ++j) {
      r.hess(i, j) = a.value * b.hess(i, j) + b.value * a.hess(i, j) + a.grad(i) * b.grad(j) +
                     a.grad(j) * b.grad(i);
    }
  }
  mirror_upper(r.hess);
  return r;
}

// f(u) given f(u0), f'(u0), f''(u0).
Jet2 chain(const Jet2& u, double f0, double f1, double f2) {
  const Index n = u.grad.size();
  Jet2 r;
  r.value = f0;
  r.grad = f1 * u.grad;
  r.hess.resize(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = i; j < n; ++j) r.hess(i, j) = f1 * u.hess(i, j) + f2 * u.grad(i) * u.grad(j);
  }
  mirror_upper(r.hess);
  return r;
}

double ipow(double x, long k) {
  // repeated squaring; k >= 0
  double result = 1.0;
  double base = x;
  while (k > 0) {
    if (k & 1) result *= base;
    base *= base;
    k >>= 1;
  }
  return result;
}

bool is_constant_jet(const Jet2& j) { return j.grad.isZero(0.0) && j.hess.isZero(0.0); }

class Evaluator {
 public:
  Evaluator(const std::vector<std::string>& coords, std::span<const double> point)
      : coords_(coords), point_(point), n_(point.size()) {}

  Jet2 eval(const Node& node) {
    switch (node.kind) {
      case Node::Kind::Number:
        return Jet2::constant(node.number, n_);
      case Node::Kind::Var:
        return Jet2::variable(point_[node.var], node.var, n_);
      case Node::Kind::Neg:
        return neg(eval(*node.lhs));
      case Node::Kind::Add:
        return add(eval(*node.lhs), eval(*node.rhs));
      case Node::Kind::Sub:
        return sub(eval(*node.lhs), eval(*node.rhs));
      case Node::Kind::Mul:
        return mul(eval(*node.lhs), eval(*node.rhs));
      case Node::Kind::Div: {
        Jet2 den = eval(*node.rhs);
        if (den.value == 0.0) fail(node, "division by zero");
        const double inv = 1.0 / den.value;
        return mul(eval(*node.lhs), chain(den, inv, -inv * inv, 2.0 * inv * inv * inv));
      }
      case Node::Kind::Pow:
        return power(node);
      case Node::Kind::Call:
        return call(node);
    }
    fail(node, "unknown node");
  }

 private:
  [[noreturn]] void fail(const Node& node, const std::string& msg) const {
    throw DomainError(render(node, coords_), msg);
  }

  Jet2 power(const Node& node) {
    Jet2 base = eval(*node.lhs);
    Jet2 expo = eval(*node.rhs);
    const double k = expo.value;
    // Constant integral exponents go through integer powers so that
    // negative bases stay in the domain.
    if (is_constant_jet(expo) && std::floor(k) == k && std::abs(k) <= 1024.0) {
      const long ik = static_cast<long>(k);
      const double u = base.value;
      if (ik == 0) return Jet2::constant(1.0, n_);
      if (ik < 0 && u == 0.0) fail(node, "division by zero");
      auto p = [&](long e) {
        return e >= 0 ? ipow(u, e) : 1.0 / ipow(u, -e);
      };
      const double kk = static_cast<double>(ik);
      return chain(base, p(ik), kk * p(ik - 1), kk * (kk - 1.0) * (ik == 1 ? 0.0 : p(ik - 2)));
    }
    if (!(base.value > 0.0)) fail(node, "non-integer power of a non-positive base");
    const double lu = std::log(base.value);
    Jet2 log_base = chain(base, lu, 1.0 / base.value, -1.0 / (base.value * base.value));
    Jet2 prod = mul(expo, log_base);
    const double e = std::exp(prod.value);
    return chain(prod, e, e, e);
  }

  Jet2 call(const Node& node) {
    Jet2 u = eval(*node.lhs);
    const double x = u.value;
    switch (node.func) {
      case Func::Sin:
        return chain(u, std::sin(x), std::cos(x), -std::sin(x));
      case Func::Cos:
        return chain(u, std::cos(x), -std::sin(x), -std::cos(x));
      case Func::Tan: {
        const double c = std::cos(x);
        if (c == 0.0) fail(node, "tan at a pole");
        const double t = std::tan(x);
        const double sec2 = 1.0 / (c * c);
        return chain(u, t, sec2, 2.0 * sec2 * t);
      }
      case Func::Exp: {
        const double e = std::exp(x);
        return chain(u, e, e, e);
      }
      case Func::Log:
        if (!(x > 0.0)) fail(node, "log of a non-positive argument");
        return chain(u, std::log(x), 1.0 / x, -1.0 / (x * x));
      case Func::Sqrt: {
        if (!(x > 0.0)) fail(node, "sqrt of a non-positive argument");
        const double s = std::sqrt(x);
        return chain(u, s, 0.5 / s, -0.25 / (s * x));
      }
      case Func::Sinh:
        return chain(u, std::sinh(x), std::cosh(x), std::sinh(x));
      case Func::Cosh:
        return chain(u, std::cosh(x), std::sinh(x), std::cosh(x));
      case Func::Tanh: {
        const double t = std::tanh(x);
        const double s = 1.0 - t * t;
        return chain(u, t, s, -2.0 * t * s);
      }
    }
    fail(node, "unknown function");
  }

  const std::vector<std::string>& coords_;
  std::span<const double> point_;
  std::size_t n_;
};

}  // namespace

Jet2 eval_jet2(const Expr& e, std::span<const double> point) {
  if (point.size() != e.dim()) {
    throw std::invalid_argument("point has " + std::to_string(point.size()) + " coordinates, chart has " +
                                std::to_string(e.dim()));
  }
  Evaluator ev(e.coords(), point);
  Jet2 j = ev.eval(e.root());
  if (!std::isfinite(j.value)) throw DomainError(render(e), "non-finite value");
  return j;
}

double eval_value(const Expr& e, std::span<const double> point) { return eval_jet2(e, point).value; }

}  // namespace curvcheck
