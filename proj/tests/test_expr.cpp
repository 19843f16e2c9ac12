#include <doctest.h>

#include <cmath>
#include <random>
#include <thread>

#include "curvcheck/expr.hpp"
#include "support/oracles.hpp"

using namespace curvcheck;

namespace {

const std::vector<std::string> xyz{"x", "y", "z"};

double at(const std::string& text, std::vector<double> p, const std::vector<std::string>& c = xyz) {
  return eval_value(parse(text, c), p);
}

ParseError parse_error(const std::string& text) {
  try {
    parse(text, xyz);
  } catch (const ParseError& e) {
    return e;
  }
  FAIL("expected a parse error for '" << text << "'");
  return ParseError(ParseError::Kind::Syntax, 0, "");
}

}  // namespace

TEST_CASE("power node and precedence") {
  const Expr e = parse("z^2", xyz);
  REQUIRE(e.root().kind == Node::Kind::Pow);
  CHECK(e.root().lhs->kind == Node::Kind::Var);
  CHECK(e.root().lhs->var == 2);
  CHECK(e.root().rhs->kind == Node::Kind::Number);
  CHECK(e.root().rhs->number == 2.0);

  CHECK(at("-32/z^2", {0, 0, 2}) == -8.0);
  CHECK(at("-2^2", {0, 0, 0}) == -4.0);
  CHECK(at("2^3^2", {0, 0, 0}) == 512.0);
  CHECK(at("2^-1", {0, 0, 0}) == 0.5);
  CHECK(at("1 - 2 - 3", {0, 0, 0}) == -4.0);
  CHECK(at("8 / 4 / 2", {0, 0, 0}) == 1.0);
  CHECK(at("(1 + 2) * 3", {0, 0, 0}) == 9.0);
  CHECK(at("2*x + y*z", {1, 2, 3}) == 8.0);
  CHECK(at("1.5e2 + 2E-1 + .5", {0, 0, 0}) == doctest::Approx(150.7));
  CHECK(at("--x", {3, 0, 0}) == 3.0);
  CHECK(at("sqrt(x) * exp(0) + log(1)", {4, 0, 0}) == 2.0);
}

TEST_CASE("parse errors carry kind and offset") {
  const ParseError unknown = parse_error("2*q");
  CHECK(unknown.kind() == ParseError::Kind::UnknownIdentifier);
  CHECK(unknown.offset() == 2);
  CHECK(std::string(unknown.what()).find("'q'") != std::string::npos);

  CHECK(parse_error("1 +").kind() == ParseError::Kind::Syntax);
  CHECK(parse_error("(x").kind() == ParseError::Kind::Syntax);
  CHECK(parse_error("x y").kind() == ParseError::Kind::Syntax);
  CHECK(parse_error("").kind() == ParseError::Kind::Syntax);
  CHECK(parse_error("x $ 2").offset() == 2);
  CHECK(parse_error("sin x").kind() == ParseError::Kind::Arity);
  CHECK(parse_error("sin(x, y)").kind() == ParseError::Kind::Arity);
  CHECK(parse_error("x(1)").kind() == ParseError::Kind::Arity);
  CHECK(parse_error("foo(x)").kind() == ParseError::Kind::UnknownIdentifier);

  for (const char* text : {"2*q", "1 +", "(x", "x $ 2", "sin(x, y)"}) {
    CHECK(parse_error(text).offset() <= std::string(text).size());
  }
}

TEST_CASE("coordinate lists are validated") {
  CHECK_THROWS_AS(make_coords({}), std::invalid_argument);
  CHECK_THROWS_AS(make_coords({"x", "x"}), std::invalid_argument);
  CHECK_THROWS_AS(make_coords({"1x"}), std::invalid_argument);
  CHECK_THROWS_AS(make_coords({"sin"}), std::invalid_argument);
  CHECK_NOTHROW(make_coords({"x_1", "theta"}));
}

TEST_CASE("bilinear jet") {
  const Jet2 j = eval_jet2(parse("x*y", {"x", "y"}), std::vector<double>{2, 3});
  CHECK(j.value == 6.0);
  CHECK(j.grad(0) == 3.0);
  CHECK(j.grad(1) == 2.0);
  CHECK(j.hess(0, 0) == 0.0);
  CHECK(j.hess(0, 1) == 1.0);
  CHECK(j.hess(1, 0) == 1.0);
  CHECK(j.hess(1, 1) == 0.0);
}

TEST_CASE("integer powers keep negative bases in the domain") {
  const Expr e = parse("z^(-4)", xyz);
  const Jet2 j = eval_jet2(e, std::vector<double>{0, 0, 1});
  CHECK(j.value == 1.0);
  CHECK(j.grad(2) == -4.0);
  CHECK(j.hess(2, 2) == 20.0);

  const Jet2 neg = eval_jet2(e, std::vector<double>{0, 0, -1});
  CHECK(neg.value == 1.0);
  CHECK(neg.grad(2) == 4.0);
  CHECK(neg.hess(2, 2) == 20.0);

  const Jet2 cube = eval_jet2(parse("z^3", xyz), std::vector<double>{0, 0, -2});
  CHECK(cube.value == -8.0);
  CHECK(cube.grad(2) == 12.0);
  CHECK(cube.hess(2, 2) == -12.0);

  CHECK_THROWS_AS(eval_jet2(parse("z^0.5", xyz), std::vector<double>{0, 0, -1}), DomainError);
  CHECK_THROWS_AS(eval_jet2(parse("z^-1", xyz), std::vector<double>{0, 0, 0}), DomainError);
}

TEST_CASE("domain errors name the subtree") {
  try {
    eval_jet2(parse("1 + log(x - 1)", xyz), std::vector<double>{1, 0, 0});
    FAIL("expected a domain error");
  } catch (const DomainError& e) {
    CHECK(e.subtree().find("log") != std::string::npos);
  }
  CHECK_THROWS_AS(eval_jet2(parse("sqrt(-x)", xyz), std::vector<double>{1, 0, 0}), DomainError);
  CHECK_THROWS_AS(eval_jet2(parse("1/(x - y)", xyz), std::vector<double>{1, 1, 0}), DomainError);
  CHECK_THROWS_AS(eval_value(parse("log(y)", xyz), std::vector<double>{1, 0, 0}), DomainError);
  CHECK_THROWS(eval_jet2(parse("x", xyz), std::vector<double>{1, 2}));
}

TEST_CASE("elementary function jets match closed forms") {
  const std::vector<double> p{0.4, 0, 0};
  const double x = 0.4;
  struct Case {
    const char* text;
    double v, d1, d2;
  };
  const Case cases[] = {
      {"sin(x)", std::sin(x), std::cos(x), -std::sin(x)},
      {"cos(x)", std::cos(x), -std::sin(x), -std::cos(x)},
      {"tan(x)", std::tan(x), 1 / (std::cos(x) * std::cos(x)),
       2 * std::tan(x) / (std::cos(x) * std::cos(x))},
      {"exp(x)", std::exp(x), std::exp(x), std::exp(x)},
      {"log(x)", std::log(x), 1 / x, -1 / (x * x)},
      {"sqrt(x)", std::sqrt(x), 0.5 / std::sqrt(x), -0.25 / (x * std::sqrt(x))},
      {"sinh(x)", std::sinh(x), std::cosh(x), std::sinh(x)},
      {"cosh(x)", std::cosh(x), std::sinh(x), std::cosh(x)},
      {"tanh(x)", std::tanh(x), 1 - std::tanh(x) * std::tanh(x),
       -2 * std::tanh(x) * (1 - std::tanh(x) * std::tanh(x))},
      {"x^2.5", std::pow(x, 2.5), 2.5 * std::pow(x, 1.5), 3.75 * std::pow(x, 0.5)},
      {"1/x", 1 / x, -1 / (x * x), 2 / (x * x * x)},
  };
  for (const auto& c : cases) {
    CAPTURE(c.text);
    const Jet2 j = eval_jet2(parse(c.text, xyz), p);
    CHECK(j.value == doctest::Approx(c.v).epsilon(1e-14));
    CHECK(j.grad(0) == doctest::Approx(c.d1).epsilon(1e-14));
    CHECK(j.hess(0, 0) == doctest::Approx(c.d2).epsilon(1e-13));
  }
}

TEST_CASE("exp(x) times random polynomials against finite differences") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-2, 2);
  for (int k = 0; k < 10; ++k) {
    std::string poly = std::to_string(u(rng));
    for (const char* term : {"x", "y", "z", "x*y", "y*z^2", "x^3"}) poly += " + (" + std::to_string(u(rng)) + ")*" + term;
    const Expr e = parse("exp(x)*(" + poly + ")", xyz);
    const auto p = oracle::random_point(rng, 3);
    const Jet2 j = eval_jet2(e, p);
    const oracle::FdJet fd = oracle::central_differences(e, p);
    for (std::size_t i = 0; i < 3; ++i) {
      CHECK(std::abs(j.grad(static_cast<long>(i)) - static_cast<double>(fd.grad[i])) <=
            1e-6 * std::abs(static_cast<double>(fd.grad[i])) + 1e-8);
      for (std::size_t l = 0; l < 3; ++l) {
        const double h = static_cast<double>(fd.hess[i][l]);
        CHECK(std::abs(j.hess(static_cast<long>(i), static_cast<long>(l)) - h) <= 1e-6 * std::abs(h) + 1e-8);
      }
    }
  }
}

TEST_CASE("random expressions: AD agrees with finite differences and Hessians are symmetric") {
  oracle::ExprGen gen(xyz, 2024);
  std::mt19937_64 rng(99);
  for (int k = 0; k < 100; ++k) {
    const std::string text = gen.next();
    CAPTURE(text);
    const Expr e = parse(text, xyz);
    const auto p = oracle::random_point(rng, 3);
    const Jet2 j = eval_jet2(e, p);
    CHECK(j.hess == j.hess.transpose());
    const oracle::FdJet fd = oracle::central_differences(e, p);
    for (std::size_t i = 0; i < 3; ++i) {
      const double g = static_cast<double>(fd.grad[i]);
      CHECK(std::abs(j.grad(static_cast<long>(i)) - g) <= 1e-6 * std::abs(g) + 1e-8);
      for (std::size_t l = 0; l < 3; ++l) {
        const double h = static_cast<double>(fd.hess[i][l]);
        CHECK(std::abs(j.hess(static_cast<long>(i), static_cast<long>(l)) - h) <= 1e-6 * std::abs(h) + 1e-8);
      }
    }
  }
}

TEST_CASE("render round-trips") {
  oracle::ExprGen gen(xyz, 11);
  for (int k = 0; k < 200; ++k) {
    const Expr e = parse(gen.next(), xyz);
    const std::string r = render(e);
    CAPTURE(r);
    const Expr back = parse(r, xyz);
    CHECK(back == e);
    CHECK(render(back) == r);
  }
  for (const char* text : {"-2^2", "(-2)^2", "1e-300*x", "0.1+0.2", "-(x)"}) {
    const Expr e = parse(text, xyz);
    CHECK(parse(render(e), xyz) == e);
  }
}

TEST_CASE("expressions can be shared across threads") {
  const Expr e = parse("sin(x)*exp(y) + z^-2", xyz);
  std::vector<double> results(8);
  std::vector<std::thread> threads;
  for (std::size_t t = 0; t < results.size(); ++t) {
    threads.emplace_back([&, t] { results[t] = eval_jet2(e, std::vector<double>{0.1 * double(t), 0.2, 1.5}).value; });
  }
  for (auto& th : threads) th.join();
  for (std::size_t t = 0; t < results.size(); ++t) {
    CHECK(results[t] == eval_value(e, std::vector<double>{0.1 * double(t), 0.2, 1.5}));
  }
}
