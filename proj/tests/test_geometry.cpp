#include <doctest.h>

#include <cmath>
#include <random>

#include "curvcheck/connections.hpp"
#include "curvcheck/geometry.hpp"
#include "curvcheck/invariants.hpp"
#include "support/oracles.hpp"

using namespace curvcheck;

namespace {

using V = std::vector<double>;

Chart xyz_chart(std::optional<std::string> exclusion = std::nullopt) { return Chart::make({"x", "y", "z"}, exclusion); }

MetricField sec5_metric() {
  return MetricField::diagonal(xyz_chart("z"), {"z^-4", "z^-4", "1"});
}

MetricField hyperbolic() {
  return MetricField::diagonal(Chart::make({"x", "y"}, "y"), {"1/y^2", "1/y^2"});
}

FrameField sec5_frame() {
  const Chart c = xyz_chart("z");
  return {{VectorField::from_strings(c, {"z^2", "0", "0"}), VectorField::from_strings(c, {"0", "z^2", "0"}),
           VectorField::from_strings(c, {"0", "0", "1"})}};
}

}  // namespace

TEST_CASE("chart needs at least two coordinates") {
  CHECK_THROWS_AS(Chart::make({"x"}), DimensionError);
  CHECK_THROWS_AS(Chart::make({"x", "x"}), std::invalid_argument);
}

TEST_CASE("metric_at") {
  SUBCASE("euclidean") {
    const MetricAt m = metric_at(MetricField::diagonal(xyz_chart(), {"1", "1", "1"}), V{0.3, -1, 2});
    CHECK(m.matrix == Eigen::Matrix3d::Identity());
    CHECK(m.inverse == Eigen::Matrix3d::Identity());
    CHECK(m.det == 1.0);
  }
  SUBCASE("z^-4 metric at z = 2") {
    const MetricAt m = metric_at(sec5_metric(), V{0.1, 0.2, 2});
    CHECK(m.matrix.diagonal()(0) == 1.0 / 16);
    CHECK(m.matrix.diagonal()(2) == 1.0);
    CHECK(m.inverse(0, 0) == doctest::Approx(16.0).epsilon(1e-15));
    CHECK(m.inverse(1, 1) == doctest::Approx(16.0).epsilon(1e-15));
    CHECK((m.matrix * m.inverse - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff() <= 1e-12);
  }
  SUBCASE("degenerate metric") {
    const MetricField g = MetricField::diagonal(Chart::make({"x", "y"}), {"x", "1"});
    try {
      metric_at(g, V{0, 1});
      FAIL("expected a singular metric error");
    } catch (const SingularMetricError& e) {
      CHECK(!(e.condition() < 1e12));
    }
  }
  SUBCASE("exclusion locus") { CHECK_THROWS_AS(metric_at(sec5_metric(), V{0, 0, 0}), OutOfChartError); }
  SUBCASE("asymmetric table is rejected") {
    CHECK_THROWS_AS(MetricField::from_strings(Chart::make({"x", "y"}), {{"1", "x"}, {"y", "1"}}),
                    std::invalid_argument);
  }
}

TEST_CASE("christoffel symbols") {
  SUBCASE("euclidean") {
    const ConnectionAt c = christoffel_at(MetricField::diagonal(xyz_chart(), {"1", "1", "1"}), V{1, 2, 3});
    CHECK(c.gamma.max_abs() == 0.0);
    CHECK(c.dgamma.max_abs() == 0.0);
  }
  SUBCASE("z^-4 metric, hand-computed table") {
    std::mt19937_64 rng(3);
    for (int k = 0; k < 5; ++k) {
      const V p{oracle::random_point(rng, 1)[0], oracle::random_point(rng, 1)[0], 0.5 + k * 0.6};
      const double z = p[2];
      Tensor3 expected(3);
      // Gamma^z_xx = Gamma^z_yy = 2 z^-5, Gamma^x_xz = Gamma^y_yz = -2/z (and their mirrors)
      expected(2, 0, 0) = expected(2, 1, 1) = 2 / std::pow(z, 5);
      expected(0, 0, 2) = expected(0, 2, 0) = -2 / z;
      expected(1, 1, 2) = expected(1, 2, 1) = -2 / z;
      const ConnectionAt c = christoffel_at(sec5_metric(), p);
      CHECK(max_abs_diff(c.gamma, expected) <= 1e-12 * std::max(1.0, expected.max_abs()));
    }
  }
  SUBCASE("hyperbolic plane") {
    const double y = 1.7;
    const ConnectionAt c = christoffel_at(hyperbolic(), V{0.3, y});
    Tensor3 expected(2);
    expected(0, 0, 1) = expected(0, 1, 0) = -1 / y;
    expected(1, 0, 0) = 1 / y;
    expected(1, 1, 1) = -1 / y;
    CHECK(max_abs_diff(c.gamma, expected) <= 1e-15);
  }
  SUBCASE("closed-form partials match finite differences") {
    std::mt19937_64 rng(5);
    for (int k = 0; k < 5; ++k) {
      const MetricField g = oracle::random_polynomial_metric(xyz_chart(), rng);
      CHECK(dgamma_fd_defect(g, oracle::random_point(rng, 3)) <= 1e-5);
    }
    CHECK(dgamma_fd_defect(sec5_metric(), V{0.2, 0.1, 0.7}) <= 1e-5);
  }
}

TEST_CASE("curvature on the z^-4 metric reproduces the frame tables") {
  const FrameField frame = sec5_frame();
  for (double z : {0.5, 1.0, 2.0, -1.3, 3.0}) {
    CAPTURE(z);
    const V p{0.4, -0.2, z};
    const CurvatureAt c = curvature_at(sec5_metric(), p);
    CHECK(c.scalar == doctest::Approx(-32 / (z * z)).epsilon(1e-12));

    const Eigen::MatrixXd e = frame_matrix_at(frame, p);
    const Eigen::MatrixXd s = e.transpose() * c.ricci * e;
    CHECK(s(0, 0) == doctest::Approx(-10 / (z * z)).epsilon(1e-12));
    CHECK(s(1, 1) == doctest::Approx(-10 / (z * z)).epsilon(1e-12));
    CHECK(s(2, 2) == doctest::Approx(-12 / (z * z)).epsilon(1e-12));
    CHECK(std::abs(s(0, 1)) + std::abs(s(0, 2)) + std::abs(s(1, 2)) <= 1e-12);

    // R(e1,e2)e2 = -(4/z^2) e1 and R(e1,e3)e3 = -(6/z^2) e1 via the direct coefficient route
    const Tensor4 r = direct_curvature_at(christoffel_at(sec5_metric(), p));
    auto apply = [&](int a, int b, int cc) {
      Eigen::VectorXd v = Eigen::VectorXd::Zero(3);
      for (int l = 0; l < 3; ++l)
        for (int k = 0; k < 3; ++k)
          for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) v(l) += r(l, k, i, j) * e(k, cc) * e(i, a) * e(j, b);
      return frame_components_at(frame, v, p);
    };
    const Eigen::VectorXd r122 = apply(0, 1, 1);
    CHECK(r122(0) == doctest::Approx(-4 / (z * z)).epsilon(1e-12));
    CHECK(std::abs(r122(1)) + std::abs(r122(2)) <= 1e-12);
    const Eigen::VectorXd r133 = apply(0, 2, 2);
    CHECK(r133(0) == doctest::Approx(-6 / (z * z)).epsilon(1e-12));
    CHECK(apply(0, 1, 2).cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("constant curvature and flat checks") {
  SUBCASE("euclidean") {
    const CurvatureAt c = curvature_at(MetricField::diagonal(xyz_chart(), {"1", "1", "1"}), V{1, 2, 3});
    CHECK(c.riemann.max_abs() == 0.0);
    CHECK(c.scalar == 0.0);
  }
  SUBCASE("hyperbolic plane has r = -2") {
    std::mt19937_64 rng(1);
    for (int k = 0; k < 10; ++k) {
      const V p{oracle::random_point(rng, 1)[0], 0.5 + 0.15 * k};
      CHECK(curvature_at(hyperbolic(), p).scalar == doctest::Approx(-2.0).epsilon(1e-12));
    }
  }
  SUBCASE("linear change of coordinates of euclidean space is flat") {
    // g = A^T A for a constant invertible A
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(-1, 1);
    Eigen::Matrix3d a;
    for (int i = 0; i < 9; ++i) a(i / 3, i % 3) = u(rng) + (i % 4 == 0 ? 2.0 : 0.0);
    const Eigen::Matrix3d g = a.transpose() * a;
    std::vector<std::vector<std::string>> rows(3, std::vector<std::string>(3));
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) rows[i][j] = std::to_string(g(std::min(i, j), std::max(i, j)));
    const CurvatureAt c = curvature_at(MetricField::from_strings(xyz_chart(), rows), V{0.1, 0.2, 0.3});
    CHECK(c.riemann.max_abs() <= 1e-9);
  }
}

TEST_CASE("curvature symmetries and route agreement on random metrics") {
  std::mt19937_64 rng(21);
  for (int m = 0; m < 5; ++m) {
    const MetricField g = oracle::random_polynomial_metric(xyz_chart(), rng);
    for (int k = 0; k < 4; ++k) {
      const V p = oracle::random_point(rng, 3);
      const CurvatureAt c = curvature_at(g, p);
      const CurvatureSymmetryDefects d = curvature_symmetry_defects(c);
      CHECK(d.antisym_last <= 1e-9);
      CHECK(d.antisym_first <= 1e-9);
      CHECK(d.pair <= 1e-9);
      CHECK(d.bianchi <= 1e-9);
      CHECK(d.ricci <= 1e-10);
      CHECK(max_abs_diff(direct_curvature_at(christoffel_at(g, p)), c.riemann) <= 1e-9);
      CHECK(c.scalar == doctest::Approx((metric_at(g, p).inverse.array() * c.ricci.array()).sum()));
    }
  }
}

TEST_CASE("lie brackets") {
  const Chart c = xyz_chart("z");
  SUBCASE("coordinate fields commute") {
    CHECK(lie_bracket_at(VectorField::from_strings(c, {"1", "0", "0"}), VectorField::from_strings(c, {"0", "1", "0"}),
                         V{1, 2, 3})
              .cwiseAbs()
              .maxCoeff() == 0.0);
  }
  SUBCASE("[e1, e3] = -(2/z) e1") {
    const FrameField f = sec5_frame();
    const V p{0.2, 0.4, 1.7};
    const Eigen::VectorXd b = lie_bracket_at(f.vectors[0], f.vectors[2], p);
    CHECK(b(0) == doctest::Approx(-2 * 1.7));
    CHECK(frame_components_at(f, b, p)(0) == doctest::Approx(-2 / 1.7));
    CHECK((b + lie_bracket_at(f.vectors[2], f.vectors[0], p)).cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("[x dy, y dx] = x dx - y dy") {
    // [X,Y]^i = X^j d_j Y^i - Y^j d_j X^i with X = (0, x), Y = (y, 0):
    // i = x: X^y d_y(y) = x;  i = y: -Y^x d_x(x) = -y
    const Chart c2 = Chart::make({"x", "y"});
    const Eigen::VectorXd b =
        lie_bracket_at(VectorField::from_strings(c2, {"0", "x"}), VectorField::from_strings(c2, {"y", "0"}), V{1, 2});
    CHECK(b(0) == 1.0);
    CHECK(b(1) == -2.0);
  }
}

TEST_CASE("covariant derivative") {
  const Chart c = xyz_chart();
  const MetricField flat = MetricField::diagonal(c, {"1", "1", "1"});
  const V p{1, 2, 3};
  CHECK(covariant_derivative_at(christoffel_at(flat, p), VectorField::from_strings(c, {"x", "y", "z"}), p) ==
        Eigen::Matrix3d::Identity());
  CHECK(covariant_derivative_at(christoffel_at(flat, p), VectorField::from_strings(c, {"1", "-2", "5"}), p)
            .cwiseAbs()
            .maxCoeff() == 0.0);

  // nabla_{e_i} e3 = -(2/z) e_i for i = 1, 2 and 0 for i = 3
  const FrameField f = sec5_frame();
  const V q{0.5, 0.5, 1.25};
  const Eigen::MatrixXd d = covariant_derivative_at(christoffel_at(sec5_metric(), q), f.vectors[2], q);
  const Eigen::MatrixXd e = frame_matrix_at(f, q);
  for (int i = 0; i < 3; ++i) {
    const Eigen::VectorXd v = frame_components_at(f, d.transpose() * e.col(i), q);
    Eigen::Vector3d expected = Eigen::Vector3d::Zero();
    if (i < 2) expected(i) = -2 / 1.25;
    CHECK((v - expected).cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("lie derivative of the metric") {
  const Chart c = xyz_chart();
  const MetricField flat = MetricField::diagonal(c, {"1", "1", "1"});
  const V p{0.3, -0.7, 1.1};
  CHECK(lie_derivative_metric_at(flat, VectorField::from_strings(c, {"-y", "x", "0"}), p).cwiseAbs().maxCoeff() <=
        1e-15);
  CHECK(lie_derivative_metric_at(flat, VectorField::from_strings(c, {"x", "y", "z"}), p) ==
        2.0 * Eigen::Matrix3d::Identity());

  SUBCASE("hyperbolic isometries are killing") {
    const MetricField h = hyperbolic();
    const Chart c2 = h.chart();
    for (const auto& comps : std::vector<std::vector<std::string>>{{"1", "0"}, {"x", "y"}, {"x^2 - y^2", "2*x*y"}}) {
      CHECK(lie_derivative_metric_at(h, VectorField::from_strings(c2, comps), V{0.4, 1.3}).cwiseAbs().maxCoeff() <=
            1e-12);
    }
  }

  SUBCASE("frame-constant fields on the z^-4 metric") {
    // For X = a1 e1 + b1 e2 + c1 e3 etc. the connection table gives
    // (L_Y g)(X, W) = (2/z)[c3 (a1 a2 + b1 b2) + c1 (a2 a3 + b2 b3) - 2 c2 (a1 a3 + b1 b3)].
    const Chart cz = xyz_chart("z");
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(0.2, 2.0);
    for (int k = 0; k < 5; ++k) {
      // round through the literal text so the oracle sees the parsed values
      auto draw = [&] { return std::stod(std::to_string(u(rng))); };
      double a[3], b[3], cc[3];
      for (int i = 0; i < 3; ++i) a[i] = draw(), b[i] = draw(), cc[i] = draw();
      auto field = [&](int i) {
        return VectorField::from_strings(cz, {std::to_string(a[i]) + "*z^2", std::to_string(b[i]) + "*z^2",
                                              std::to_string(cc[i])});
      };
      const V p{u(rng), u(rng), u(rng)};
      const double z = p[2];
      const Eigen::MatrixXd l = lie_derivative_metric_at(sec5_metric(), field(1), p);
      const Eigen::VectorXd x = field_value(field(0).components, p);
      const Eigen::VectorXd w = field_value(field(2).components, p);
      const double expected = 2 / z *
                              (cc[2] * (a[0] * a[1] + b[0] * b[1]) + cc[0] * (a[1] * a[2] + b[1] * b[2]) -
                               2 * cc[1] * (a[0] * a[2] + b[0] * b[2]));
      CHECK(x.dot(l * w) == doctest::Approx(expected).epsilon(1e-12));
    }
  }

  SUBCASE("two routes agree on random data") {
    std::mt19937_64 rng(12);
    oracle::ExprGen gen({"x", "y", "z"}, 12);
    for (int k = 0; k < 10; ++k) {
      const MetricField g = oracle::random_polynomial_metric(c, rng);
      const VectorField v = VectorField::from_strings(c, {gen.next(2), gen.next(2), gen.next(2)});
      const auto [a, b] = lie_derivative_metric_routes(g, v, oracle::random_point(rng, 3));
      CHECK((a - b).cwiseAbs().maxCoeff() <= 1e-10 * std::max(1.0, b.cwiseAbs().maxCoeff()));
      CHECK(a == a.transpose());
    }
  }
}

TEST_CASE("frame components") {
  const Chart c = xyz_chart("z");
  const FrameField standard{{VectorField::from_strings(c, {"1", "0", "0"}), VectorField::from_strings(c, {"0", "1", "0"}),
                             VectorField::from_strings(c, {"0", "0", "1"})}};
  const Eigen::Vector3d v(1.5, -2, 0.25);
  CHECK(frame_components_at(standard, v, V{0, 0, 1}) == v);

  // nabla_{e1} e1 = (2/z) e3 at z = 2
  const V p{0.1, 0.1, 2};
  const FrameField f = sec5_frame();
  const Eigen::MatrixXd d = covariant_derivative_at(christoffel_at(sec5_metric(), p), f.vectors[0], p);
  const Eigen::VectorXd coeff = frame_components_at(f, d.transpose() * frame_matrix_at(f, p).col(0), p);
  CHECK(std::abs(coeff(0)) + std::abs(coeff(1)) <= 1e-14);
  CHECK(coeff(2) == doctest::Approx(1.0));

  std::mt19937_64 rng(6);
  oracle::ExprGen gen({"x", "y", "z"}, 6);
  for (int k = 0; k < 10; ++k) {
    FrameField r;
    for (int i = 0; i < 3; ++i) {
      std::vector<std::string> comps{gen.next(1), gen.next(1), gen.next(1)};
      comps[static_cast<std::size_t>(i)] = "(4 + " + comps[static_cast<std::size_t>(i)] + ")";
      r.vectors.push_back(VectorField::from_strings(c, comps));
    }
    const V q = oracle::random_point(rng, 3, 0.2, 1.0);
    const Eigen::VectorXd w = Eigen::Vector3d::Random();
    try {
      const Eigen::VectorXd back = frame_matrix_at(r, q) * frame_components_at(r, w, q);
      CHECK((back - w).cwiseAbs().maxCoeff() <= 1e-10);
    } catch (const FrameDegenerateError&) {
    }
  }

  const FrameField degenerate{{VectorField::from_strings(c, {"1", "0", "0"}), VectorField::from_strings(c, {"2", "0", "0"}),
                               VectorField::from_strings(c, {"0", "0", "1"})}};
  CHECK_THROWS_AS(frame_components_at(degenerate, v, V{0, 0, 1}), FrameDegenerateError);
}
