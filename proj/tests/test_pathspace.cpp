#include <doctest.h>

#include <unsupported/Eigen/MatrixFunctions>

#include "curvchen/fixtures.hpp"
#include "curvchen/pathspace.hpp"

using namespace curvchen;

namespace {

Vec v2(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}

std::shared_ptr<FormCarrier> scalar_carrier() {
  return std::make_shared<FormCarrier>(make_matrix_form_cdga(2, 1, QForm(2, 1)));
}
std::shared_ptr<FormCarrier> curved_carrier() { return std::make_shared<FormCarrier>(make_example_R2_cdga()); }

// γ(t) = (t, t^2)
Path parabola() { return Path::polynomial({v2(0, 0), v2(1, 0), v2(0, 1)}); }

}  // namespace

TEST_CASE("Gauss-Legendre is exact to degree 2n-1") {
  for (int n : {1, 4, 8, 16}) {
    const auto& gl = gauss_legendre(n);
    REQUIRE(static_cast<int>(gl.size()) == n);
    for (int k = 0; k <= 2 * n - 1; ++k) {
      double s = 0;
      for (auto& [x, w] : gl) s += w * std::pow(x, k);
      CHECK(s == doctest::Approx(1.0 / (k + 1)).epsilon(1e-13));
    }
  }
}

TEST_CASE("simplex quadrature: volumes and a monomial") {
  double fact = 1;
  for (int n = 1; n <= 4; ++n) {
    fact *= n;
    double v = simplex_quadrature(n, [](const std::vector<double>&) { return Mat(Mat::Ones(1, 1)); }, 6)(0, 0);
    CHECK(v == doctest::Approx(1 / fact).epsilon(1e-13));
  }
  // ∫_{t1<t2} t1 = ∫ t2^2/2 = 1/6, with breaks that must not change the answer
  auto f = [](const std::vector<double>& t) { return Mat(Mat::Constant(1, 1, t[0])); };
  CHECK(simplex_quadrature(2, f, 4)(0, 0) == doctest::Approx(1.0 / 6).epsilon(1e-14));
  CHECK(simplex_quadrature(2, f, 4, {0.3, 0.71})(0, 0) == doctest::Approx(1.0 / 6).epsilon(1e-14));
}

TEST_CASE("paths and fields") {
  Path g = Path::circle_arc(v2(0, 0), 2.0, 0, M_PI / 2);
  CHECK((g(0.0) - v2(2, 0)).norm() < 1e-14);
  CHECK((g(1.0) - v2(0, 2)).norm() < 1e-14);
  CHECK(g.consistency_error() < 1e-6);

  std::vector<Vec> pts;
  for (int i = 0; i <= 10; ++i) pts.push_back(v2(i / 10.0, std::sin(i / 10.0)));
  Path s = Path::from_samples(pts);
  CHECK(s.breaks().size() == 9);
  CHECK((s(0.5) - v2(0.5, std::sin(0.5))).norm() < 1e-3);

  auto b = TangentField::bump(v2(1, 0), 0.5, 0.2);
  CHECK(b(0.2).norm() == 0.0);
  CHECK(b(0.8).norm() == 0.0);
  CHECK(b(0.5)(0) == doctest::Approx(1.0));
  // C^1 across the edge of the support
  CHECK(b.derivative(0.3 + 1e-9).norm() < 1e-6);
  auto m = TangentField::monomial(v2(2, 1), 0.25, 2);
  CHECK(m(0.75)(0) == doctest::Approx(0.5));
  CHECK(m.derivative(0.75)(1) == doctest::Approx(1.0));
}

TEST_CASE("parallel transport oracles") {
  ConnectionData conn(example_connection_R2());
  Path line = Path::line(v2(0.2, -0.1), v2(0.7, 0.4));
  // constant A along a line: P_{a->b} = exp(-(b-a) A(v))
  Mat want = (-0.6 * conn.A(v2(0, 0), v2(0.7, 0.4))).exp();
  CHECK(relative_error(parallel_transport(conn, line, 0.2, 0.8), want) < 1e-10);
  Transport T(conn, line);
  CHECK(relative_error(T.P(0.2, 0.8), want) < 1e-9);
  CHECK(relative_error(parallel_transport(ConnectionData::flat(2, 2), parabola(), 0, 1), Mat::Identity(2, 2)) < 1e-15);
  CHECK(check_liouville(conn, parabola(), 1.0).passed);
  // backwards solve inverts the forwards one
  Mat P = parallel_transport(conn, parabola(), 0.1, 0.9), Q = parallel_transport(conn, parabola(), 0.9, 0.1);
  CHECK(relative_error(P * Q, Mat::Identity(2, 2)) < 1e-10);
}

TEST_CASE("transport derivative equals the curvature integral") {
  ConnectionData conn(example_connection_R2());
  auto c = check_transport_derivative(conn, parabola(), TangentField::wave(v2(0.3, -1), 2, 0.1), 0, 1);
  CHECK_MESSAGE(c.passed, c.detail);
  c = check_transport_derivative(conn, Path::circle_arc(v2(0, 0), 1, 0, 2), TangentField::bump(v2(1, 1), 0.4, 0.2), 0.1,
                                 0.9);
  CHECK_MESSAGE(c.passed, c.detail);
}

TEST_CASE("classical iterated integrals on the parabola") {
  auto C = scalar_carrier();
  ChenEvaluator ev(C);
  Path g = parabola();
  const QForm one = QForm::unit(2, 1), dx = QForm::dx(2, 1, 0), dy = QForm::dx(2, 1, 1);
  // ∫ dx = Δx
  CHECK(ev.It(make_zigzag(*C, 2, 1, std::vector<QForm>{one, dx, one, one, one}), g, {})(0, 0) == doctest::Approx(1.0));
  // the same entry on the zag
  CHECK(ev.It(make_zigzag(*C, 2, 1, std::vector<QForm>{one, one, one, dx, one}), g, {})(0, 0) == doctest::Approx(1.0));
  // ∫_{t1<t2} dx(t1) dy(t2) = ∫ t2 · 2 t2 = 2/3; the other order gives 1/3
  auto xy = make_zigzag(*C, 2, 2, std::vector<QForm>{one, dx, dy, one, one, one, one});
  auto yx = make_zigzag(*C, 2, 2, std::vector<QForm>{one, dy, dx, one, one, one, one});
  CHECK(ev.It(xy, g, {})(0, 0) == doctest::Approx(2.0 / 3));
  CHECK(ev.It(yx, g, {})(0, 0) == doctest::Approx(1.0 / 3));
  BarElement b = bar_expand({C->lin(one), C->lin(dx), C->lin(dy), C->lin(one)}, Q(1));
  CHECK(ev.scalar_bar_It(b, g, {}) == doctest::Approx(2.0 / 3));
}

TEST_CASE("It(eta(w)) is ev0* w") {
  auto C = curved_carrier();
  ChenEvaluator ev(C);
  std::mt19937_64 rng(2);
  for (int q = 0; q <= 2; ++q) {
    QForm w = random_form(rng, 2, 2, q, 2, 3);
    std::vector<TangentField> X;
    for (int j = 0; j < q; ++j) X.push_back(TangentField::wave(v2(1 - j, 0.5 + j), 1 + j, 0.3));
    auto c = check_eta_triangle(ev, w, Path::circle_arc(v2(0.1, 0), 0.7, 0.4, 2.0), X);
    CHECK_MESSAGE(c.passed, c.detail);
  }
}

TEST_CASE("chain map on a curved fixture with an active c_z term") {
  auto C = curved_carrier();
  ChenEvaluator ev(C);
  const QForm one = QForm::unit(2, 2);
  QForm a = form_from_json(json::parse(R"([{"gens": "dx", "matrix": [["0", "y"], ["1", "0"]]}])"), 2, 2);
  auto x = make_zigzag(*C, 2, 1, std::vector<QForm>{one, a, one, one, one});
  Path g = Path::circle_arc(v2(0, 0), 0.8, 0.2, 1.9);
  std::vector<TangentField> X{TangentField::bump(v2(1, -0.5), 0.5, 0.3)};
  CHECK(ev.It(c_z(*C, x), g, X).norm() > 1e-3);
  auto c = check_chain_map(ev, x, g, X);
  CHECK_MESSAGE(c.passed, c.detail);
  CHECK(c.error < 1e-5);
}

TEST_CASE("algebra map and triangle on scalar forms") {
  auto C = scalar_carrier();
  ChenEvaluator ev(C);
  const QForm one = QForm::unit(2, 1), dx = QForm::dx(2, 1, 0), dy = QForm::dx(2, 1, 1);
  auto x = make_zigzag(*C, 2, 1, std::vector<QForm>{one, dx, one, one, one});
  auto y = make_zigzag(*C, 2, 1, std::vector<QForm>{one, dy, one, one, one});
  // shuffle identity: ∫dx ∫dy = ∫dx dy + ∫dy dx = Δx Δy = 1
  CHECK(ev.It(shuffle(*C, x, y), parabola(), {})(0, 0) == doctest::Approx(1.0));
  auto c = check_algebra_map(ev, x, y, parabola(), {});
  CHECK_MESSAGE(c.passed, c.detail);
  auto t = triangle_check(ev, shuffle(*C, x, y), parabola(), {});
  CHECK_MESSAGE(t.passed, t.detail);
}

TEST_CASE("It is alternating and rejects the wrong arity") {
  auto C = curved_carrier();
  ChenEvaluator ev(C);
  QForm a = QForm::dx(2, 2, 0) * QForm::dx(2, 2, 1);
  auto x = eta(*C, C->lin(a));
  Path g = parabola();
  auto X1 = TangentField::constant(v2(1, 0)), X2 = TangentField::wave(v2(0, 1), 2, 0);
  CHECK(relative_error(ev.It(x, g, {X1, X2}), -ev.It(x, g, {X2, X1})) < 1e-14);
  CHECK_THROWS_AS(ev.It(x, g, {X1}), ArityMismatch);
  auto big = std::make_shared<FormCarrier>(make_matrix_form_cdga(1, 5, QForm(1, 5)));
  CHECK_THROWS(ChenEvaluator(big).It(unit_z(*big), Path::constant(Vec::Zero(1)), {}));
}

TEST_CASE("fibre-integration Stokes with bundle coefficients") {
  std::mt19937_64 rng(12);
  QForm A = example_connection_R2();
  // lift the connection to R x R^2 so that it ignores the fibre coordinate
  QForm A3(3, 2);
  for (auto& [m, c] : A.terms()) {
    MatrixPoly<Q> c3(3, 2);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        for (auto& [e, v] : c(i, j).terms()) c3(i, j).add_term(Exponent{0, e[0], e[1]}, v);
    A3.add_term(m << 1, c3);
  }
  (void)A3;
  for (int deg = 0; deg <= 2; ++deg) {
    auto c = fiber_integration_stokes_check(A, random_form(rng, 3, 2, deg, 2, 3));
    CHECK_MESSAGE(c.passed, c.detail);
  }
  // ∫_F f(t) dt = ∫_0^1 f
  QForm w = QForm::from_term(0b001, MatrixPoly<Q>::identity(3, 2));
  MatrixPoly<Q> t2(3, 2);
  t2(0, 0) = Polynomial<Q>::variable(3, 0) * Polynomial<Q>::variable(3, 0);
  w = QForm::from_term(0b001, t2);
  auto I = fiber_integrate(w);
  CHECK(I.terms().size() == 1);
  CHECK(I.coefficient(0)(0, 0).eval({0.0, 0.0}) == doctest::Approx(1.0 / 3));
}

TEST_CASE("shrink homotopy on ev0* f and a classical degree-1 form") {
  auto C = scalar_carrier();
  ChenEvaluator ev(C);
  QForm f = form_from_json(json::parse(R"([{"gens": "dx", "scalar": "x*y"}, {"gens": "dy", "scalar": "1 + x"}])"), 2, 1);
  std::vector<TangentField> X{TangentField::wave(v2(1, 0.4), 3, 0.2)};
  auto c = shrink_homotopy_check(ev.connection(), ev.ev0_form(f), parabola(), X);
  CHECK_MESSAGE(c.passed, c.detail);
  const QForm one = QForm::unit(2, 1);
  auto x = make_zigzag(*C, 2, 1, std::vector<QForm>{one, QForm::dx(2, 1, 0) * QForm::dx(2, 1, 1), one, one, one});
  c = shrink_homotopy_check(ev.connection(), ev.It_form(x, 1), parabola(), X);
  CHECK_MESSAGE(c.passed, c.detail);
}

TEST_CASE("covariant derivative of ev0* f matches ev0* nabla f") {
  auto C = curved_carrier();
  ChenEvaluator ev(C);
  QForm f = form_from_json(json::parse(R"([{"gens": [], "matrix": [["x", "1"], ["y*y", "0"]]}])"), 2, 2);
  auto X = TangentField::wave(v2(0.5, 1), 1.5, 0.7);
  Mat got = covariant_derivative_fd(ev.connection(), ev.ev0_form(f), parabola(), X, {});
  Mat want = ev.ev0(make_example_R2_cdga()->nabla(f), parabola(), {X});
  CHECK(relative_error(got, want) < 1e-6);
}
