#include <doctest.h>

#include <random>

#include "curvchen/cdga.hpp"
#include "curvchen/fixtures.hpp"
#include "curvchen/shuffle.hpp"

using namespace curvchen;

namespace {

long binom(int n, int k) {
  long r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

// brute-force inversion count
int inversions(const std::vector<int>& p) {
  int c = 0;
  for (size_t i = 0; i < p.size(); ++i)
    for (size_t j = i + 1; j < p.size(); ++j) c += p[i] > p[j];
  return c;
}

QForm mat_form(Mask m, std::vector<int> vals) {
  std::vector<Q> q(vals.begin(), vals.end());
  return QForm::from_term(m, MatrixPoly<Q>::constant(2, 2, q));
}

}  // namespace

TEST_CASE("polynomials: products, partials, evaluation") {
  auto x = Polynomial<Q>::variable(2, 0), y = Polynomial<Q>::variable(2, 1);
  auto p = (x + y) * (x - y);
  CHECK(p == x * x - y * y);
  CHECK(p.partial(0) == x.scaled(Q(2)));
  CHECK(p.eval({3.0, 2.0}) == doctest::Approx(5.0));
  CHECK(p.total_degree() == 2);
  CHECK((p - p).is_zero());
}

TEST_CASE("wedge signs on generators") {
  CHECK(wedge_sign(0b01, 0b10) == 1);
  CHECK(wedge_sign(0b10, 0b01) == -1);
  CHECK(wedge_sign(0b01, 0b01) == 0);
  // dz ∧ (dx ∧ dy) = dx dy dz with two transpositions
  CHECK(wedge_sign(0b100, 0b011) == 1);
  CHECK(wedge_sign(0b010, 0b101) == -1);
}

TEST_CASE("shuffles: count, parity, reversed parity") {
  for (int n = 0; n <= 4; ++n)
    for (int m = 0; m <= 4; ++m) {
      auto sh = enumerate_shuffles(n, m);
      CHECK(static_cast<long>(sh.size()) == binom(n + m, n));
      for (auto& s : sh) {
        CHECK(s.parity == inversions(s.image) % 2);
        CHECK(inversion_parity(s.image) == s.parity);
        CHECK(s.sh_parity() == (n * m + s.parity) % 2);
      }
    }
}

TEST_CASE("forms: d^2 = 0 and graded Leibniz for d") {
  std::mt19937_64 rng(11);
  for (int t = 0; t < 50; ++t) {
    QForm a = random_homogeneous_form(rng, 3, 2, 3, 3), b = random_homogeneous_form(rng, 3, 2, 3, 3);
    CHECK(exterior_derivative(exterior_derivative(a)).is_zero());
    if (a.is_zero()) continue;
    QForm lhs = exterior_derivative(a * b);
    QForm rhs = exterior_derivative(a) * b + (a * exterior_derivative(b)).scaled(Q(a.degree() % 2 ? -1 : 1));
    CHECK(lhs == rhs);
  }
}

TEST_CASE("graded commutator of constant 1-forms against direct 2x2 products") {
  // [Ax dx, Ay dy] = Ax Ay dx dy - (-1) Ay Ax dy dx = (AxAy - AyAx) dx dy
  std::vector<int> ax{0, 1, -1, 0}, ay{0, 1, 1, 0};
  QForm a = mat_form(0b01, ax), b = mat_form(0b10, ay);
  auto mul = [](const std::vector<int>& p, const std::vector<int>& q) {
    return std::vector<int>{p[0] * q[0] + p[1] * q[2], p[0] * q[1] + p[1] * q[3], p[2] * q[0] + p[3] * q[2],
                            p[2] * q[1] + p[3] * q[3]};
  };
  auto xy = mul(ax, ay), yx = mul(ay, ax);
  std::vector<int> diff(4);
  for (int i = 0; i < 4; ++i) diff[i] = xy[i] - yx[i];
  CHECK(graded_commutator(a, b) == mat_form(0b11, diff));
  CHECK(diff == std::vector<int>{2, 0, 0, -2});
}

TEST_CASE("graded commutator symmetry") {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 30; ++t) {
    QForm a = random_homogeneous_form(rng, 2, 2, 2, 1), b = random_homogeneous_form(rng, 2, 2, 2, 1);
    if (a.is_zero() || b.is_zero()) continue;
    int s = (a.degree() * b.degree()) % 2 ? 1 : -1;  // [a,b] = -(-1)^{|a||b|}[b,a]
    CHECK(graded_commutator(a, b) == graded_commutator(b, a).scaled(Q(s)));
  }
}

TEST_CASE("tensor algebra: concatenation and commutator") {
  auto e0 = TensorElement::word(2, {0}), e1 = TensorElement::word(2, {1});
  CHECK(e0 * e1 == TensorElement::word(2, {0, 1}));
  // both odd: [e0,e1] = e0e1 + e1e0
  CHECK(graded_commutator(e0, e1) == TensorElement::word(2, {0, 1}) + TensorElement::word(2, {1, 0}));
  CHECK(graded_commutator(e0, e0) == TensorElement::word(2, {0, 0}, Q(2)));
  CHECK_THROWS(TensorElement::word(2, {2}));
  CHECK_THROWS_AS((e0 + e0 * e1).degree(), std::domain_error);
}

TEST_CASE("form degree checks") {
  QForm a = QForm::dx(2, 1, 0) + QForm::unit(2, 1);
  CHECK_FALSE(a.is_homogeneous());
  CHECK_THROWS(a.degree());
  CHECK_THROWS_AS(QForm::unit(2, 1) + QForm::unit(2, 2), DimensionMismatch);
}

TEST_CASE("fixture parsing: polynomials and forms") {
  auto p = parse_polynomial("3/2*x^2*y - z + 1", 3);
  Exponent e{2, 1, 0};
  CHECK(p.terms().at(e) == Q(3, 2));
  CHECK(p.terms().at(Exponent{0, 0, 1}) == Q(-1));
  CHECK(p == parse_polynomial("1 - z + 3/2*x^2*y", 3));
  CHECK_THROWS_AS(parse_polynomial("0.5*x", 2), FixtureError);
  CHECK(parse_polynomial("x2*x1", 2) == parse_polynomial("x*y", 2));

  json j = json::parse(R"([{"gens": "dx^dy", "matrix": [["y", "0"], ["1/3", "-x"]]}, {"gens": [0], "scalar": "2"}])");
  QForm f = form_from_json(j, 2, 2);
  CHECK(form_from_json(form_to_json(f), 2, 2) == f);
  CHECK(f.coefficient(0b01) == MatrixPoly<Q>::identity(2, 2).scaled(Q(2)));
  CHECK(form_from_json("1", 2, 2) == QForm::unit(2, 2));
}
