#include <doctest.h>

#include "curvchen/cdga.hpp"
#include "curvchen/fixtures.hpp"

using namespace curvchen;

namespace {

QForm constant_form(Mask m, std::vector<int> vals) {
  std::vector<Q> q(vals.begin(), vals.end());
  return QForm::from_term(m, MatrixPoly<Q>::constant(2, 2, q));
}

}  // namespace

TEST_CASE("curvature of the R^2 example is 2 diag(1,-1) dx dy, exactly") {
  auto B = make_example_R2_cdga();
  CHECK(B->curvature() == constant_form(0b11, {2, 0, 0, -2}));
  // oracle: constant A, so R = A ∧ A
  QForm A = example_connection_R2();
  CHECK(exterior_derivative(A).is_zero());
  CHECK(A * A == B->curvature());
}

TEST_CASE("curved dga axioms on every shipped instance") {
  auto forms = make_example_R2_cdga();
  auto rep = check_curved_dga_axioms<QForm>(
      *forms, [](std::mt19937_64& r) { return random_homogeneous_form(r, 2, 2, 2, 2); }, 100, 3);
  CHECK_MESSAGE(rep.ok(), rep.counterexample);

  // a polynomial connection with nonconstant curvature
  QForm A = form_from_json(json::parse(R"([{"gens": "dx", "matrix": [["0", "y"], ["x", "0"]]},
                                           {"gens": "dy", "matrix": [["x*y", "0"], ["1", "0"]]}])"),
                           2, 2);
  auto poly = make_matrix_form_cdga(2, 2, A);
  CHECK_FALSE(poly->flat());
  rep = check_curved_dga_axioms<QForm>(
      *poly, [](std::mt19937_64& r) { return random_homogeneous_form(r, 2, 2, 2, 2); }, 100, 4);
  CHECK_MESSAGE(rep.ok(), rep.counterexample);

  auto tv = make_tensor_algebra_cdga(2, TensorElement::word(2, {0}) + TensorElement::word(2, {1}, Q(-2)));
  auto trep = check_curved_dga_axioms<TensorElement>(
      *tv, [](std::mt19937_64& r) { return random_homogeneous_tensor(r, 2, 3); }, 100, 5);
  CHECK_MESSAGE(trep.ok(), trep.counterexample);
}

TEST_CASE("tensor instance: R = v(x)v and nabla v = 2 v(x)v") {
  auto v = TensorElement::word(2, {0});
  auto tv = make_tensor_algebra_cdga(2, v);
  CHECK(tv->curvature() == v * v);
  CHECK(tv->nabla(v) == (v * v).scaled(Q(2)));
  CHECK(tv->nabla(tv->unit()).is_zero());
  CHECK_THROWS_AS(make_tensor_algebra_cdga(2, v * v), InvalidConnection);
}

TEST_CASE("connection validation") {
  CHECK_THROWS_AS(make_matrix_form_cdga(2, 2, constant_form(0b11, {1, 0, 0, 1})), InvalidConnection);
  CHECK_THROWS_AS(make_matrix_form_cdga(2, 2, QForm(2, 1)), InvalidConnection);
  auto flat = make_matrix_form_cdga(2, 1, QForm(2, 1));
  CHECK(flat->flat());
  CHECK(flat->commutative());
}

TEST_CASE("morphism witnesses") {
  auto A = make_tensor_algebra_cdga(2, TensorElement::word(2, {0}));
  auto B = make_flat_tensor_cdga(2);
  std::vector<TensorElement> tests{TensorElement::word(2, {1}), TensorElement::word(2, {0, 1})};
  DGAMorphismWitness<TensorElement, TensorElement> id_AA{A.get(), A.get(), [](const TensorElement& a) { return a; }, tests};
  CHECK(check_morphism(id_AA));
  // the perturbation: same algebra, different nabla and R; the identity map is not a morphism
  DGAMorphismWitness<TensorElement, TensorElement> id_AB{A.get(), B.get(), [](const TensorElement& a) { return a; }, tests};
  CHECK_FALSE(check_morphism(id_AB));
  CHECK(morphism_failure(id_AB) == "f(R) != R'");
}

TEST_CASE("instance loading from json") {
  auto li = instance_from_json(json::parse(R"({"type": "example-R2"})"));
  REQUIRE(li.forms);
  CHECK(li.forms->curvature() == make_example_R2_cdga()->curvature());
  auto lt = instance_from_json(json::parse(R"({"type": "tensor", "dv": 2, "v": [{"word": [1], "coeff": "1/2"}]})"));
  REQUIRE(lt.tensor);
  CHECK(lt.tensor->curvature() == TensorElement::word(2, {1, 1}, Q(1, 4)));
  CHECK_THROWS(instance_from_json(json::parse(R"({"type": "nope"})")));
}
