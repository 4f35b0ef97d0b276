#include <doctest.h>

#include "curvchen/cohomology.hpp"

using namespace curvchen;

TEST_CASE("exact linear algebra") {
  QMatrix m(3, 3);
  int vals[3][3] = {{1, 2, 3}, {2, 4, 6}, {1, 0, 1}};
  for (size_t i = 0; i < 3; ++i)
    for (size_t j = 0; j < 3; ++j) m(i, j) = vals[i][j];
  CHECK(rank(m) == 2);
  auto ns = nullspace(m);
  REQUIRE(ns.size() == 1);
  // oracle: (1, 1, -1) spans the kernel
  CHECK(ns[0][0] * Q(-1) == ns[0][2]);
  CHECK(ns[0][1] * Q(-1) == ns[0][2]);
  auto x = solve(m, {Q(6), Q(12), Q(2)});
  REQUIRE(x);
  for (size_t i = 0; i < 3; ++i) {
    Q s = 0;
    for (size_t j = 0; j < 3; ++j) s += m(i, j) * (*x)[j];
    CHECK(s == Q(vals[i][0] + vals[i][1] + vals[i][2]));
  }
  CHECK_FALSE(solve(m, {Q(1), Q(0), Q(0)}));
}

TEST_CASE("tensor algebra: H^0 = 1 and strict drop against the flat algebra") {
  auto A = make_tensor_algebra_cdga(2, TensorElement::word(2, {0}));
  auto B = make_flat_tensor_cdga(2);
  TensorWindow win(2, 0, 4);
  auto ca = curved_cohomology(*A, win);
  auto cb = curved_cohomology(*B, win);
  auto sa = maximal_subdga_cohomology(*A, win);
  CHECK(ca.at(0).dim_H == 1);
  for (int k = 1; k <= 4; ++k) {
    CHECK(cb.at(k).dim_H == (1u << k));
    CHECK(ca.at(k).dim_H < cb.at(k).dim_H);
  }
  for (int k = 0; k <= 4; ++k) {
    CHECK(ca.at(k).dim_H == sa.at(k).dim_H);
    CHECK(ca.at(k).image_in_kernel);
  }
}

TEST_CASE("E10(dx + dy) is curved-closed but not exact on the R^2 example") {
  auto B = make_example_R2_cdga();
  FormWindow win(2, 2, 0, 2, 3);
  QForm w(2, 2);
  auto E10 = MatrixPoly<Q>::constant(2, 2, {Q(0), Q(0), Q(1), Q(0)});
  w.add_term(0b01, E10);
  w.add_term(0b10, E10);
  auto eta = is_curved_closed(*B, w, win);
  REQUIRE(eta);
  // the witness really satisfies ∇ω = [R, η]
  CHECK(B->nabla(w) == graded_commutator(B->curvature(), *eta));
  CHECK_FALSE(is_curved_exact(*B, w, win));
  auto rep = curved_cohomology(*B, win);
  CHECK(rep.at(1).dim_H >= 1);
  auto sub = maximal_subdga_cohomology(*B, win);
  for (int p = 0; p <= 2; ++p) CHECK(rep.at(p).dim_H == sub.at(p).dim_H);
}

TEST_CASE("polynomial Poincare lemma on flat scalar R^2") {
  auto F = make_matrix_form_cdga(2, 1, QForm(2, 1));
  FormWindow win(2, 1, 0, 2, 3);
  auto rep = curved_cohomology(*F, win);
  CHECK(rep.at(0).dim_H == 1);
  CHECK(rep.at(1).dim_H == 0);
  CHECK(rep.at(2).dim_H == 0);
  // closed 1-form x dy + y dx = d(xy) is exact
  QForm w(2, 1);
  MatrixPoly<Q> x(2, 1), y(2, 1);
  x(0, 0) = Polynomial<Q>::variable(2, 0);
  y(0, 0) = Polynomial<Q>::variable(2, 1);
  w.add_term(0b01, y);
  w.add_term(0b10, x);
  CHECK(is_curved_exact(*F, w, win));
}

TEST_CASE("homotopy invariance and its negative control") {
  auto B = make_example_R2_cdga();
  FormWindow win(2, 2, 0, 1, 1);
  std::function<QForm(const QForm&)> id = [](const QForm& a) { return a; };
  std::function<QForm(const QForm&)> zero = [](const QForm& a) { return QForm(a.dim(), a.rank()); };
  CHECK(homotopy_invariance_check(*B, id, id, zero, win));
  CHECK_FALSE(homotopy_invariance_check(*B, id, zero, zero, win));
}
