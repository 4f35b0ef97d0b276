#include <doctest.h>

#include "curvchen/bar.hpp"
#include "curvchen/cdga.hpp"

using namespace curvchen;

namespace {

std::shared_ptr<FormCarrier> scalar_carrier() {
  return std::make_shared<FormCarrier>(make_matrix_form_cdga(2, 1, QForm(2, 1)));
}

}  // namespace

TEST_CASE("koszul parity of a reordering") {
  // swapping two odd items flips the sign; an even item commutes freely
  CHECK(koszul_parity({1, 0}, {1, 1}) == 1);
  CHECK(koszul_parity({1, 0}, {2, 1}) == 0);
  CHECK(koszul_parity({0, 1}, {1, 1}) == 0);
  CHECK(koszul_parity({2, 1, 0}, {1, 1, 1}) == 1);  // three transpositions
}

TEST_CASE("bar complex: D^2 = 0 and Leibniz for the shuffle") {
  auto C = scalar_carrier();
  std::mt19937_64 rng(4);
  auto rnd = [&](int n) {
    std::vector<LinComb> s;
    for (int i = 0; i < n + 2; ++i) s.push_back(C->lin(random_form(rng, 2, 1, static_cast<int>(rng() % 2), 2, 2)));
    return bar_expand(s, Q(1));
  };
  for (int t = 0; t < 20; ++t) {
    BarElement x = rnd(t % 3), y = rnd((t / 3) % 2);
    CHECK(bar_differential(*C, bar_differential(*C, x)).is_zero());
    if (x.is_zero()) continue;
    int g = bar_degree(*C, x.terms().begin()->first);
    bool homogeneous = true;
    for (auto& [m, c] : x.terms()) homogeneous &= bar_degree(*C, m) == g;
    if (!homogeneous) continue;
    CHECK(bar_differential(*C, bar_shuffle(*C, x, y)) ==
          bar_shuffle(*C, bar_differential(*C, x), y) +
              bar_shuffle(*C, x, bar_differential(*C, y)).scaled(Q(g % 2 ? -1 : 1)));
  }
}

TEST_CASE("Col is a chain map and an algebra map") {
  auto C = scalar_carrier();
  std::mt19937_64 rng(9);
  std::vector<int> keys;
  for (int i = 0; i < 8; ++i)
    for (auto& [k, v] : C->lin(random_form(rng, 2, 1, i % 3, 2, 1)))
      if (k != C->unit_key()) keys.push_back(k);
  for (int t = 0; t < 30; ++t) {
    auto x = normalize(*C, random_grid(*C, rng, 2 + 2 * (t % 2), t % 3, keys, 0.6));
    auto y = normalize(*C, random_grid(*C, rng, 2, t % 2, keys, 0.6));
    CHECK(col_collapse(*C, D_z(*C, x)) == bar_differential(*C, col_collapse(*C, x)));
    CHECK(col_collapse(*C, shuffle(*C, x, y)) == bar_shuffle(*C, col_collapse(*C, x), col_collapse(*C, y)));
  }
}

TEST_CASE("Col of a single-column word is the one-letter bar word") {
  auto C = scalar_carrier();
  const QForm one = QForm::unit(2, 1), dx = QForm::dx(2, 1, 0);
  auto x = make_zigzag(*C, 2, 1, std::vector<QForm>{one, dx, one, one, one});
  BarElement want = bar_expand({C->lin(one), C->lin(dx), C->lin(one)}, Q(1));
  CHECK(col_collapse(*C, x) == want);
}

TEST_CASE("bar constructions reject matrix-valued carriers") {
  FormCarrier C(make_example_R2_cdga());
  CHECK_THROWS_AS(col_collapse(C, unit_z(C)), NotCommutative);
}
