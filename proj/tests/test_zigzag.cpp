#include <doctest.h>

#include "curvchen/fixtures.hpp"
#include "curvchen/zigzag.hpp"

using namespace curvchen;

namespace {

std::vector<int> sample_keys(const FormCarrier& C, std::mt19937_64& rng) {
  std::vector<int> keys;
  for (int i = 0; i < 9; ++i)
    for (auto& [k, v] : C.lin(random_form(rng, 2, 2, i % 3, 1, 1)))
      if (k != C.unit_key()) keys.push_back(k);
  return keys;
}

}  // namespace

TEST_CASE("grid layout: columns run out on zigs and back on zags") {
  const int n = 2;
  CHECK(column_of(n, 0) == 0);
  // zig p -> column p; zag p -> column n+1-p, ending at the left endpoint
  std::vector<int> want{1, 2, 3, 2, 1, 0, 1, 2, 3};
  for (size_t pos = 1; pos <= want.size(); ++pos) CHECK(column_of(n, pos) == want[pos - 1]);
  ZigzagMonomial m = ZigzagMonomial::units(FormCarrier(make_example_R2_cdga()), 4, n);
  CHECK(m.size() == 1 + 4 * 3);
  CHECK(m.index(2, 1) == 1 + (2 - 1) * 3 + 0);
  CHECK(row_p_of(n, 5) == std::make_pair(2, 2));
}

TEST_CASE("normalisation: unit rows vanish and units merge") {
  auto B = make_example_R2_cdga();
  FormCarrier C(B);
  const QForm one = QForm::unit(2, 2);
  QForm a = QForm::dx(2, 2, 0);
  auto x2 = make_zigzag(C, 2, 1, std::vector<QForm>{one, a, one, one, one});
  auto x4 = make_zigzag(C, 4, 1, std::vector<QForm>{one, a, one, one, one, one, one, one, one});
  CHECK(x2 == x4);
  // entries in the same column with only units between them multiply in path order
  QForm b = QForm::dx(2, 2, 1);
  auto merged = make_zigzag(C, 2, 1, std::vector<QForm>{one, a, one, b, one});
  auto direct = make_zigzag(C, 2, 1, std::vector<QForm>{one, a * b, one, one, one});
  CHECK(merged == direct);
  CHECK(normalize(C, ZigzagMonomial::units(C, 2, 0)) == unit_z(C));
}

TEST_CASE("D_z^2 = [R_z, -] and D_z(1) = 0") {
  auto B = make_example_R2_cdga();
  FormCarrier C(B);
  std::mt19937_64 rng(21);
  auto keys = sample_keys(C, rng);
  CHECK(D_z(C, unit_z(C)).is_zero());
  CHECK(degree(C, R_z(C)) == 2);
  int tested = 0;
  for (int t = 0; t < 40; ++t) {
    auto x = normalize(C, random_grid(C, rng, 2 + 2 * (t % 2), t % 3, keys, 0.5));
    if (x.is_zero()) continue;
    ++tested;
    CHECK(D_z(C, D_z(C, x)) == commutator_z(C, R_z(C), x));
  }
  CHECK(tested > 20);
}

TEST_CASE("the injected sign fault is detected") {
  auto B = make_example_R2_cdga();
  FormCarrier C(B);
  SignFault f{true};
  auto x = unit_z(C);
  CHECK_FALSE(D_z(C, D_z(C, x, f), f) == commutator_z(C, R_z(C), x));
}

TEST_CASE("eta and alpha are chain maps, alpha.eta = id") {
  auto B = make_example_R2_cdga();
  FormCarrier C(B);
  std::mt19937_64 rng(8);
  for (int t = 0; t < 20; ++t) {
    QForm a = random_homogeneous_form(rng, 2, 2, 2, 2);
    auto la = C.lin(a);
    CHECK(alpha(C, eta(C, la)) == la);
    CHECK(eta(C, C.lin(B->nabla(a))) == D_z(C, eta(C, la)));
  }
  auto keys = sample_keys(C, rng);
  for (int t = 0; t < 20; ++t) {
    auto x = normalize(C, random_grid(C, rng, 2, t % 3, keys, 0.5));
    CHECK(alpha(C, D_z(C, x)) == C.lin(B->nabla(C.element(alpha(C, x)))));
  }
}

TEST_CASE("shuffle: unit, associativity, commutator of R_z with 1") {
  auto tv = make_tensor_algebra_cdga(2, TensorElement::word(2, {0}));
  TensorCarrier C(tv);
  const auto one = TensorElement::unit(2);
  auto e0 = TensorElement::word(2, {0}), e1 = TensorElement::word(2, {1});
  auto x = make_zigzag(C, 2, 1, std::vector<TensorElement>{one, e0, one, one, one});
  auto y = make_zigzag(C, 2, 1, std::vector<TensorElement>{one, e1, one, one, one});
  auto z = make_zigzag(C, 2, 0, std::vector<TensorElement>{e1, one, e0});
  CHECK(shuffle(C, x, unit_z(C)) == x);
  CHECK(shuffle(C, shuffle(C, x, y), z) == shuffle(C, x, shuffle(C, y, z)));
  // two one-column words shuffle into the two orderings of a two-column word
  auto xy = shuffle(C, x, y);
  CHECK(xy.size() == 2);
  for (auto& [w, c] : xy.terms()) CHECK(w.n == 2);
  CHECK(commutator_z(C, R_z(C), unit_z(C)).is_zero());
}

TEST_CASE("slide moves keep the normal form") {
  auto B = make_example_R2_cdga();
  FormCarrier C(B);
  std::mt19937_64 rng(3);
  auto keys = sample_keys(C, rng);
  for (int t = 0; t < 50; ++t) {
    auto m = random_grid(C, rng, 4, 1 + t % 2, keys, 0.6);
    auto ref = normalize(C, m);
    CHECK(normalize(C, insert_unit_rows(C, m, 2)) == ref);
    for (size_t p = 0; p < m.size(); ++p) {
      if (m.slots[p] == C.unit_key()) continue;
      for (bool fwd : {true, false})
        if (auto moved = slide_entry(C, m, p, fwd)) {
          ZigzagElement s;
          for (auto& g : *moved) s += normalize(C, g);
          CHECK(s == ref);
        }
    }
  }
}

TEST_CASE("zz_map refuses unverified maps and preserves D_z for a verified one") {
  auto A = make_tensor_algebra_cdga(2, TensorElement::word(2, {0}));
  auto flat = make_flat_tensor_cdga(2);
  TensorCarrier CA(A), CF(flat);
  DGAMorphismWitness<TensorElement, TensorElement> bad{A.get(), flat.get(), [](const TensorElement& a) { return a; },
                                                       {TensorElement::word(2, {1})}};
  CHECK_THROWS_AS(zz_map(CA, CF, bad, unit_z(CA)), UnverifiedMorphism);
  DGAMorphismWitness<TensorElement, TensorElement> wrong_carrier{flat.get(), flat.get(),
                                                                 [](const TensorElement& a) { return a; }, {}};
  CHECK_THROWS_AS(zz_map(CA, CF, wrong_carrier, unit_z(CA)), UnverifiedMorphism);

  DGAMorphismWitness<TensorElement, TensorElement> id{A.get(), A.get(), [](const TensorElement& a) { return a; },
                                                      {TensorElement::word(2, {1})}};
  const auto one = TensorElement::unit(2);
  auto x = make_zigzag(CA, 2, 1, std::vector<TensorElement>{one, TensorElement::word(2, {1, 0}), one, one, one});
  CHECK(zz_map(CA, CA, id, D_z(CA, x)) == D_z(CA, zz_map(CA, CA, id, x)));
}

TEST_CASE("grid fixtures round-trip through json") {
  auto B = make_example_R2_cdga();
  FormCarrier C(B);
  json j = json::parse(R"({"k": 2, "n": 1, "scalar": "-1/2",
                           "entries": {"0,0": [{"gens": "dy", "scalar": "1"}], "1,1": "R"}})");
  auto x = zigzag_from_json(C, j);
  const QForm one = QForm::unit(2, 2);
  auto want = make_zigzag(C, 2, 1, std::vector<QForm>{QForm::dx(2, 2, 1), B->curvature(), one, one, one}, Q(-1, 2));
  CHECK(x == want);
  CHECK_THROWS(zigzag_from_json(C, json::parse(R"({"k": 3, "n": 1, "entries": {}})")));
}
