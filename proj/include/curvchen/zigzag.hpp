#pragma once

#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "curvchen/carrier.hpp"

namespace curvchen {

// One non-unit entry of a reduced zigzag word: the time column it sits in and its basis key.
struct ZSlot {
  int col = 0;
  int key = 0;
  auto operator<=>(const ZSlot&) const = default;
};

// Normal form of a zigzag monomial: the non-unit entries read along the path,
// no two neighbours in the same column. Every such word is realised by a grid.
struct ZWord {
  int n = 0;
  std::vector<ZSlot> e;
  auto operator<=>(const ZWord&) const = default;
};

// Grid form: slot 0 is x_(0,0); then rows i = 1..k, p = 1..n+1 in path order.
struct ZigzagMonomial {
  int k = 2;
  int n = 0;
  std::vector<int> slots;
  Q scalar{1};

  static ZigzagMonomial units(const Carrier& C, int k, int n);
  size_t size() const { return slots.size(); }
  size_t index(int i, int p) const;
  int& at(int i, int p) { return slots[index(i, p)]; }
  int at(int i, int p) const { return slots[index(i, p)]; }
};

// time column of path position pos in a grid with n interior columns
int column_of(int n, size_t pos);
// row (0 for x_(0,0)) and p of path position pos
std::pair<int, int> row_p_of(int n, size_t pos);

class ZigzagElement {
 public:
  ZigzagElement() = default;
  const std::map<ZWord, Q>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  size_t size() const { return terms_.size(); }
  void add(const ZWord& w, const Q& c);
  ZigzagElement& operator+=(const ZigzagElement& o);
  ZigzagElement& operator-=(const ZigzagElement& o);
  friend ZigzagElement operator+(ZigzagElement a, const ZigzagElement& b) { return a += b; }
  friend ZigzagElement operator-(ZigzagElement a, const ZigzagElement& b) { return a -= b; }
  ZigzagElement scaled(const Q& s) const;
  bool operator==(const ZigzagElement& o) const { return terms_ == o.terms_; }

 private:
  std::map<ZWord, Q> terms_;
};

// Test hook: deliberately corrupt a sign so the suites can demonstrate they catch it.
struct SignFault {
  bool flip_cz_even_rows = false;
};

ZigzagElement normalize_word(const Carrier& C, int n, std::vector<ZSlot> w, const Q& scalar);
ZigzagElement normalize(const Carrier& C, const ZigzagMonomial& m);
ZigzagMonomial canonical_grid(const Carrier& C, const ZWord& w, const Q& scalar = Q(1));

int unshifted_degree(const Carrier& C, const ZWord& w);
inline int shifted_degree(const Carrier& C, const ZWord& w) { return unshifted_degree(C, w) - w.n; }
// common shifted degree, or nullopt for zero / inhomogeneous elements
std::optional<int> degree(const Carrier& C, const ZigzagElement& x);

ZigzagElement nabla_z(const Carrier& C, const ZigzagElement& x);
ZigzagElement b_z(const Carrier& C, const ZigzagElement& x);
ZigzagElement c_z(const Carrier& C, const ZigzagElement& x, const SignFault& fault = {});
ZigzagElement D_z(const Carrier& C, const ZigzagElement& x, const SignFault& fault = {});
// D_z evaluated on a raw grid representative (no normalisation beforehand)
ZigzagElement D_z(const Carrier& C, const ZigzagMonomial& m, const SignFault& fault = {});

ZigzagElement shuffle(const Carrier& C, const ZigzagElement& x, const ZigzagElement& y);
// graded commutator for the shuffle product
ZigzagElement commutator_z(const Carrier& C, const ZigzagElement& x, const ZigzagElement& y);

ZigzagElement unit_z(const Carrier& C);
ZigzagElement R_z(const Carrier& C);
ZigzagElement eta(const Carrier& C, const LinComb& a);
LinComb alpha(const Carrier& C, const ZigzagElement& x);
ZigzagElement s_homotopy(const Carrier& C, const ZigzagElement& x);
// the global sign in (id - eta∘alpha) = sign * (D_z s + s D_z); see SIGNS.md
constexpr int kHomotopySign = +1;

// relation moves on grids, used to test that normalisation is a normal form
ZigzagMonomial insert_unit_rows(const Carrier& C, const ZigzagMonomial& m, int j);
// slide the non-unit entry at path position pos to the next (or previous) visit of
// its column, provided only units lie in between; merging multiplies in path order
std::optional<std::vector<ZigzagMonomial>> slide_entry(const Carrier& C, const ZigzagMonomial& m, size_t pos,
                                                      bool forward);

ZigzagMonomial random_grid(const Carrier& C, std::mt19937_64& rng, int k, int n, const std::vector<int>& keys,
                           double unit_prob = 0.4);

std::string to_string(const Carrier& C, const ZWord& w);
std::string to_string(const Carrier& C, const ZigzagElement& x);

// multilinear expansion of a grid of (homogeneous) algebra elements
template <class E>
ZigzagElement make_zigzag(const CarrierFor<E>& C, int k, int n, const std::vector<E>& entries, const Q& scalar = Q(1)) {
  if (k < 2 || k % 2) throw std::invalid_argument("zigzag: k must be even and positive");
  if (entries.size() != static_cast<size_t>(1 + k * (n + 1))) throw std::invalid_argument("zigzag: wrong entry count");
  std::vector<LinComb> parts;
  for (auto& e : entries) parts.push_back(C.lin(e));
  ZigzagElement out;
  ZigzagMonomial m = ZigzagMonomial::units(C, k, n);
  std::vector<size_t> idx(parts.size(), 0);
  for (auto& p : parts)
    if (p.empty()) return out;
  for (;;) {
    Q c = scalar;
    for (size_t s = 0; s < parts.size(); ++s) {
      m.slots[s] = parts[s][idx[s]].first;
      c *= parts[s][idx[s]].second;
    }
    m.scalar = c;
    out += normalize(C, m);
    size_t s = 0;
    while (s < parts.size() && ++idx[s] == parts[s].size()) idx[s++] = 0;
    if (s == parts.size()) break;
  }
  return out;
}

struct UnverifiedMorphism : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// ZZ(f): apply a verified morphism entrywise; the witness must reference the carriers' instances
template <class EA, class EB>
ZigzagElement zz_map(const CarrierFor<EA>& A, const CarrierFor<EB>& B, const DGAMorphismWitness<EA, EB>& f,
                     const ZigzagElement& x) {
  if (f.source != &A.instance() || f.target != &B.instance())
    throw UnverifiedMorphism("zz_map: witness does not connect these carriers");
  if (auto why = morphism_failure(f); !why.empty()) throw UnverifiedMorphism("zz_map: not a curved dga morphism: " + why);
  std::map<int, LinComb> image;
  auto img = [&](int key) -> const LinComb& {
    auto it = image.find(key);
    if (it != image.end()) return it->second;
    return image.emplace(key, B.lin(f.map(A.element(key)))).first->second;
  };
  ZigzagElement out;
  for (auto& [w, c] : x.terms()) {
    // expand the images multilinearly; a zero image kills the word
    std::vector<std::pair<std::vector<ZSlot>, Q>> acc{{{}, c}};
    for (auto& z : w.e) {
      std::vector<std::pair<std::vector<ZSlot>, Q>> next;
      for (auto& [v, cv] : acc)
        for (auto& [key, ck] : img(z.key)) {
          auto u = v;
          u.push_back({z.col, key});
          next.emplace_back(std::move(u), cv * ck);
        }
      acc = std::move(next);
    }
    for (auto& [v, cv] : acc) out += normalize_word(B, w.n, v, cv);
  }
  return out;
}

template <class E>
ZigzagElement eta(const CarrierFor<E>& C, const E& a) {
  return eta(static_cast<const Carrier&>(C), C.lin(a));
}

}  // namespace curvchen
