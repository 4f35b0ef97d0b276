#include "curvchen/bar.hpp"

#include "curvchen/shuffle.hpp"

namespace curvchen {

void BarElement::add(const BarMonomial& m, const Q& c) {
  if (sgn(c) == 0) return;
  auto it = terms_.find(m);
  if (it == terms_.end()) {
    terms_.emplace(m, c);
    return;
  }
  it->second += c;
  if (sgn(it->second) == 0) terms_.erase(it);
}

BarElement& BarElement::operator+=(const BarElement& o) {
  for (auto& [m, c] : o.terms_) add(m, c);
  return *this;
}

BarElement& BarElement::operator-=(const BarElement& o) {
  for (auto& [m, c] : o.terms_) add(m, -c);
  return *this;
}

BarElement BarElement::scaled(const Q& s) const {
  BarElement out;
  for (auto& [m, c] : terms_) out.add(m, c * s);
  return out;
}

int koszul_parity(const std::vector<int>& target, const std::vector<int>& degrees) {
  int p = 0;
  for (size_t i = 0; i < target.size(); ++i)
    for (size_t j = i + 1; j < target.size(); ++j)
      if (target[i] > target[j]) p += degrees[i] * degrees[j];
  return p % 2;
}

BarElement bar_expand(const std::vector<LinComb>& slots, const Q& scalar) {
  BarElement out;
  for (auto& s : slots)
    if (s.empty()) return out;
  std::vector<size_t> idx(slots.size(), 0);
  BarMonomial m{std::vector<int>(slots.size())};
  for (;;) {
    Q c = scalar;
    for (size_t s = 0; s < slots.size(); ++s) {
      m.slots[s] = slots[s][idx[s]].first;
      c *= slots[s][idx[s]].second;
    }
    out.add(m, c);
    size_t s = 0;
    while (s < slots.size() && ++idx[s] == slots[s].size()) idx[s++] = 0;
    if (s == slots.size()) break;
  }
  return out;
}

namespace {

void require_commutative(const Carrier& C) {
  if (!C.commutative()) throw NotCommutative("bar complex needs a graded-commutative carrier");
}

LinComb single(int key) { return LinComb{{key, Q(1)}}; }

// group (column, key) items by column, multiplying in the given order after the Koszul reorder
BarElement collapse_items(const Carrier& C, int n, const std::vector<int>& cols, const std::vector<int>& keys,
                          const Q& scalar) {
  std::vector<int> degs;
  for (int k : keys) degs.push_back(C.degree(k));
  int parity = koszul_parity(cols, degs);
  std::vector<LinComb> slots(static_cast<size_t>(n + 2), single(C.unit_key()));
  for (int c = 0; c <= n + 1; ++c)
    for (size_t i = 0; i < cols.size(); ++i)
      if (cols[i] == c) slots[c] = C.product(slots[c], single(keys[i]));
  return bar_expand(slots, parity ? -scalar : scalar);
}

}  // namespace

int bar_degree(const Carrier& C, const BarMonomial& m) {
  int d = 0;
  for (int k : m.slots) d += C.degree(k);
  return d - m.n();
}

BarElement bar_differential(const Carrier& C, const BarElement& x) {
  require_commutative(C);
  if (!C.flat()) throw std::invalid_argument("bar complex needs a flat carrier");
  BarElement out;
  for (auto& [m, c] : x.terms()) {
    const int n = m.n();
    int beta = 0;
    for (size_t s = 0; s < m.slots.size(); ++s) {
      std::vector<LinComb> v;
      for (int k : m.slots) v.push_back(single(k));
      v[s] = C.nabla(m.slots[s]);
      out += bar_expand(v, c * sign_of_parity(n + beta));
      beta += C.degree(m.slots[s]);
    }
    for (int l = 0; n > 0 && l <= n; ++l) {
      std::vector<LinComb> v;
      for (int s = 0; s < n + 2; ++s) {
        if (s == l + 1) continue;
        v.push_back(s == l ? C.product(m.slots[l], m.slots[l + 1]) : single(m.slots[s]));
      }
      out += bar_expand(v, c * sign_of_parity(n + l));
    }
  }
  return out;
}

BarElement bar_shuffle(const Carrier& C, const BarElement& x, const BarElement& y) {
  require_commutative(C);
  BarElement out;
  for (auto& [mx, cx] : x.terms())
    for (auto& [my, cy] : y.terms()) {
      const int n = mx.n(), m = my.n();
      const int dx = bar_degree(C, mx) + n;
      for (const Shuffle& sh : enumerate_shuffles(n, m)) {
        std::vector<int> cols, keys;
        for (int i = 0; i <= n + 1; ++i) {
          cols.push_back(i == 0 ? 0 : i == n + 1 ? n + m + 1 : sh.image[i - 1]);
          keys.push_back(mx.slots[i]);
        }
        for (int j = 0; j <= m + 1; ++j) {
          cols.push_back(j == 0 ? 0 : j == m + 1 ? n + m + 1 : sh.image[n + j - 1]);
          keys.push_back(my.slots[j]);
        }
        Q sign = sign_of_parity(sh.parity + (dx - n) * m);
        out += collapse_items(C, n + m, cols, keys, cx * cy * sign);
      }
    }
  return out;
}

BarElement col_collapse(const Carrier& C, const ZigzagElement& x) {
  require_commutative(C);
  BarElement out;
  for (auto& [w, c] : x.terms()) {
    std::vector<int> cols, keys;
    for (auto& z : w.e) {
      cols.push_back(z.col);
      keys.push_back(z.key);
    }
    out += collapse_items(C, w.n, cols, keys, c);
  }
  return out;
}

BarElement col_collapse(const Carrier& C, const ZigzagMonomial& m) {
  require_commutative(C);
  std::vector<int> cols, keys;
  for (size_t pos = 0; pos < m.slots.size(); ++pos) {
    cols.push_back(column_of(m.n, pos));
    keys.push_back(m.slots[pos]);
  }
  return collapse_items(C, m.n, cols, keys, m.scalar);
}

std::string to_string(const Carrier& C, const BarElement& x) {
  if (x.is_zero()) return "0";
  std::string s;
  for (auto& [m, c] : x.terms()) {
    if (!s.empty()) s += "  +  ";
    s += "(" + c.get_str() + ") ";
    const size_t last = m.slots.size() - 1;
    s += C.label(m.slots[0]) + " ⊗ [";
    for (size_t i = 1; i < last; ++i) s += (i > 1 ? " | " : "") + C.label(m.slots[i]);
    s += "] ⊗ " + C.label(m.slots[last]);
  }
  return s;
}

}  // namespace curvchen
