#include "curvchen/zigzag.hpp"

#include <algorithm>

#include "curvchen/shuffle.hpp"

namespace curvchen {

size_t ZigzagMonomial::index(int i, int p) const {
  if (i == 0) return 0;
  if (i < 0 || i > k || p < 1 || p > n + 1) throw std::out_of_range("zigzag: slot index out of range");
  return 1 + static_cast<size_t>(i - 1) * (n + 1) + (p - 1);
}

ZigzagMonomial ZigzagMonomial::units(const Carrier& C, int k, int n) {
  if (k < 2 || k % 2) throw std::invalid_argument("zigzag: k must be even and positive");
  if (n < 0) throw std::invalid_argument("zigzag: negative column count");
  ZigzagMonomial m;
  m.k = k;
  m.n = n;
  m.slots.assign(1 + static_cast<size_t>(k) * (n + 1), C.unit_key());
  return m;
}

std::pair<int, int> row_p_of(int n, size_t pos) {
  if (pos == 0) return {0, 0};
  int i = static_cast<int>((pos - 1) / (n + 1)) + 1;
  int p = static_cast<int>((pos - 1) % (n + 1)) + 1;
  return {i, p};
}

int column_of(int n, size_t pos) {
  auto [i, p] = row_p_of(n, pos);
  if (i == 0) return 0;
  return (i % 2) ? p : n + 1 - p;
}

void ZigzagElement::add(const ZWord& w, const Q& c) {
  if (sgn(c) == 0) return;
  auto it = terms_.find(w);
  if (it == terms_.end()) {
    terms_.emplace(w, c);
    return;
  }
  it->second += c;
  if (sgn(it->second) == 0) terms_.erase(it);
}

ZigzagElement& ZigzagElement::operator+=(const ZigzagElement& o) {
  for (auto& [w, c] : o.terms_) add(w, c);
  return *this;
}

ZigzagElement& ZigzagElement::operator-=(const ZigzagElement& o) {
  for (auto& [w, c] : o.terms_) add(w, -c);
  return *this;
}

ZigzagElement ZigzagElement::scaled(const Q& s) const {
  ZigzagElement out;
  if (sgn(s) == 0) return out;
  for (auto& [w, c] : terms_) out.terms_.emplace(w, c * s);
  return out;
}

namespace {

void normalize_into(const Carrier& C, int n, std::vector<ZSlot> w, Q s, ZigzagElement& out) {
  const int u = C.unit_key();
  std::erase_if(w, [u](const ZSlot& z) { return z.key == u; });
  for (size_t i = 0; i + 1 < w.size(); ++i) {
    if (w[i].col != w[i + 1].col) continue;
    // neighbours in one column with only units between them: slide together and multiply
    LinComb p = C.product(w[i].key, w[i + 1].key);
    for (auto& [key, c] : p) {
      std::vector<ZSlot> v(w);
      v[i].key = key;
      v.erase(v.begin() + static_cast<long>(i) + 1);
      normalize_into(C, n, std::move(v), s * c, out);
    }
    return;
  }
  out.add(ZWord{n, std::move(w)}, s);
}

int deg_sum(const Carrier& C, const std::vector<ZSlot>& w) {
  int d = 0;
  for (auto& z : w) d += C.degree(z.key);
  return d;
}

}  // namespace

ZigzagElement normalize_word(const Carrier& C, int n, std::vector<ZSlot> w, const Q& scalar) {
  ZigzagElement out;
  if (sgn(scalar) != 0) normalize_into(C, n, std::move(w), scalar, out);
  return out;
}

ZigzagElement normalize(const Carrier& C, const ZigzagMonomial& m) {
  std::vector<ZSlot> w;
  w.reserve(m.slots.size());
  for (size_t pos = 0; pos < m.slots.size(); ++pos) w.push_back({column_of(m.n, pos), m.slots[pos]});
  return normalize_word(C, m.n, std::move(w), m.scalar);
}

ZigzagMonomial canonical_grid(const Carrier& C, const ZWord& w, const Q& scalar) {
  // earliest placement along the path; every later entry lands on the first visit
  // of its column after the previous one
  std::vector<size_t> pos;
  size_t next = 0;
  for (auto& z : w.e) {
    size_t p = next;
    while (column_of(w.n, p) != z.col) ++p;
    pos.push_back(p);
    next = p + 1;
  }
  int last_row = pos.empty() ? 0 : row_p_of(w.n, pos.back()).first;
  int k = std::max(2, last_row + (last_row % 2));
  ZigzagMonomial m = ZigzagMonomial::units(C, k, w.n);
  for (size_t i = 0; i < pos.size(); ++i) m.slots[pos[i]] = w.e[i].key;
  m.scalar = scalar;
  return m;
}

int unshifted_degree(const Carrier& C, const ZWord& w) { return deg_sum(C, w.e); }

std::optional<int> degree(const Carrier& C, const ZigzagElement& x) {
  std::optional<int> d;
  for (auto& [w, c] : x.terms()) {
    int dw = shifted_degree(C, w);
    if (d && *d != dw) return std::nullopt;
    d = dw;
  }
  return d;
}

ZigzagElement nabla_z(const Carrier& C, const ZigzagElement& x) {
  ZigzagElement out;
  for (auto& [w, c] : x.terms()) {
    int beta = 0;
    for (size_t s = 0; s < w.e.size(); ++s) {
      Q sign = sign_of_parity(w.n + beta);
      for (auto& [key, ck] : C.nabla(w.e[s].key)) {
        std::vector<ZSlot> v(w.e);
        v[s].key = key;
        out += normalize_word(C, w.n, std::move(v), c * ck * sign);
      }
      beta += C.degree(w.e[s].key);
    }
  }
  return out;
}

ZigzagElement b_z(const Carrier& C, const ZigzagElement& x) {
  ZigzagElement out;
  for (auto& [w, c] : x.terms()) {
    if (w.n == 0) continue;
    for (int l = 0; l <= w.n; ++l) {
      // merge columns l and l+1
      std::vector<ZSlot> v(w.e);
      for (auto& z : v)
        if (z.col > l) z.col -= 1;
      out += normalize_word(C, w.n - 1, std::move(v), c * sign_of_parity(w.n + l));
    }
  }
  return out;
}

namespace {

void c_z_grid(const Carrier& C, const ZigzagMonomial& g, const Q& coeff, const SignFault& fault, ZigzagElement& out) {
  const LinComb& R = C.curvature();
  const int u = C.unit_key();
  const int n = g.n;
  for (int j = 1; j <= g.k; ++j)
    for (int l = 1; l <= n + 1; ++l) {
      // on row j the path crosses between columns l-1 and l just before this slot
      const size_t ins = g.index(j, (j % 2) ? l : n + 2 - l);
      std::vector<ZSlot> v;
      size_t r_at = 0;
      for (size_t pos = 0; pos < g.slots.size(); ++pos) {
        if (pos == ins) {
          r_at = v.size();
          v.push_back({l, u});
        }
        int key = g.slots[pos];
        if (key == u) continue;
        int col = column_of(n, pos);
        v.push_back({col >= l ? col + 1 : col, key});
      }
      int parity = n + l + 1 + j;
      if (fault.flip_cz_even_rows && j % 2 == 0) parity += 1;
      for (auto& [rk, rc] : R) {
        v[r_at].key = rk;
        out += normalize_word(C, n + 1, v, coeff * rc * sign_of_parity(parity));
      }
    }
}

std::vector<ZSlot> raw_word(const ZigzagMonomial& m) {
  std::vector<ZSlot> w;
  for (size_t pos = 0; pos < m.slots.size(); ++pos) w.push_back({column_of(m.n, pos), m.slots[pos]});
  return w;
}

}  // namespace

ZigzagElement c_z(const Carrier& C, const ZigzagElement& x, const SignFault& fault) {
  ZigzagElement out;
  if (C.curvature().empty()) return out;
  for (auto& [w, c] : x.terms()) c_z_grid(C, canonical_grid(C, w), c, fault, out);
  return out;
}

ZigzagElement D_z(const Carrier& C, const ZigzagMonomial& m, const SignFault& fault) {
  // works on the given representative; units are kept in the words so nothing is pre-normalised
  ZigzagElement out;
  const std::vector<ZSlot> w = raw_word(m);
  const Q& c = m.scalar;
  const int u = C.unit_key();
  int beta = 0;
  for (size_t s = 0; s < w.size(); ++s) {
    if (w[s].key == u) continue;
    Q sign = sign_of_parity(m.n + beta);
    for (auto& [key, ck] : C.nabla(w[s].key)) {
      std::vector<ZSlot> v(w);
      v[s].key = key;
      out += normalize_word(C, m.n, std::move(v), c * ck * sign);
    }
    beta += C.degree(w[s].key);
  }
  for (int l = 0; m.n > 0 && l <= m.n; ++l) {
    std::vector<ZSlot> v(w);
    for (auto& z : v)
      if (z.col > l) z.col -= 1;
    out += normalize_word(C, m.n - 1, std::move(v), c * sign_of_parity(m.n + l));
  }
  if (!C.curvature().empty()) c_z_grid(C, m, c, fault, out);
  return out;
}

ZigzagElement D_z(const Carrier& C, const ZigzagElement& x, const SignFault& fault) {
  ZigzagElement out = nabla_z(C, x);
  out += b_z(C, x);
  out += c_z(C, x, fault);
  return out;
}

ZigzagElement shuffle(const Carrier& C, const ZigzagElement& x, const ZigzagElement& y) {
  ZigzagElement out;
  std::map<std::pair<int, int>, std::vector<Shuffle>> cache;
  for (auto& [wx, cx] : x.terms()) {
    const int n = wx.n, dx = unshifted_degree(C, wx);
    for (auto& [wy, cy] : y.terms()) {
      const int m = wy.n;
      auto& shs = cache.try_emplace({n, m}, enumerate_shuffles(n, m)).first->second;
      for (const Shuffle& sh : shs) {
        std::vector<ZSlot> v;
        v.reserve(wx.e.size() + wy.e.size());
        for (auto z : wx.e) {
          if (z.col == n + 1) z.col = n + m + 1;
          else if (z.col > 0) z.col = sh.image[z.col - 1];
          v.push_back(z);
        }
        for (auto z : wy.e) {
          if (z.col == m + 1) z.col = n + m + 1;
          else if (z.col > 0) z.col = sh.image[n + z.col - 1];
          v.push_back(z);
        }
        Q sign = sign_of_parity(sh.parity + (dx - n) * m);
        out += normalize_word(C, n + m, std::move(v), cx * cy * sign);
      }
    }
  }
  return out;
}

ZigzagElement commutator_z(const Carrier& C, const ZigzagElement& x, const ZigzagElement& y) {
  ZigzagElement out;
  for (auto& [wx, cx] : x.terms())
    for (auto& [wy, cy] : y.terms()) {
      ZigzagElement a, b;
      a.add(wx, cx);
      b.add(wy, cy);
      int p = shifted_degree(C, wx) * shifted_degree(C, wy);
      out += shuffle(C, a, b);
      out += shuffle(C, b, a).scaled(Q(-sign_of_parity(p)));
    }
  return out;
}

ZigzagElement unit_z(const Carrier&) {
  ZigzagElement out;
  out.add(ZWord{0, {}}, Q(1));
  return out;
}

ZigzagElement eta(const Carrier& C, const LinComb& a) {
  ZigzagElement out;
  for (auto& [k, c] : a) out += normalize_word(C, 0, {{0, k}}, c);
  return out;
}

ZigzagElement R_z(const Carrier& C) { return eta(C, C.curvature()); }

LinComb alpha(const Carrier& C, const ZigzagElement& x) {
  LinComb out;
  for (auto& [w, c] : x.terms()) {
    if (w.n != 0) continue;
    LinComb acc{{C.unit_key(), Q(1)}};
    for (auto& z : w.e) acc = C.product(acc, LinComb{{z.key, Q(1)}});
    out = lc_add(out, acc, c);
  }
  return out;
}

ZigzagElement s_homotopy(const Carrier& C, const ZigzagElement& x) {
  // the right endpoint column becomes interior column n+1, units fill the new endpoint
  ZigzagElement out;
  for (auto& [w, c] : x.terms()) out += normalize_word(C, w.n + 1, w.e, c);
  return out;
}

ZigzagMonomial insert_unit_rows(const Carrier& C, const ZigzagMonomial& m, int j) {
  if (j < 0 || j > m.k || j % 2) throw std::invalid_argument("insert_unit_rows: height must be even and within the grid");
  ZigzagMonomial out = ZigzagMonomial::units(C, m.k + 2, m.n);
  out.scalar = m.scalar;
  out.slots[0] = m.slots[0];
  for (int i = 1; i <= m.k; ++i)
    for (int p = 1; p <= m.n + 1; ++p) out.at(i <= j ? i : i + 2, p) = m.at(i, p);
  return out;
}

std::optional<std::vector<ZigzagMonomial>> slide_entry(const Carrier& C, const ZigzagMonomial& m, size_t pos,
                                                      bool forward) {
  const int u = C.unit_key();
  if (pos >= m.slots.size() || m.slots[pos] == u) return std::nullopt;
  const int col = column_of(m.n, pos);
  long q = static_cast<long>(pos);
  for (;;) {
    q += forward ? 1 : -1;
    if (q < 0 || q >= static_cast<long>(m.slots.size())) return std::nullopt;
    if (column_of(m.n, static_cast<size_t>(q)) == col) break;
    if (m.slots[q] != u) return std::nullopt;
  }
  LinComb p = forward ? C.product(m.slots[pos], m.slots[q]) : C.product(m.slots[q], m.slots[pos]);
  std::vector<ZigzagMonomial> out;
  for (auto& [key, c] : p) {
    ZigzagMonomial r = m;
    r.slots[pos] = u;
    r.slots[q] = key;
    r.scalar = m.scalar * c;
    out.push_back(std::move(r));
  }
  return out;
}

ZigzagMonomial random_grid(const Carrier& C, std::mt19937_64& rng, int k, int n, const std::vector<int>& keys,
                           double unit_prob) {
  ZigzagMonomial m = ZigzagMonomial::units(C, k, n);
  std::bernoulli_distribution is_unit(unit_prob);
  std::uniform_int_distribution<size_t> pick(0, keys.size() - 1);
  for (auto& s : m.slots)
    if (!is_unit(rng)) s = keys[pick(rng)];
  return m;
}

std::string to_string(const Carrier& C, const ZWord& w) {
  std::string s = "n=" + std::to_string(w.n) + ":";
  if (w.e.empty()) s += " (units)";
  for (auto& z : w.e) s += " [c" + std::to_string(z.col) + ": " + C.label(z.key) + "]";
  return s;
}

std::string to_string(const Carrier& C, const ZigzagElement& x) {
  if (x.is_zero()) return "0";
  std::string s;
  for (auto& [w, c] : x.terms()) {
    if (!s.empty()) s += "  +  ";
    s += "(" + c.get_str() + ") " + to_string(C, w);
  }
  return s;
}

}  // namespace curvchen
