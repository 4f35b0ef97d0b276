#include "curvchen/carrier.hpp"

#include <algorithm>
#include <bit>

namespace curvchen {

LinComb lc_add(const LinComb& a, const LinComb& b, const Q& scale_b) {
  LinComb out;
  out.reserve(a.size() + b.size());
  size_t i = 0, j = 0;
  while (i < a.size() || j < b.size()) {
    if (j == b.size() || (i < a.size() && a[i].first < b[j].first)) {
      out.push_back(a[i++]);
    } else if (i == a.size() || b[j].first < a[i].first) {
      Q c = b[j].second * scale_b;
      if (sgn(c)) out.emplace_back(b[j].first, c);
      ++j;
    } else {
      Q c = a[i].second + b[j].second * scale_b;
      if (sgn(c)) out.emplace_back(a[i].first, c);
      ++i, ++j;
    }
  }
  return out;
}

LinComb lc_scale(const LinComb& a, const Q& s) {
  if (sgn(s) == 0) return {};
  LinComb out(a);
  for (auto& t : out) t.second *= s;
  return out;
}

LinComb Carrier::product(const LinComb& a, const LinComb& b) const {
  LinComb out;
  for (auto& [ka, ca] : a)
    for (auto& [kb, cb] : b) out = lc_add(out, product(ka, kb), ca * cb);
  return out;
}

std::vector<std::pair<FormBasis, Q>> decompose(const QForm& f) {
  std::vector<std::pair<FormBasis, Q>> out;
  const int d = f.dim(), r = f.rank();
  const Exponent zero(static_cast<size_t>(d), 0);
  for (auto& [m, M] : f.terms()) {
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < r; ++j)
        for (auto& [e, c] : M(i, j).terms()) {
          if (m == 0 && e == zero) continue;  // constant part handled below
          out.push_back({FormBasis{m, e, i, j}, c});
        }
    if (m != 0) continue;
    // constant matrix C = C00*I + sum_{i>0} (Cii - C00) Eii + off-diagonal Eij
    auto cst = [&](int i, int j) {
      auto it = M(i, j).terms().find(zero);
      return it == M(i, j).terms().end() ? Q(0) : it->second;
    };
    Q c00 = cst(0, 0);
    if (sgn(c00)) out.push_back({FormBasis{0, zero, 0, 0}, c00});
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < r; ++j) {
        if (i == 0 && j == 0) continue;
        Q c = cst(i, j);
        if (i == j) c -= c00;
        if (sgn(c)) out.push_back({FormBasis{0, zero, i, j}, c});
      }
  }
  return out;
}

QForm compose(const FormBasis& b, int d, int r) {
  bool is_const = b.mask == 0 && std::all_of(b.exps.begin(), b.exps.end(), [](int v) { return v == 0; });
  if (is_const && b.i == 0 && b.j == 0) return QForm::unit(d, r);
  MatrixPoly<Q> M(d, r);
  M(b.i, b.j).add_term(b.exps, Q(1));
  return QForm::from_term(b.mask, M);
}

int basis_degree(const FormBasis& b) { return std::popcount(b.mask); }

}  // namespace curvchen
