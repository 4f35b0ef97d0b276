#pragma once

#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "curvchen/cdga.hpp"
#include "curvchen/linalg.hpp"

namespace curvchen {

struct WindowNotInvariant : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Finite pieces W_p of a curved dga, one per form/tensor degree p. Reports cover p in [lo, hi].
// Matrix forms: polynomial coefficients of total degree <= D. Since d lowers polynomial degree,
// preimages (η and exactness witnesses) are searched in the wide piece with cap D + 1.
// Tensors: all of T^p, and wide == narrow.
class FormWindow {
 public:
  FormWindow(int d, int r, int lo, int hi, int poly_cap);
  int lo() const { return lo_; }
  int hi() const { return hi_; }
  int cap() const { return cap_; }
  bool exact() const { return false; }
  std::string describe() const;
  const std::vector<QForm>& basis(int p, bool wide = false) const;
  std::optional<std::vector<Q>> coords(int p, const QForm& f, bool wide = false) const;

 private:
  struct Key {
    Mask mask;
    int i, j;
    Exponent e;
    auto operator<=>(const Key&) const = default;
  };
  struct Piece {
    std::vector<QForm> basis;
    std::map<Key, size_t> index;
  };
  const Piece& piece(int p, bool wide) const;

  int d_, r_, lo_, hi_, cap_;
  std::vector<Piece> narrow_, wide_;  // p = 0..d
};

class TensorWindow {
 public:
  TensorWindow(int dv, int lo, int hi);
  int lo() const { return lo_; }
  int hi() const { return hi_; }
  int cap() const { return hi_; }
  bool exact() const { return true; }
  std::string describe() const;
  const std::vector<TensorElement>& basis(int p, bool wide = false) const;
  std::optional<std::vector<Q>> coords(int p, const TensorElement& t, bool wide = false) const;

 private:
  struct Piece {
    std::vector<TensorElement> basis;
    std::map<Word, size_t> index;
  };
  const Piece& piece(int p) const;

  int dv_, lo_, hi_;
  std::vector<Piece> pieces_;  // p = 0..hi+2
};

struct CohomologyDegree {
  int p = 0;
  size_t dim_space = 0;
  size_t dim_cur = 0;  // kernel (curved or plain, depending on the method)
  size_t dim_im = 0;
  size_t dim_H = 0;
  bool image_in_kernel = true;
  std::vector<std::string> representatives;
};

struct CohomologyReport {
  std::string instance;
  std::string method;  // "curved" or "maximal-subdga"
  std::string window;
  bool window_exact = false;
  std::vector<CohomologyDegree> degrees;

  const CohomologyDegree& at(int p) const {
    for (auto& d : degrees)
      if (d.p == p) return d;
    throw std::out_of_range("cohomology report has no degree " + std::to_string(p));
  }
};

namespace detail {

using Vecs = std::vector<std::vector<Q>>;

template <class E, class W>
std::vector<Q> coords_or_throw(const W& win, int p, const E& x, bool wide, const char* what) {
  auto c = win.coords(p, x, wide);
  if (!c) throw WindowNotInvariant(std::string(what) + " leaves the truncation window: " + x.str());
  return *c;
}

// columns op(b) for b in basis(p, src_wide), in the wide coordinates of degree q
template <class E, class W>
QMatrix operator_matrix(const W& win, int p, bool src_wide, int q, const std::function<E(const E&)>& op,
                        const char* what) {
  const size_t rows = q < 0 ? 0 : win.basis(q, true).size();
  if (p < 0) return QMatrix(rows, 0);
  const auto& src = win.basis(p, src_wide);
  QMatrix m(rows, src.size());
  for (size_t j = 0; j < src.size(); ++j) {
    E y = op(src[j]);
    if (y.is_zero()) continue;
    if (q < 0) throw WindowNotInvariant(std::string(what) + " produced negative degree");
    m.set_column(j, coords_or_throw(win, q, y, true, what));
  }
  return m;
}

inline QMatrix from_columns(size_t rows, const Vecs& cols) {
  QMatrix m(rows, cols.size());
  for (size_t j = 0; j < cols.size(); ++j) m.set_column(j, cols[j]);
  return m;
}

template <class E, class W>
E from_coords(const W& win, int p, const std::vector<Q>& v, bool wide, const E& zero) {
  E out = zero;
  const auto& b = win.basis(p, wide);
  for (size_t i = 0; i < v.size(); ++i)
    if (sgn(v[i])) out += b[i].scaled(v[i]);
  return out;
}

// greedily extend span(base) by vectors of `extra`; returns the chosen extras
inline Vecs complement(size_t dim, const Vecs& base, const Vecs& extra) {
  Vecs span = base, chosen;
  size_t r = rank(from_columns(dim, span));
  for (auto& v : extra) {
    span.push_back(v);
    size_t r2 = rank(from_columns(dim, span));
    if (r2 > r) {
      chosen.push_back(v);
      r = r2;
    } else {
      span.pop_back();
    }
  }
  return chosen;
}

// span(cols of M, wide coords of degree p) ∩ W_p, returned in narrow coordinates
template <class W>
Vecs intersect_narrow(const W& win, int p, const QMatrix& M) {
  const auto& nb = win.basis(p, false);
  QMatrix emb(M.rows(), nb.size());
  for (size_t j = 0; j < nb.size(); ++j) {
    auto c = *win.coords(p, nb[j], true);
    for (size_t i = 0; i < c.size(); ++i) emb(i, j) = -c[i];
  }
  Vecs out;
  for (auto& v : nullspace(QMatrix::hcat(M, emb))) out.emplace_back(v.begin() + static_cast<long>(M.cols()), v.end());
  return complement(nb.size(), {}, out);
}

// narrow-coordinate vectors a in W_p with ∇a = [R, η] for some η in the wide W_{p-1}
template <class E, class W>
Vecs curved_kernel(const CurvedDGA<E>& inst, const W& win, int p) {
  std::function<E(const E&)> nab = [&](const E& a) { return inst.nabla(a); };
  std::function<E(const E&)> adR = [&](const E& a) { return graded_commutator(inst.curvature(), a); };
  const size_t n = win.basis(p, false).size();
  QMatrix N = operator_matrix<E>(win, p, false, p + 1, nab, "nabla");
  QMatrix C = operator_matrix<E>(win, p - 1, true, p + 1, adR, "[R,-]");
  // (a, η) with ∇a = -[R,η]; the sign of η does not matter after projecting onto a
  Vecs cur;
  for (auto& v : nullspace(QMatrix::hcat(N, C))) cur.emplace_back(v.begin(), v.begin() + static_cast<long>(n));
  return complement(n, {}, cur);
}

}  // namespace detail

// H_cur^p = { a : ∇a = [R, η] } / (∇(W_{p-1}) ∩ W_p)
template <class E, class W>
CohomologyReport curved_cohomology(const CurvedDGA<E>& inst, const W& win) {
  using namespace detail;
  std::function<E(const E&)> nab = [&](const E& a) { return inst.nabla(a); };
  CohomologyReport rep{inst.name(), "curved", win.describe(), win.exact(), {}};
  for (int p = win.lo(); p <= win.hi(); ++p) {
    CohomologyDegree row;
    row.p = p;
    const size_t n = win.basis(p).size();
    row.dim_space = n;
    Vecs cur = curved_kernel(inst, win, p);
    row.dim_cur = cur.size();
    Vecs im = p >= 1 ? intersect_narrow(win, p, operator_matrix<E>(win, p - 1, true, p, nab, "nabla")) : Vecs{};
    row.dim_im = im.size();
    row.image_in_kernel = complement(n, cur, im).empty();
    for (auto& v : complement(n, im, cur))
      row.representatives.push_back(from_coords(win, p, v, false, inst.zero()).str());
    row.dim_H = row.representatives.size();
    rep.degrees.push_back(std::move(row));
  }
  return rep;
}

// ker ∇ / ∇(Ã^{p-1}) where Ã = { a : ∇²a = 0 }
template <class E, class W>
CohomologyReport maximal_subdga_cohomology(const CurvedDGA<E>& inst, const W& win) {
  using namespace detail;
  std::function<E(const E&)> nab = [&](const E& a) { return inst.nabla(a); };
  std::function<E(const E&)> nab2 = [&](const E& a) { return inst.nabla(inst.nabla(a)); };
  CohomologyReport rep{inst.name(), "maximal-subdga", win.describe(), win.exact(), {}};
  for (int p = win.lo(); p <= win.hi(); ++p) {
    CohomologyDegree row;
    row.p = p;
    const size_t n = win.basis(p).size();
    row.dim_space = n;
    Vecs Z = nullspace(operator_matrix<E>(win, p, false, p + 1, nab, "nabla"));
    row.dim_cur = Z.size();
    Vecs im;
    if (p >= 1) {
      QMatrix N = operator_matrix<E>(win, p - 1, true, p, nab, "nabla");
      Vecs sub = nullspace(operator_matrix<E>(win, p - 1, true, p + 1, nab2, "nabla^2"));
      QMatrix img(N.rows(), sub.size());
      for (size_t s = 0; s < sub.size(); ++s)
        for (size_t i = 0; i < N.rows(); ++i)
          for (size_t j = 0; j < N.cols(); ++j)
            if (sgn(sub[s][j])) img(i, s) += N(i, j) * sub[s][j];
      im = intersect_narrow(win, p, img);
    }
    row.dim_im = im.size();
    row.image_in_kernel = complement(n, Z, im).empty();
    for (auto& v : complement(n, im, Z)) row.representatives.push_back(from_coords(win, p, v, false, inst.zero()).str());
    row.dim_H = row.representatives.size();
    rep.degrees.push_back(std::move(row));
  }
  return rep;
}

// a witness η with ∇ω = [R, η], searched in the wide W_{p-1}
template <class E, class W>
std::optional<E> is_curved_closed(const CurvedDGA<E>& inst, const E& omega, const W& win) {
  using namespace detail;
  E dw = inst.nabla(omega);
  if (dw.is_zero()) return inst.zero();
  const int p = omega.degree();
  std::function<E(const E&)> adR = [&](const E& a) { return graded_commutator(inst.curvature(), a); };
  QMatrix C = operator_matrix<E>(win, p - 1, true, p + 1, adR, "[R,-]");
  auto x = solve(C, coords_or_throw(win, p + 1, dw, true, "nabla"));
  if (!x) return std::nullopt;
  return from_coords(win, p - 1, *x, true, inst.zero());
}

template <class E, class W>
bool is_curved_exact(const CurvedDGA<E>& inst, const E& omega, const W& win) {
  using namespace detail;
  if (omega.is_zero()) return true;
  const int p = omega.degree();
  if (p == 0) return false;
  std::function<E(const E&)> nab = [&](const E& a) { return inst.nabla(a); };
  QMatrix N = operator_matrix<E>(win, p - 1, true, p, nab, "nabla");
  auto target = win.coords(p, omega, true);
  if (!target) return false;
  return solve(N, *target).has_value();
}

// f - g = ∇h + h∇ on every basis element of the window, and f, g agree on H_cur
template <class E, class W>
bool homotopy_invariance_check(const CurvedDGA<E>& inst, const std::function<E(const E&)>& f,
                               const std::function<E(const E&)>& g, const std::function<E(const E&)>& h,
                               const W& win) {
  for (int p = win.lo(); p <= win.hi(); ++p)
    for (const E& b : win.basis(p)) {
      E lhs = f(b) - g(b);
      E rhs = inst.nabla(h(b)) + h(inst.nabla(b));
      if (!(lhs == rhs)) return false;
    }
  // induced maps: on curved-closed elements f - g must be exact
  for (int p = win.lo(); p <= win.hi(); ++p)
    for (auto& v : detail::curved_kernel(inst, win, p)) {
      E x = detail::from_coords(win, p, v, false, inst.zero());
      if (!is_curved_exact(inst, f(x) - g(x), win)) return false;
    }
  return true;
}

// for a morphism f: A -> B, check f(cur_A) ⊆ cur_B and f(im_A) ⊆ im_B on window bases
template <class EA, class EB, class WA, class WB>
bool preserves_cur_and_im(const CurvedDGA<EA>& A, const CurvedDGA<EB>& B, const std::function<EB(const EA&)>& f,
                          const WA& wa, const WB& wb) {
  for (int p = wa.lo(); p <= wa.hi(); ++p) {
    if (p >= 1)
      for (const EA& b : wa.basis(p - 1)) {
        EB y = f(A.nabla(b));
        if (!is_curved_exact(B, y, wb)) return false;
      }
    for (auto& v : detail::curved_kernel(A, wa, p)) {
      EB y = f(detail::from_coords(wa, p, v, false, A.zero()));
      if (!y.is_zero() && !is_curved_closed(B, y, wb)) return false;
    }
  }
  return true;
}

}  // namespace curvchen
