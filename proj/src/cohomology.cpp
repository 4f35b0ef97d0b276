#include "curvchen/cohomology.hpp"

#include <bit>

namespace curvchen {

namespace {

// exponents of total degree <= cap, lexicographic
void exponents(int d, int cap, Exponent& cur, int var, std::vector<Exponent>& out) {
  if (var == d) {
    out.push_back(cur);
    return;
  }
  for (int a = 0; a <= cap; ++a) {
    cur[var] = a;
    exponents(d, cap - a, cur, var + 1, out);
  }
  cur[var] = 0;
}

}  // namespace

FormWindow::FormWindow(int d, int r, int lo, int hi, int poly_cap)
    : d_(d), r_(r), lo_(lo), hi_(hi), cap_(poly_cap) {
  if (lo < 0 || hi < lo || poly_cap < 0) throw std::invalid_argument("form window: bad range");
  for (int pass = 0; pass < 2; ++pass) {
    std::vector<Exponent> exps;
    Exponent e(static_cast<size_t>(d), 0);
    exponents(d, poly_cap + pass, e, 0, exps);
    auto& pieces = pass ? wide_ : narrow_;
    pieces.resize(static_cast<size_t>(d + 1));
    for (Mask m = 0; m < (Mask(1) << d); ++m) {
      Piece& pc = pieces[std::popcount(m)];
      for (int i = 0; i < r; ++i)
        for (int j = 0; j < r; ++j)
          for (auto& ex : exps) {
            pc.index.emplace(Key{m, i, j, ex}, pc.basis.size());
            MatrixPoly<Q> M(d, r);
            M(i, j).add_term(ex, Q(1));
            pc.basis.push_back(QForm::from_term(m, M));
          }
    }
  }
}

std::string FormWindow::describe() const {
  return "forms d=" + std::to_string(d_) + " r=" + std::to_string(r_) + " degrees " + std::to_string(lo_) + ".." +
         std::to_string(hi_) + " poly<=" + std::to_string(cap_);
}

const FormWindow::Piece& FormWindow::piece(int p, bool wide) const {
  static const Piece empty;
  if (p < 0 || p > d_) return empty;
  return (wide ? wide_ : narrow_)[static_cast<size_t>(p)];
}

const std::vector<QForm>& FormWindow::basis(int p, bool wide) const { return piece(p, wide).basis; }

std::optional<std::vector<Q>> FormWindow::coords(int p, const QForm& f, bool wide) const {
  const Piece& pc = piece(p, wide);
  std::vector<Q> v(pc.basis.size(), Q(0));
  for (auto& [m, M] : f.terms())
    for (int i = 0; i < r_; ++i)
      for (int j = 0; j < r_; ++j)
        for (auto& [e, c] : M(i, j).terms()) {
          auto it = pc.index.find(Key{m, i, j, e});
          if (it == pc.index.end()) return std::nullopt;
          v[it->second] = c;
        }
  return v;
}

TensorWindow::TensorWindow(int dv, int lo, int hi) : dv_(dv), lo_(lo), hi_(hi) {
  if (lo < 0 || hi < lo || dv < 1) throw std::invalid_argument("tensor window: bad range");
  // ∇ and ∇² reach two degrees above the top of the report
  for (int p = 0; p <= hi + 2; ++p) {
    Piece pc;
    Word w(static_cast<size_t>(p), 0);
    for (;;) {
      pc.index.emplace(w, pc.basis.size());
      pc.basis.push_back(TensorElement::word(dv, w));
      int s = p - 1;
      while (s >= 0 && ++w[s] == dv) w[s--] = 0;
      if (s < 0) break;
    }
    pieces_.push_back(std::move(pc));
  }
}

std::string TensorWindow::describe() const {
  return "tensor dv=" + std::to_string(dv_) + " degrees " + std::to_string(lo_) + ".." + std::to_string(hi_);
}

const TensorWindow::Piece& TensorWindow::piece(int p) const {
  static const Piece empty;
  if (p < 0) return empty;
  if (p >= static_cast<int>(pieces_.size())) throw WindowNotInvariant("tensor window: degree beyond cap");
  return pieces_[static_cast<size_t>(p)];
}

const std::vector<TensorElement>& TensorWindow::basis(int p, bool) const { return piece(p).basis; }

std::optional<std::vector<Q>> TensorWindow::coords(int p, const TensorElement& t, bool) const {
  const Piece& pc = piece(p);
  std::vector<Q> v(pc.basis.size(), Q(0));
  for (auto& [w, c] : t.terms()) {
    auto it = pc.index.find(w);
    if (it == pc.index.end()) return std::nullopt;
    v[it->second] = c;
  }
  return v;
}

}  // namespace curvchen
