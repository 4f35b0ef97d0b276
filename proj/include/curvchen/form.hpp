#pragma once

#include <bit>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "curvchen/polynomial.hpp"

namespace curvchen {

struct DimensionMismatch : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

template <class S>
class MatrixPoly {
 public:
  MatrixPoly() = default;
  MatrixPoly(int d, int r) : d_(d), r_(r), e_(static_cast<size_t>(r * r), Polynomial<S>(d)) {}

  static MatrixPoly identity(int d, int r) {
    MatrixPoly m(d, r);
    for (int i = 0; i < r; ++i) m(i, i) = Polynomial<S>::constant(d, S(1));
    return m;
  }
  // constant matrix from a row-major list
  static MatrixPoly constant(int d, int r, const std::vector<S>& vals) {
    if (static_cast<int>(vals.size()) != r * r) throw DimensionMismatch("matrix: wrong entry count");
    MatrixPoly m(d, r);
    for (int i = 0; i < r * r; ++i) m.e_[i] = Polynomial<S>::constant(d, vals[i]);
    return m;
  }

  int dim() const { return d_; }
  int rank() const { return r_; }
  Polynomial<S>& operator()(int i, int j) { return e_[i * r_ + j]; }
  const Polynomial<S>& operator()(int i, int j) const { return e_[i * r_ + j]; }

  bool is_zero() const {
    for (auto& p : e_)
      if (!p.is_zero()) return false;
    return true;
  }
  MatrixPoly& operator+=(const MatrixPoly& o) {
    check(o);
    for (size_t i = 0; i < e_.size(); ++i) e_[i] += o.e_[i];
    return *this;
  }
  MatrixPoly& operator-=(const MatrixPoly& o) {
    check(o);
    for (size_t i = 0; i < e_.size(); ++i) e_[i] -= o.e_[i];
    return *this;
  }
  friend MatrixPoly operator+(MatrixPoly a, const MatrixPoly& b) { return a += b; }
  friend MatrixPoly operator-(MatrixPoly a, const MatrixPoly& b) { return a -= b; }
  MatrixPoly scaled(const S& s) const {
    MatrixPoly m(d_, r_);
    for (size_t i = 0; i < e_.size(); ++i) m.e_[i] = e_[i].scaled(s);
    return m;
  }
  friend MatrixPoly operator*(const MatrixPoly& a, const MatrixPoly& b) {
    a.check(b);
    MatrixPoly m(a.d_, a.r_);
    for (int i = 0; i < a.r_; ++i)
      for (int k = 0; k < a.r_; ++k) {
        const auto& aik = a(i, k);
        if (aik.is_zero()) continue;
        for (int j = 0; j < a.r_; ++j)
          if (!b(k, j).is_zero()) m(i, j) += aik * b(k, j);
      }
    return m;
  }
  bool operator==(const MatrixPoly& o) const { return d_ == o.d_ && r_ == o.r_ && e_ == o.e_; }

  MatrixPoly partial(int var) const {
    MatrixPoly m(d_, r_);
    for (size_t i = 0; i < e_.size(); ++i) m.e_[i] = e_[i].partial(var);
    return m;
  }

  std::vector<double> eval(const std::vector<double>& x) const {
    std::vector<double> out(e_.size());
    for (size_t i = 0; i < e_.size(); ++i) out[i] = e_[i].eval(x);
    return out;
  }

  MatrixPoly<double> to_double() const {
    MatrixPoly<double> m(d_, r_);
    for (int i = 0; i < r_; ++i)
      for (int j = 0; j < r_; ++j) m(i, j) = (*this)(i, j).to_double();
    return m;
  }

 private:
  void check(const MatrixPoly& o) const {
    if (o.d_ != d_ || o.r_ != r_) throw DimensionMismatch("matrix: dimension or rank mismatch");
  }
  int d_ = 0, r_ = 0;
  std::vector<Polynomial<S>> e_;
};

using Mask = unsigned;

// sign of dx_a ∧ dx_b rearranged into increasing order; 0 if they overlap
inline int wedge_sign(Mask a, Mask b) {
  if (a & b) return 0;
  int inv = 0;
  for (Mask bb = b; bb; bb &= bb - 1) {
    int j = std::countr_zero(bb);
    inv += std::popcount(a >> (j + 1));
  }
  return sign_of_parity(inv);
}

// End(R^r)-valued polynomial form on R^d; terms keyed by the sorted generator subset.
template <class S>
class FormElement {
 public:
  FormElement() = default;
  FormElement(int d, int r) : d_(d), r_(r) {
    if (d < 0 || d > 16 || r < 1) throw DimensionMismatch("form: unsupported dimension/rank");
  }

  static FormElement zero(int d, int r) { return FormElement(d, r); }
  static FormElement unit(int d, int r) { return from_term(0u, MatrixPoly<S>::identity(d, r)); }
  static FormElement from_term(Mask m, const MatrixPoly<S>& c) {
    FormElement f(c.dim(), c.rank());
    f.add_term(m, c);
    return f;
  }
  // the 1-form dx_var with identity coefficient
  static FormElement dx(int d, int r, int var) { return from_term(Mask(1) << var, MatrixPoly<S>::identity(d, r)); }

  int dim() const { return d_; }
  int rank() const { return r_; }
  const std::map<Mask, MatrixPoly<S>>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  void add_term(Mask m, const MatrixPoly<S>& c) {
    if (c.dim() != d_ || c.rank() != r_) throw DimensionMismatch("form: coefficient mismatch");
    if (m >> d_) throw DimensionMismatch("form: generator out of range");
    if (c.is_zero()) return;
    auto it = terms_.find(m);
    if (it == terms_.end()) {
      terms_.emplace(m, c);
      return;
    }
    it->second += c;
    if (it->second.is_zero()) terms_.erase(it);
  }

  bool is_homogeneous() const {
    if (terms_.empty()) return false;
    int deg = std::popcount(terms_.begin()->first);
    for (auto& [m, c] : terms_)
      if (std::popcount(m) != deg) return false;
    return true;
  }
  int degree() const {
    if (terms_.empty()) throw std::domain_error("degree of zero form is undefined");
    if (!is_homogeneous()) throw std::domain_error("form is not homogeneous");
    return std::popcount(terms_.begin()->first);
  }
  FormElement homogeneous_part(int p) const {
    FormElement f(d_, r_);
    for (auto& [m, c] : terms_)
      if (std::popcount(m) == p) f.terms_.emplace(m, c);
    return f;
  }

  FormElement& operator+=(const FormElement& o) {
    check(o);
    for (auto& [m, c] : o.terms_) add_term(m, c);
    return *this;
  }
  FormElement& operator-=(const FormElement& o) {
    check(o);
    for (auto& [m, c] : o.terms_) add_term(m, c.scaled(S(-1)));
    return *this;
  }
  friend FormElement operator+(FormElement a, const FormElement& b) { return a += b; }
  friend FormElement operator-(FormElement a, const FormElement& b) { return a -= b; }
  FormElement operator-() const { return scaled(S(-1)); }
  FormElement scaled(const S& s) const {
    FormElement f(d_, r_);
    if (ScalarTraits<S>::is_zero(s)) return f;
    for (auto& [m, c] : terms_) f.terms_.emplace(m, c.scaled(s));
    return f;
  }
  bool operator==(const FormElement& o) const { return d_ == o.d_ && r_ == o.r_ && terms_ == o.terms_; }

  MatrixPoly<S> coefficient(Mask m) const {
    auto it = terms_.find(m);
    return it == terms_.end() ? MatrixPoly<S>(d_, r_) : it->second;
  }

  FormElement<double> to_double() const {
    FormElement<double> f(d_, r_);
    for (auto& [m, c] : terms_) f.add_term(m, c.to_double());
    return f;
  }

  std::string str() const;

  void check(const FormElement& o) const {
    if (o.d_ != d_ || o.r_ != r_) throw DimensionMismatch("form: dimension or rank mismatch");
  }

 private:
  int d_ = 0, r_ = 1;
  std::map<Mask, MatrixPoly<S>> terms_;
};

template <class S>
FormElement<S> wedge(const FormElement<S>& a, const FormElement<S>& b) {
  a.check(b);
  FormElement<S> out(a.dim(), a.rank());
  for (auto& [ma, ca] : a.terms())
    for (auto& [mb, cb] : b.terms()) {
      int s = wedge_sign(ma, mb);
      if (!s) continue;
      MatrixPoly<S> c = ca * cb;
      out.add_term(ma | mb, s > 0 ? c : c.scaled(S(-1)));
    }
  return out;
}

template <class S>
FormElement<S> operator*(const FormElement<S>& a, const FormElement<S>& b) {
  return wedge(a, b);
}

template <class S>
FormElement<S> exterior_derivative(const FormElement<S>& a) {
  FormElement<S> out(a.dim(), a.rank());
  for (auto& [m, c] : a.terms())
    for (int v = 0; v < a.dim(); ++v) {
      if (m & (Mask(1) << v)) continue;
      MatrixPoly<S> dc = c.partial(v);
      if (dc.is_zero()) continue;
      int s = wedge_sign(Mask(1) << v, m);
      out.add_term(m | (Mask(1) << v), s > 0 ? dc : dc.scaled(S(-1)));
    }
  return out;
}

// [a,b] = ab - (-1)^{|a||b|} ba, extended bilinearly over homogeneous parts
template <class S>
FormElement<S> graded_commutator(const FormElement<S>& a, const FormElement<S>& b) {
  a.check(b);
  FormElement<S> out(a.dim(), a.rank());
  for (int p = 0; p <= a.dim(); ++p) {
    FormElement<S> ap = a.homogeneous_part(p);
    if (ap.is_zero()) continue;
    for (int q = 0; q <= b.dim(); ++q) {
      FormElement<S> bq = b.homogeneous_part(q);
      if (bq.is_zero()) continue;
      out += wedge(ap, bq);
      FormElement<S> ba = wedge(bq, ap);
      out += (p * q) % 2 ? ba : -ba;
    }
  }
  return out;
}

template <class S>
std::string FormElement<S>::str() const {
  if (terms_.empty()) return "0";
  std::string out;
  static const char* names = "xyzuvw";
  bool first = true;
  for (auto& [m, c] : terms_) {
    if (!first) out += " + ";
    first = false;
    out += "[";
    for (int i = 0; i < r_; ++i) {
      if (i) out += "; ";
      for (int j = 0; j < r_; ++j) {
        if (j) out += ", ";
        out += c(i, j).str();
      }
    }
    out += "]";
    for (int v = 0; v < d_; ++v)
      if (m & (Mask(1) << v)) out += std::string(" d") + (v < 6 ? std::string(1, names[v]) : std::to_string(v + 1));
  }
  return out;
}

using QForm = FormElement<Q>;
using DForm = FormElement<double>;

}  // namespace curvchen
