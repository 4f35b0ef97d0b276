#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "curvchen/scalar.hpp"

namespace curvchen {

using Word = std::vector<int>;

// Element of the free tensor algebra T(V), dim V = dv; degree of a word = its length.
class TensorElement {
 public:
  TensorElement() = default;
  explicit TensorElement(int dv) : dv_(dv) {
    if (dv < 1) throw std::invalid_argument("tensor: dim V must be positive");
  }
  static TensorElement unit(int dv) { return word(dv, {}); }
  static TensorElement word(int dv, const Word& w, const Q& c = Q(1)) {
    TensorElement t(dv);
    t.add_term(w, c);
    return t;
  }

  int dim() const { return dv_; }
  const std::map<Word, Q>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  void add_term(const Word& w, const Q& c) {
    for (int l : w)
      if (l < 0 || l >= dv_) throw std::invalid_argument("tensor: letter out of range");
    if (sgn(c) == 0) return;
    auto it = terms_.find(w);
    if (it == terms_.end()) {
      terms_.emplace(w, c);
      return;
    }
    it->second += c;
    if (sgn(it->second) == 0) terms_.erase(it);
  }

  int degree() const {
    if (terms_.empty()) throw std::domain_error("degree of zero tensor is undefined");
    size_t d = terms_.begin()->first.size();
    for (auto& [w, c] : terms_)
      if (w.size() != d) throw std::domain_error("tensor is not homogeneous");
    return static_cast<int>(d);
  }
  TensorElement homogeneous_part(int p) const {
    TensorElement t(dv_);
    for (auto& [w, c] : terms_)
      if (static_cast<int>(w.size()) == p) t.terms_.emplace(w, c);
    return t;
  }

  TensorElement& operator+=(const TensorElement& o) {
    check(o);
    for (auto& [w, c] : o.terms_) add_term(w, c);
    return *this;
  }
  TensorElement& operator-=(const TensorElement& o) {
    check(o);
    for (auto& [w, c] : o.terms_) add_term(w, -c);
    return *this;
  }
  friend TensorElement operator+(TensorElement a, const TensorElement& b) { return a += b; }
  friend TensorElement operator-(TensorElement a, const TensorElement& b) { return a -= b; }
  TensorElement operator-() const { return scaled(Q(-1)); }
  TensorElement scaled(const Q& s) const {
    TensorElement t(dv_);
    if (sgn(s) == 0) return t;
    for (auto& [w, c] : terms_) t.terms_.emplace(w, c * s);
    return t;
  }
  friend TensorElement operator*(const TensorElement& a, const TensorElement& b) {
    a.check(b);
    TensorElement t(a.dv_);
    for (auto& [wa, ca] : a.terms_)
      for (auto& [wb, cb] : b.terms_) {
        Word w(wa);
        w.insert(w.end(), wb.begin(), wb.end());
        t.add_term(w, ca * cb);
      }
    return t;
  }
  bool operator==(const TensorElement& o) const { return dv_ == o.dv_ && terms_ == o.terms_; }

  std::string str() const;

  void check(const TensorElement& o) const {
    if (o.dv_ != dv_) throw std::invalid_argument("tensor: dim V mismatch");
  }

 private:
  int dv_ = 1;
  std::map<Word, Q> terms_;
};

TensorElement graded_commutator(const TensorElement& a, const TensorElement& b);

}  // namespace curvchen
