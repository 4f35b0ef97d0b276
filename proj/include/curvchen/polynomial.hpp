#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "curvchen/scalar.hpp"

namespace curvchen {

using Exponent = std::vector<int>;

template <class S>
class Polynomial {
 public:
  explicit Polynomial(int d = 0) : d_(d) {}
  static Polynomial constant(int d, const S& c) {
    Polynomial p(d);
    p.add_term(Exponent(d, 0), c);
    return p;
  }
  static Polynomial variable(int d, int var) {
    Exponent e(d, 0);
    e.at(var) = 1;
    Polynomial p(d);
    p.add_term(e, S(1));
    return p;
  }

  int dim() const { return d_; }
  const std::map<Exponent, S>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  void add_term(const Exponent& e, const S& c) {
    if (static_cast<int>(e.size()) != d_) throw std::invalid_argument("polynomial: exponent length mismatch");
    if (ScalarTraits<S>::is_zero(c)) return;
    auto it = terms_.find(e);
    if (it == terms_.end()) {
      terms_.emplace(e, c);
      return;
    }
    it->second += c;
    if (ScalarTraits<S>::is_zero(it->second)) terms_.erase(it);
  }

  int total_degree() const {
    int best = -1;
    for (auto& [e, c] : terms_) {
      int s = 0;
      for (int v : e) s += v;
      best = std::max(best, s);
    }
    return best;
  }

  Polynomial& operator+=(const Polynomial& o) {
    check(o);
    for (auto& [e, c] : o.terms_) add_term(e, c);
    return *this;
  }
  Polynomial& operator-=(const Polynomial& o) {
    check(o);
    for (auto& [e, c] : o.terms_) add_term(e, -c);
    return *this;
  }
  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
  friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
  Polynomial operator-() const {
    Polynomial r(d_);
    for (auto& [e, c] : terms_) r.terms_.emplace(e, -c);
    return r;
  }
  Polynomial scaled(const S& s) const {
    Polynomial r(d_);
    if (ScalarTraits<S>::is_zero(s)) return r;
    for (auto& [e, c] : terms_) r.terms_.emplace(e, c * s);
    return r;
  }
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
    a.check(b);
    Polynomial r(a.d_);
    for (auto& [ea, ca] : a.terms_)
      for (auto& [eb, cb] : b.terms_) {
        Exponent e(ea);
        for (int i = 0; i < a.d_; ++i) e[i] += eb[i];
        r.add_term(e, ca * cb);
      }
    return r;
  }
  bool operator==(const Polynomial& o) const { return d_ == o.d_ && terms_ == o.terms_; }

  Polynomial partial(int var) const {
    Polynomial r(d_);
    for (auto& [e, c] : terms_) {
      if (e[var] == 0) continue;
      Exponent f(e);
      f[var] -= 1;
      r.add_term(f, c * S(e[var]));
    }
    return r;
  }

  double eval(const std::vector<double>& x) const {
    double acc = 0.0;
    for (auto& [e, c] : terms_) {
      double m = ScalarTraits<S>::to_double(c);
      for (int i = 0; i < d_; ++i)
        for (int k = 0; k < e[i]; ++k) m *= x[i];
      acc += m;
    }
    return acc;
  }

  Polynomial<double> to_double() const {
    Polynomial<double> r(d_);
    for (auto& [e, c] : terms_) r.add_term(e, ScalarTraits<S>::to_double(c));
    return r;
  }

  std::string str() const;

 private:
  void check(const Polynomial& o) const {
    if (o.d_ != d_) throw std::invalid_argument("polynomial: dimension mismatch");
  }
  int d_;
  std::map<Exponent, S> terms_;
};

template <class S>
std::string Polynomial<S>::str() const {
  if (terms_.empty()) return "0";
  static const char* names = "xyzuvw";
  std::string out;
  bool first = true;
  for (auto& [e, c] : terms_) {
    std::string cs = ScalarTraits<S>::str(c);
    if (!first) out += (cs[0] == '-') ? " - " : " + ";
    else if (cs[0] == '-') out += "-";
    if (cs[0] == '-') cs = cs.substr(1);
    first = false;
    bool mono = false;
    std::string m;
    for (int i = 0; i < d_; ++i) {
      if (!e[i]) continue;
      if (mono) m += "*";
      m += (i < 6) ? std::string(1, names[i]) : ("x" + std::to_string(i + 1));
      if (e[i] > 1) m += "^" + std::to_string(e[i]);
      mono = true;
    }
    if (!mono) out += cs;
    else if (cs == "1") out += m;
    else out += cs + "*" + m;
  }
  return out;
}

}  // namespace curvchen
