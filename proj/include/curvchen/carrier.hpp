#pragma once

#include <algorithm>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <utility>
#include <vector>

#include "curvchen/cdga.hpp"

namespace curvchen {

// sparse combination of interned basis elements, sorted by key, no zero coefficients
using LinComb = std::vector<std::pair<int, Q>>;

LinComb lc_add(const LinComb& a, const LinComb& b, const Q& scale_b = Q(1));
LinComb lc_scale(const LinComb& a, const Q& s);

// Basis-level view of a curved dga used by the zigzag machinery. The unit is
// always one of the basis elements so that unit slots are recognisable after
// multilinear expansion.
class Carrier {
 public:
  virtual ~Carrier() = default;
  virtual std::string name() const = 0;
  virtual int unit_key() const = 0;
  virtual int degree(int key) const = 0;
  virtual LinComb product(int a, int b) const = 0;
  virtual LinComb nabla(int a) const = 0;
  virtual const LinComb& curvature() const = 0;
  virtual bool commutative() const = 0;
  virtual std::string label(int key) const = 0;
  bool flat() const { return curvature().empty(); }
  LinComb product(const LinComb& a, const LinComb& b) const;
};

struct FormBasis {
  Mask mask = 0;
  Exponent exps;
  int i = 0, j = 0;  // (0,0) on the constant 0-form slot stands for the identity
  auto operator<=>(const FormBasis&) const = default;
};

std::vector<std::pair<FormBasis, Q>> decompose(const QForm& f);
QForm compose(const FormBasis& b, int d, int r);
int basis_degree(const FormBasis& b);
inline std::vector<std::pair<Word, Q>> decompose(const TensorElement& t) { return {t.terms().begin(), t.terms().end()}; }
inline int basis_degree(const Word& w) { return static_cast<int>(w.size()); }

template <class E>
struct BasisOf;
template <>
struct BasisOf<QForm> {
  using type = FormBasis;
};
template <>
struct BasisOf<TensorElement> {
  using type = Word;
};

template <class E>
class CarrierFor final : public Carrier {
 public:
  using Basis = typename BasisOf<E>::type;
  using Carrier::product;

  explicit CarrierFor(std::shared_ptr<const CurvedDGA<E>> inst) : inst_(std::move(inst)) {
    E u = inst_->unit();
    LinComb ul = lin(u);
    if (ul.size() != 1 || ul[0].second != 1) throw std::logic_error("carrier: unit must be a basis element");
    unit_ = ul[0].first;
    R_ = lin(inst_->curvature());
  }

  std::string name() const override { return inst_->name(); }
  int unit_key() const override { return unit_; }
  int degree(int key) const override {
    std::lock_guard lk(mu_);
    return degrees_.at(key);
  }
  const LinComb& curvature() const override { return R_; }
  bool commutative() const override { return inst_->commutative(); }
  std::string label(int key) const override { return element(key).str(); }

  LinComb product(int a, int b) const override {
    {
      std::lock_guard lk(mu_);
      auto it = prod_cache_.find({a, b});
      if (it != prod_cache_.end()) return it->second;
    }
    LinComb out = lin(element(a) * element(b));
    std::lock_guard lk(mu_);
    prod_cache_.emplace(std::make_pair(a, b), out);
    return out;
  }
  LinComb nabla(int a) const override {
    {
      std::lock_guard lk(mu_);
      auto it = nabla_cache_.find(a);
      if (it != nabla_cache_.end()) return it->second;
    }
    LinComb out = lin(inst_->nabla(element(a)));
    std::lock_guard lk(mu_);
    nabla_cache_.emplace(a, out);
    return out;
  }

  LinComb lin(const E& e) const {
    LinComb out;
    for (auto& [b, c] : decompose(e)) out.emplace_back(intern(b), c);
    std::sort(out.begin(), out.end(), [](auto& x, auto& y) { return x.first < y.first; });
    return out;
  }
  E element(int key) const {
    Basis b;
    {
      std::lock_guard lk(mu_);
      b = basis_.at(key);
    }
    return make(b);
  }
  E element(const LinComb& l) const {
    E out = inst_->zero();
    for (auto& [k, c] : l) out += element(k).scaled(c);
    return out;
  }
  const CurvedDGA<E>& instance() const { return *inst_; }
  std::shared_ptr<const CurvedDGA<E>> instance_ptr() const { return inst_; }

 private:
  int intern(const Basis& b) const {
    std::lock_guard lk(mu_);
    auto it = ids_.find(b);
    if (it != ids_.end()) return it->second;
    int id = static_cast<int>(basis_.size());
    ids_.emplace(b, id);
    basis_.push_back(b);
    degrees_.push_back(basis_degree(b));
    return id;
  }
  E make(const Basis& b) const {
    if constexpr (std::is_same_v<E, QForm>) {
      E z = inst_->zero();
      return compose(b, z.dim(), z.rank());
    } else {
      return TensorElement::word(inst_->zero().dim(), b);
    }
  }

  std::shared_ptr<const CurvedDGA<E>> inst_;
  int unit_ = 0;
  LinComb R_;
  mutable std::mutex mu_;
  mutable std::map<Basis, int> ids_;
  mutable std::vector<Basis> basis_;
  mutable std::vector<int> degrees_;
  mutable std::map<std::pair<int, int>, LinComb> prod_cache_;
  mutable std::map<int, LinComb> nabla_cache_;
};

using FormCarrier = CarrierFor<QForm>;
using TensorCarrier = CarrierFor<TensorElement>;

}  // namespace curvchen
