#pragma once

#include <functional>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "curvchen/form.hpp"
#include "curvchen/tensor.hpp"

namespace curvchen {

struct InvalidConnection : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

template <class E>
class CurvedDGA {
 public:
  virtual ~CurvedDGA() = default;
  virtual std::string name() const = 0;
  virtual E unit() const = 0;
  virtual E zero() const = 0;
  virtual const E& curvature() const = 0;
  virtual E nabla(const E& a) const = 0;
  virtual bool commutative() const = 0;
  virtual bool flat() const { return curvature().is_zero(); }

  E multiply(const E& a, const E& b) const { return a * b; }
  E commutator(const E& a, const E& b) const { return graded_commutator(a, b); }
  int degree(const E& a) const { return a.degree(); }
};

// Omega(R^d, Mat_r) with nabla = d + [A,-] and R = dA + A∧A
class MatrixFormCDGA final : public CurvedDGA<QForm> {
 public:
  MatrixFormCDGA(int d, int r, QForm A);
  std::string name() const override { return name_; }
  QForm unit() const override { return QForm::unit(d_, r_); }
  QForm zero() const override { return QForm::zero(d_, r_); }
  const QForm& curvature() const override { return R_; }
  QForm nabla(const QForm& a) const override { return exterior_derivative(a) + graded_commutator(A_, a); }
  bool commutative() const override { return r_ == 1; }

  int dim() const { return d_; }
  int rank() const { return r_; }
  const QForm& connection() const { return A_; }
  void set_name(std::string s) { name_ = std::move(s); }

 private:
  int d_, r_;
  QForm A_, R_;
  std::string name_ = "matrix-forms";
};

// (T(V), [v,-], v⊗v); v = 0 gives the plain algebra with zero differential and curvature
class TensorCDGA final : public CurvedDGA<TensorElement> {
 public:
  TensorCDGA(int dv, TensorElement v);
  std::string name() const override { return name_; }
  TensorElement unit() const override { return TensorElement::unit(dv_); }
  TensorElement zero() const override { return TensorElement(dv_); }
  const TensorElement& curvature() const override { return R_; }
  TensorElement nabla(const TensorElement& a) const override { return graded_commutator(v_, a); }
  bool commutative() const override { return false; }

  int dim() const { return dv_; }
  const TensorElement& generator() const { return v_; }

 private:
  int dv_;
  TensorElement v_, R_;
  std::string name_;
};

std::shared_ptr<MatrixFormCDGA> make_matrix_form_cdga(int d, int r, const QForm& A);
std::shared_ptr<TensorCDGA> make_tensor_algebra_cdga(int dv, const TensorElement& v);
// same algebra with nabla = 0, R = 0
std::shared_ptr<TensorCDGA> make_flat_tensor_cdga(int dv);

// the rank-2 connection on R^2 with A = [[0,1],[-1,0]]dx + [[0,1],[1,0]]dy
QForm example_connection_R2();
std::shared_ptr<MatrixFormCDGA> make_example_R2_cdga();

// random homogeneous elements; poly degree and form degree bounded
QForm random_form(std::mt19937_64& rng, int d, int r, int form_deg, int max_poly_deg = 2, int max_terms = 3);
QForm random_homogeneous_form(std::mt19937_64& rng, int d, int r, int max_form_deg = 2, int max_poly_deg = 2);
TensorElement random_tensor(std::mt19937_64& rng, int dv, int deg, int max_terms = 3);
TensorElement random_homogeneous_tensor(std::mt19937_64& rng, int dv, int max_deg = 2);

struct AxiomReport {
  int trials = 0;
  bool leibniz = true;
  bool nabla_squared = true;
  bool bianchi = true;
  bool unit = true;
  bool linear = true;
  std::string counterexample;
  bool ok() const { return leibniz && nabla_squared && bianchi && unit && linear; }
};

template <class E>
using Sampler = std::function<E(std::mt19937_64&)>;

template <class E>
AxiomReport check_curved_dga_axioms(const CurvedDGA<E>& inst, const Sampler<E>& sample, int trials,
                                    std::uint64_t seed = 1) {
  std::mt19937_64 rng(seed);
  AxiomReport rep;
  rep.trials = trials;
  auto fail = [&](bool& flag, const std::string& what) {
    if (flag && rep.counterexample.empty()) rep.counterexample = what;
    flag = false;
  };
  const E& R = inst.curvature();
  if (!inst.nabla(R).is_zero()) fail(rep.bianchi, "nabla(R) = " + inst.nabla(R).str());
  if (!inst.nabla(inst.unit()).is_zero()) fail(rep.unit, "nabla(1) != 0");
  for (int t = 0; t < trials; ++t) {
    E a = sample(rng), b = sample(rng);
    int da = a.degree();
    E lhs = inst.nabla(a * b);
    E rhs = inst.nabla(a) * b;
    E second = a * inst.nabla(b);
    rhs += da % 2 ? -second : second;
    if (!(lhs == rhs)) fail(rep.leibniz, "a = " + a.str() + " ; b = " + b.str());
    if (!(inst.nabla(inst.nabla(a)) == graded_commutator(R, a))) fail(rep.nabla_squared, "a = " + a.str());
    Q lambda(t % 7 - 3, 2);
    lambda.canonicalize();
    if (!(inst.nabla(a + b.scaled(lambda)) == inst.nabla(a) + inst.nabla(b).scaled(lambda)))
      fail(rep.linear, "a = " + a.str());
  }
  return rep;
}

template <class EA, class EB>
struct DGAMorphismWitness {
  const CurvedDGA<EA>* source = nullptr;
  const CurvedDGA<EB>* target = nullptr;
  std::function<EB(const EA&)> map;
  std::vector<EA> test_set;
};

// empty when every condition holds on the witness's test set
template <class EA, class EB>
std::string morphism_failure(const DGAMorphismWitness<EA, EB>& w) {
  const auto& A = *w.source;
  const auto& B = *w.target;
  const auto& f = w.map;
  if (!(f(A.curvature()) == B.curvature())) return "f(R) != R'";
  if (!(f(A.unit()) == B.unit())) return "f(1) != 1";
  for (size_t i = 0; i < w.test_set.size(); ++i) {
    const EA& a = w.test_set[i];
    EB fa = f(a);
    if (!fa.is_zero() && fa.degree() != a.degree()) return "degree not preserved on test element " + std::to_string(i);
    if (!(f(A.nabla(a)) == B.nabla(fa))) return "f(nabla a) != nabla' f(a) on test element " + std::to_string(i);
    for (size_t j = 0; j < w.test_set.size(); ++j)
      if (!(f(a * w.test_set[j]) == fa * f(w.test_set[j])))
        return "f(ab) != f(a)f(b) on test elements " + std::to_string(i) + "," + std::to_string(j);
  }
  return {};
}

template <class EA, class EB>
bool check_morphism(const DGAMorphismWitness<EA, EB>& w) {
  return morphism_failure(w).empty();
}

}  // namespace curvchen
