#include "curvchen/cdga.hpp"

#include <bit>

namespace curvchen {

MatrixFormCDGA::MatrixFormCDGA(int d, int r, QForm A) : d_(d), r_(r), A_(std::move(A)) {
  if (A_.dim() != d || A_.rank() != r) throw InvalidConnection("connection form has the wrong dimension or rank");
  if (!A_.is_zero() && A_.degree() != 1) throw InvalidConnection("connection form must be homogeneous of degree 1");
  R_ = exterior_derivative(A_) + wedge(A_, A_);
}

TensorCDGA::TensorCDGA(int dv, TensorElement v) : dv_(dv), v_(std::move(v)) {
  if (v_.dim() != dv) throw std::invalid_argument("tensor generator has the wrong dim V");
  if (v_.is_zero()) {
    R_ = TensorElement(dv);
    name_ = "tensor-flat";
    return;
  }
  if (v_.degree() != 1) throw InvalidConnection("tensor generator v must have degree 1");
  R_ = v_ * v_;
  name_ = "tensor";
}

std::shared_ptr<MatrixFormCDGA> make_matrix_form_cdga(int d, int r, const QForm& A) {
  return std::make_shared<MatrixFormCDGA>(d, r, A);
}

std::shared_ptr<TensorCDGA> make_tensor_algebra_cdga(int dv, const TensorElement& v) {
  if (v.is_zero()) throw InvalidConnection("tensor generator v must have degree 1");
  return std::make_shared<TensorCDGA>(dv, v);
}

std::shared_ptr<TensorCDGA> make_flat_tensor_cdga(int dv) { return std::make_shared<TensorCDGA>(dv, TensorElement(dv)); }

QForm example_connection_R2() {
  QForm A(2, 2);
  A.add_term(1u, MatrixPoly<Q>::constant(2, 2, {0, 1, -1, 0}));
  A.add_term(2u, MatrixPoly<Q>::constant(2, 2, {0, 1, 1, 0}));
  return A;
}

std::shared_ptr<MatrixFormCDGA> make_example_R2_cdga() {
  auto inst = make_matrix_form_cdga(2, 2, example_connection_R2());
  inst->set_name("example-R2");
  return inst;
}

namespace {

Q small_rational(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> num(-3, 3), den(1, 2);
  int p = num(rng);
  if (p == 0) p = 1;
  Q q(p, den(rng));
  q.canonicalize();  // mpq equality compares raw num/den
  return q;
}

Polynomial<Q> random_poly(std::mt19937_64& rng, int d, int max_deg, int max_terms) {
  std::uniform_int_distribution<int> nt(1, max_terms), ex(0, max_deg);
  Polynomial<Q> p(d);
  int n = nt(rng);
  for (int t = 0; t < n; ++t) {
    Exponent e(d, 0);
    int budget = ex(rng);
    for (int k = 0; k < budget; ++k) e[std::uniform_int_distribution<int>(0, d - 1)(rng)] += 1;
    p.add_term(e, small_rational(rng));
  }
  return p;
}

}  // namespace

QForm random_form(std::mt19937_64& rng, int d, int r, int form_deg, int max_poly_deg, int max_terms) {
  std::vector<Mask> masks;
  for (Mask m = 0; m < (Mask(1) << d); ++m)
    if (std::popcount(m) == form_deg) masks.push_back(m);
  if (masks.empty()) throw std::invalid_argument("random_form: form degree exceeds dimension");
  for (;;) {
    QForm f(d, r);
    std::uniform_int_distribution<int> nt(1, max_terms), mi(0, static_cast<int>(masks.size()) - 1), ri(0, r - 1);
    int n = nt(rng);
    for (int t = 0; t < n; ++t) {
      MatrixPoly<Q> c(d, r);
      c(ri(rng), ri(rng)) = random_poly(rng, d, max_poly_deg, 2);
      f.add_term(masks[mi(rng)], c);
    }
    if (!f.is_zero()) return f;
  }
}

QForm random_homogeneous_form(std::mt19937_64& rng, int d, int r, int max_form_deg, int max_poly_deg) {
  int deg = std::uniform_int_distribution<int>(0, std::min(max_form_deg, d))(rng);
  return random_form(rng, d, r, deg, max_poly_deg);
}

TensorElement random_tensor(std::mt19937_64& rng, int dv, int deg, int max_terms) {
  for (;;) {
    TensorElement t(dv);
    std::uniform_int_distribution<int> nt(1, max_terms), li(0, dv - 1);
    int n = nt(rng);
    for (int k = 0; k < n; ++k) {
      Word w(static_cast<size_t>(deg));
      for (auto& l : w) l = li(rng);
      t.add_term(w, small_rational(rng));
    }
    if (!t.is_zero()) return t;
  }
}

TensorElement random_homogeneous_tensor(std::mt19937_64& rng, int dv, int max_deg) {
  return random_tensor(rng, dv, std::uniform_int_distribution<int>(0, max_deg)(rng));
}

}  // namespace curvchen
