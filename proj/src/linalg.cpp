#include "curvchen/linalg.hpp"

#include <stdexcept>

namespace curvchen {

void QMatrix::set_column(size_t j, const std::vector<Q>& v) {
  if (v.size() != r_) throw std::invalid_argument("set_column: length mismatch");
  for (size_t i = 0; i < r_; ++i) (*this)(i, j) = v[i];
}

std::vector<Q> QMatrix::column(size_t j) const {
  std::vector<Q> v(r_);
  for (size_t i = 0; i < r_; ++i) v[i] = (*this)(i, j);
  return v;
}

QMatrix QMatrix::hcat(const QMatrix& a, const QMatrix& b) {
  if (a.rows() != b.rows()) throw std::invalid_argument("hcat: row mismatch");
  QMatrix m(a.rows(), a.cols() + b.cols());
  for (size_t i = 0; i < a.rows(); ++i) {
    for (size_t j = 0; j < a.cols(); ++j) m(i, j) = a(i, j);
    for (size_t j = 0; j < b.cols(); ++j) m(i, a.cols() + j) = b(i, j);
  }
  return m;
}

std::vector<size_t> rref(QMatrix& m) {
  std::vector<size_t> piv;
  size_t row = 0;
  for (size_t col = 0; col < m.cols() && row < m.rows(); ++col) {
    size_t p = row;
    while (p < m.rows() && sgn(m(p, col)) == 0) ++p;
    if (p == m.rows()) continue;
    if (p != row)
      for (size_t j = 0; j < m.cols(); ++j) std::swap(m(p, j), m(row, j));
    Q inv = 1 / m(row, col);
    for (size_t j = col; j < m.cols(); ++j) m(row, j) *= inv;
    for (size_t i = 0; i < m.rows(); ++i) {
      if (i == row || sgn(m(i, col)) == 0) continue;
      Q f = m(i, col);
      for (size_t j = col; j < m.cols(); ++j) m(i, j) -= f * m(row, j);
    }
    piv.push_back(col);
    ++row;
  }
  return piv;
}

size_t rank(QMatrix m) { return rref(m).size(); }

std::vector<std::vector<Q>> nullspace(QMatrix m) {
  auto piv = rref(m);
  std::vector<bool> is_piv(m.cols(), false);
  for (size_t c : piv) is_piv[c] = true;
  std::vector<std::vector<Q>> out;
  for (size_t f = 0; f < m.cols(); ++f) {
    if (is_piv[f]) continue;
    std::vector<Q> v(m.cols(), Q(0));
    v[f] = 1;
    for (size_t r = 0; r < piv.size(); ++r) v[piv[r]] = -m(r, f);
    out.push_back(std::move(v));
  }
  return out;
}

std::optional<std::vector<Q>> solve(const QMatrix& a, const std::vector<Q>& b) {
  QMatrix aug(a.rows(), a.cols() + 1);
  for (size_t i = 0; i < a.rows(); ++i) {
    for (size_t j = 0; j < a.cols(); ++j) aug(i, j) = a(i, j);
    aug(i, a.cols()) = b.at(i);
  }
  auto piv = rref(aug);
  if (!piv.empty() && piv.back() == a.cols()) return std::nullopt;
  std::vector<Q> x(a.cols(), Q(0));
  for (size_t r = 0; r < piv.size(); ++r) x[piv[r]] = aug(r, a.cols());
  return x;
}

}  // namespace curvchen
