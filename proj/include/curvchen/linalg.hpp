#pragma once

#include <optional>
#include <vector>

#include "curvchen/scalar.hpp"

namespace curvchen {

// dense rational matrix, row-major
class QMatrix {
 public:
  QMatrix(size_t rows = 0, size_t cols = 0) : r_(rows), c_(cols), a_(rows * cols) {}
  size_t rows() const { return r_; }
  size_t cols() const { return c_; }
  Q& operator()(size_t i, size_t j) { return a_[i * c_ + j]; }
  const Q& operator()(size_t i, size_t j) const { return a_[i * c_ + j]; }
  void set_column(size_t j, const std::vector<Q>& v);
  std::vector<Q> column(size_t j) const;
  // [A | B] side by side
  static QMatrix hcat(const QMatrix& a, const QMatrix& b);

 private:
  size_t r_, c_;
  std::vector<Q> a_;
};

// reduced row echelon form in place; returns pivot columns
std::vector<size_t> rref(QMatrix& m);
size_t rank(QMatrix m);
std::vector<std::vector<Q>> nullspace(QMatrix m);
std::optional<std::vector<Q>> solve(const QMatrix& a, const std::vector<Q>& b);

}  // namespace curvchen
