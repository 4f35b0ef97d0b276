#pragma once

#include <map>
#include <vector>

#include "curvchen/zigzag.hpp"

namespace curvchen {

// omega_0 ⊗ [omega_1 | ... | omega_n] ⊗ omega_{n+1}; slots hold basis keys
struct BarMonomial {
  std::vector<int> slots;
  int n() const { return static_cast<int>(slots.size()) - 2; }
  auto operator<=>(const BarMonomial&) const = default;
};

class BarElement {
 public:
  const std::map<BarMonomial, Q>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  void add(const BarMonomial& m, const Q& c);
  BarElement& operator+=(const BarElement& o);
  BarElement& operator-=(const BarElement& o);
  friend BarElement operator+(BarElement a, const BarElement& b) { return a += b; }
  friend BarElement operator-(BarElement a, const BarElement& b) { return a -= b; }
  BarElement scaled(const Q& s) const;
  bool operator==(const BarElement& o) const { return terms_ == o.terms_; }

 private:
  std::map<BarMonomial, Q> terms_;
};

struct NotCommutative : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// parity of the Koszul sign for reordering items of the given degrees by a stable sort on target
int koszul_parity(const std::vector<int>& target, const std::vector<int>& degrees);

// expand a monomial whose slots are linear combinations
BarElement bar_expand(const std::vector<LinComb>& slots, const Q& scalar);

int bar_degree(const Carrier& C, const BarMonomial& m);
BarElement bar_differential(const Carrier& C, const BarElement& x);
BarElement bar_shuffle(const Carrier& C, const BarElement& x, const BarElement& y);
BarElement col_collapse(const Carrier& C, const ZigzagElement& x);
BarElement col_collapse(const Carrier& C, const ZigzagMonomial& m);

std::string to_string(const Carrier& C, const BarElement& x);

}  // namespace curvchen
