#include "curvchen/tensor.hpp"

namespace curvchen {

TensorElement graded_commutator(const TensorElement& a, const TensorElement& b) {
  a.check(b);
  // split into homogeneous parts by word length
  std::map<int, TensorElement> pa, pb;
  for (auto& [w, c] : a.terms()) pa.try_emplace(static_cast<int>(w.size()), a.dim()).first->second.add_term(w, c);
  for (auto& [w, c] : b.terms()) pb.try_emplace(static_cast<int>(w.size()), b.dim()).first->second.add_term(w, c);
  TensorElement out(a.dim());
  for (auto& [p, x] : pa)
    for (auto& [q, y] : pb) {
      out += x * y;
      TensorElement yx = y * x;
      out += (p * q) % 2 ? yx : -yx;
    }
  return out;
}

std::string TensorElement::str() const {
  if (terms_.empty()) return "0";
  std::string out;
  bool first = true;
  for (auto& [w, c] : terms_) {
    if (!first) out += " + ";
    first = false;
    out += c.get_str() + "*";
    if (w.empty()) out += "1";
    for (size_t i = 0; i < w.size(); ++i) out += (i ? "|e" : "e") + std::to_string(w[i]);
  }
  return out;
}

}  // namespace curvchen
