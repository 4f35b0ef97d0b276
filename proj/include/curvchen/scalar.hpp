#pragma once

#include <gmpxx.h>

#include <cmath>
#include <string>

namespace curvchen {

using Q = mpq_class;

// Scalar glue so Polynomial/FormElement can be instantiated over Q or double.
template <class S>
struct ScalarTraits;

template <>
struct ScalarTraits<Q> {
  static bool is_zero(const Q& q) { return sgn(q) == 0; }
  static double to_double(const Q& q) { return q.get_d(); }
  static std::string str(const Q& q) { return q.get_str(); }
  static Q from_int(long v) { return Q(v); }
};

template <>
struct ScalarTraits<double> {
  static bool is_zero(double v) { return v == 0.0; }
  static double to_double(double v) { return v; }
  static std::string str(double v) { return std::to_string(v); }
  static double from_int(long v) { return static_cast<double>(v); }
};

inline int sign_of_parity(long p) { return (p % 2 == 0) ? 1 : -1; }

inline Q parse_rational(const std::string& s) {
  Q q(s);
  q.canonicalize();
  return q;
}

}  // namespace curvchen
