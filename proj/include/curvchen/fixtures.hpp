#pragma once

#include <json.hpp>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "curvchen/cdga.hpp"
#include "curvchen/pathspace.hpp"
#include "curvchen/zigzag.hpp"

namespace curvchen {

using json = nlohmann::json;

struct FixtureError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// "3/2*x^2*y - z + 1"; variables x y z u v w, or x1..x16 (1-based)
Polynomial<Q> parse_polynomial(const std::string& s, int d);

// A form is "1" / "unit", "R" (the instance curvature) or a list of terms
// {"gens": "dx^dy" or [0, 1], "matrix": [[poly, ...], ...]} / {"gens": ..., "scalar": poly}.
QForm form_from_json(const json& j, int d, int r, const QForm* curvature = nullptr);
json form_to_json(const QForm& f);
// "1" / "unit", "R", or a list of {"word": [letters], "coeff": rational}
TensorElement tensor_from_json(const json& j, int dv, const TensorElement* curvature = nullptr);
json tensor_to_json(const TensorElement& t);

Path path_from_json(const json& j);
TangentField field_from_json(const json& j);
Vec vec_from_json(const json& j);

// the instance selector used by configs and fixtures
struct LoadedInstance {
  std::string label;
  std::shared_ptr<MatrixFormCDGA> forms;
  std::shared_ptr<TensorCDGA> tensor;
};
// {"type": "example-R2"} | {"type": "matrix-form", "d", "r", "A"} | {"type": "flat-scalar", "d"}
// | {"type": "tensor", "dv", "v"} | {"type": "flat-tensor", "dv"}
LoadedInstance instance_from_json(const json& j);

// Grid form {k, n, scalar, entries: {"i,p": element}}; absent entries are units, "0,0" is x_(0,0).
template <class E>
ZigzagElement zigzag_from_json(const CarrierFor<E>& C, const json& j);

// serialise one monomial of a grid (entries as strings) for reports and reproducers
json grid_to_json(const Carrier& C, const ZigzagMonomial& m);

}  // namespace curvchen
