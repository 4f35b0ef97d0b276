#include "curvchen/fixtures.hpp"

#include <cctype>
#include <cstdio>

namespace curvchen {

namespace {

class PolyParser {
 public:
  PolyParser(const std::string& s, int d) : s_(s), d_(d) {}

  Polynomial<Q> parse() {
    Polynomial<Q> out(d_);
    skip();
    if (pos_ == s_.size()) throw FixtureError("empty polynomial");
    bool first = true;
    while (pos_ < s_.size()) {
      int sign = 1;
      if (peek() == '+' || peek() == '-') {
        sign = get() == '-' ? -1 : 1;
      } else if (!first) {
        fail("expected + or -");
      }
      first = false;
      auto [e, c] = term();
      out.add_term(e, c * sign);
    }
    return out;
  }

 private:
  std::pair<Exponent, Q> term() {
    Exponent e(static_cast<size_t>(d_), 0);
    Q c(1);
    bool any = false;
    for (;;) {
      skip();
      if (pos_ < s_.size() && (std::isdigit(static_cast<unsigned char>(peek())) || peek() == '.')) {
        c *= number();
      } else if (pos_ < s_.size() && std::isalpha(static_cast<unsigned char>(peek()))) {
        int v = variable();
        int k = 1;
        skip();
        if (pos_ < s_.size() && peek() == '^') {
          get();
          skip();
          size_t st = pos_;
          while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(peek()))) ++pos_;
          if (st == pos_) fail("exponent expected");
          k = std::stoi(s_.substr(st, pos_ - st));
        }
        e[v] += k;
      } else {
        fail("factor expected");
      }
      any = true;
      skip();
      if (pos_ < s_.size() && peek() == '*') {
        get();
        continue;
      }
      break;
    }
    if (!any) fail("empty term");
    return {e, c};
  }

  Q number() {
    size_t st = pos_;
    while (pos_ < s_.size() && (std::isdigit(static_cast<unsigned char>(peek())) || peek() == '/')) ++pos_;
    if (pos_ < s_.size() && peek() == '.') fail("decimals are not exact; write a fraction");
    try {
      return parse_rational(s_.substr(st, pos_ - st));
    } catch (const std::exception&) {
      fail("bad rational");
    }
  }

  int variable() {
    static const std::string names = "xyzuvw";
    char ch = get();
    if (ch == 'x' && pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(peek()))) {
      size_t st = pos_;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(peek()))) ++pos_;
      int v = std::stoi(s_.substr(st, pos_ - st)) - 1;
      if (v < 0 || v >= d_) fail("variable out of range");
      return v;
    }
    auto at = names.find(ch);
    if (at == std::string::npos || static_cast<int>(at) >= d_) fail(std::string("unknown variable '") + ch + "'");
    return static_cast<int>(at);
  }

  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  char peek() const { return s_[pos_]; }
  char get() { return s_[pos_++]; }
  [[noreturn]] void fail(const std::string& what) const {
    throw FixtureError("polynomial \"" + s_ + "\" at " + std::to_string(pos_) + ": " + what);
  }

  const std::string& s_;
  int d_;
  size_t pos_ = 0;
};

Mask gens_from_json(const json& g, int d) {
  Mask m = 0;
  auto set = [&](int v) {
    if (v < 0 || v >= d) throw FixtureError("generator out of range");
    if (m & (Mask(1) << v)) throw FixtureError("repeated generator");
    m |= Mask(1) << v;
  };
  if (g.is_array()) {
    for (auto& v : g) set(v.get<int>());
    return m;
  }
  std::string s = g.get<std::string>();
  if (s.empty() || s == "1") return 0;
  static const std::string names = "xyzuvw";
  size_t i = 0;
  while (i < s.size()) {
    if (s[i] == '^' || s[i] == ' ') {
      ++i;
      continue;
    }
    if (s[i] != 'd' || i + 1 >= s.size()) throw FixtureError("bad generator list \"" + s + "\"");
    ++i;
    if (s[i] == 'x' && i + 1 < s.size() && std::isdigit(static_cast<unsigned char>(s[i + 1]))) {
      size_t st = ++i;
      while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
      set(std::stoi(s.substr(st, i - st)) - 1);
    } else {
      auto at = names.find(s[i++]);
      if (at == std::string::npos) throw FixtureError("bad generator list \"" + s + "\"");
      set(static_cast<int>(at));
    }
  }
  return m;
}

std::string gens_to_string(Mask m) {
  static const std::string names = "xyzuvw";
  std::string s;
  for (int v = 0; v < 16; ++v)
    if (m & (Mask(1) << v)) {
      if (!s.empty()) s += "^";
      s += "d" + (v < 6 ? std::string(1, names[v]) : "x" + std::to_string(v + 1));
    }
  return s.empty() ? "1" : s;
}

Q rational_from_json(const json& j) {
  if (j.is_number_integer()) return Q(j.get<long>());
  if (j.is_string()) return parse_rational(j.get<std::string>());
  throw FixtureError("rational must be an integer or a string like \"3/4\"");
}

double number(const json& j, const char* key) {
  if (!j.contains(key)) throw FixtureError(std::string("missing \"") + key + "\"");
  return j.at(key).get<double>();
}

bool is_unit_token(const json& j) { return j.is_string() && (j == "1" || j == "unit"); }

}  // namespace

Polynomial<Q> parse_polynomial(const std::string& s, int d) { return PolyParser(s, d).parse(); }

QForm form_from_json(const json& j, int d, int r, const QForm* curvature) {
  if (is_unit_token(j)) return QForm::unit(d, r);
  if (j.is_string() && j == "R") {
    if (!curvature) throw FixtureError("\"R\" needs an instance curvature");
    return *curvature;
  }
  if (j.is_string() && j == "0") return QForm(d, r);
  if (!j.is_array()) throw FixtureError("form must be \"1\", \"R\" or a list of terms");
  QForm out(d, r);
  for (auto& t : j) {
    Mask m = gens_from_json(t.value("gens", json("1")), d);
    MatrixPoly<Q> M(d, r);
    if (t.contains("scalar")) {
      Polynomial<Q> p = parse_polynomial(t.at("scalar").get<std::string>(), d);
      for (int i = 0; i < r; ++i) M(i, i) = p;
    } else if (t.contains("matrix")) {
      auto& rows = t.at("matrix");
      if (!rows.is_array() || static_cast<int>(rows.size()) != r) throw FixtureError("matrix must have r rows");
      for (int i = 0; i < r; ++i) {
        if (static_cast<int>(rows[i].size()) != r) throw FixtureError("matrix must have r columns");
        for (int k = 0; k < r; ++k) M(i, k) = parse_polynomial(rows[i][k].get<std::string>(), d);
      }
    } else {
      throw FixtureError("form term needs \"matrix\" or \"scalar\"");
    }
    out.add_term(m, M);
  }
  return out;
}

json form_to_json(const QForm& f) {
  json out = json::array();
  for (auto& [m, M] : f.terms()) {
    json rows = json::array();
    for (int i = 0; i < f.rank(); ++i) {
      json row = json::array();
      for (int k = 0; k < f.rank(); ++k) row.push_back(M(i, k).str());
      rows.push_back(row);
    }
    out.push_back({{"gens", gens_to_string(m)}, {"matrix", rows}});
  }
  return out;
}

TensorElement tensor_from_json(const json& j, int dv, const TensorElement* curvature) {
  if (is_unit_token(j)) return TensorElement::unit(dv);
  if (j.is_string() && j == "R") {
    if (!curvature) throw FixtureError("\"R\" needs an instance curvature");
    return *curvature;
  }
  if (!j.is_array()) throw FixtureError("tensor must be \"1\", \"R\" or a list of {word, coeff}");
  TensorElement out(dv);
  for (auto& t : j) out.add_term(t.at("word").get<Word>(), rational_from_json(t.value("coeff", json(1))));
  return out;
}

json tensor_to_json(const TensorElement& t) {
  json out = json::array();
  for (auto& [w, c] : t.terms()) out.push_back({{"word", w}, {"coeff", c.get_str()}});
  return out;
}

Vec vec_from_json(const json& j) {
  if (!j.is_array() || j.empty()) throw FixtureError("vector must be a nonempty list of numbers");
  Vec v(static_cast<long>(j.size()));
  for (size_t i = 0; i < j.size(); ++i) v(static_cast<long>(i)) = j[i].get<double>();
  return v;
}

Path path_from_json(const json& j) {
  const std::string type = j.at("type").get<std::string>();
  if (type == "line") return Path::line(vec_from_json(j.at("x0")), vec_from_json(j.at("v")));
  if (type == "constant") return Path::constant(vec_from_json(j.at("x0")));
  if (type == "circle_arc") {
    auto th = j.at("theta");
    return Path::circle_arc(vec_from_json(j.at("centre")), number(j, "radius"), th.at(0).get<double>(),
                            th.at(1).get<double>());
  }
  if (type == "polynomial") {
    std::vector<Vec> cs;
    for (auto& c : j.at("coeffs")) cs.push_back(vec_from_json(c));
    return Path::polynomial(cs);
  }
  if (type == "samples") {
    std::vector<Vec> pts;
    for (auto& c : j.at("points")) pts.push_back(vec_from_json(c));
    return Path::from_samples(pts);
  }
  throw FixtureError("unknown path type \"" + type + "\"");
}

TangentField field_from_json(const json& j) {
  const std::string type = j.at("type").get<std::string>();
  TangentField f;
  if (type == "constant") {
    f = TangentField::constant(vec_from_json(j.at("v")));
  } else if (type == "monomial") {
    f = TangentField::monomial(vec_from_json(j.at("v")), j.value("t0", 0.0), j.value("k", 1));
  } else if (type == "bump") {
    f = TangentField::bump(vec_from_json(j.at("v")), number(j, "centre"), number(j, "width"));
  } else if (type == "wave") {
    f = TangentField::wave(vec_from_json(j.at("v")), number(j, "freq"), j.value("phase", 0.0));
  } else if (type == "sum") {
    auto& ts = j.at("terms");
    if (!ts.is_array() || ts.empty()) throw FixtureError("sum field needs terms");
    f = field_from_json(ts[0]);
    for (size_t i = 1; i < ts.size(); ++i) f = f + field_from_json(ts[i]);
  } else {
    throw FixtureError("unknown field type \"" + type + "\"");
  }
  if (j.contains("scale")) f = f.scaled(j.at("scale").get<double>());
  return f;
}

LoadedInstance instance_from_json(const json& j) {
  const std::string type = j.is_string() ? j.get<std::string>() : j.at("type").get<std::string>();
  LoadedInstance out;
  out.label = type;
  if (type == "example-R2") {
    out.forms = make_example_R2_cdga();
  } else if (type == "flat-scalar") {
    int d = j.is_object() ? j.value("d", 2) : 2;
    out.forms = make_matrix_form_cdga(d, 1, QForm(d, 1));
    out.forms->set_name("flat-scalar-R" + std::to_string(d));
  } else if (type == "matrix-form") {
    int d = j.at("d").get<int>(), r = j.at("r").get<int>();
    out.forms = make_matrix_form_cdga(d, r, form_from_json(j.at("A"), d, r));
    out.forms->set_name(j.value("name", std::string("matrix-form")));
  } else if (type == "tensor") {
    int dv = j.at("dv").get<int>();
    out.tensor = make_tensor_algebra_cdga(dv, tensor_from_json(j.at("v"), dv));
  } else if (type == "flat-tensor") {
    int dv = j.is_object() ? j.value("dv", 2) : 2;
    out.tensor = make_flat_tensor_cdga(dv);
  } else {
    throw FixtureError("unknown instance type \"" + type + "\"");
  }
  return out;
}

template <class E>
ZigzagElement zigzag_from_json(const CarrierFor<E>& C, const json& j) {
  const int k = j.at("k").get<int>(), n = j.at("n").get<int>();
  if (k < 2 || k % 2) throw FixtureError("k must be even and positive");
  if (n < 0) throw FixtureError("n must be nonnegative");
  const auto& inst = C.instance();
  E R = inst.curvature();
  auto parse = [&](const json& e) {
    if constexpr (std::is_same_v<E, QForm>) {
      E z = inst.zero();
      return form_from_json(e, z.dim(), z.rank(), &R);
    } else {
      return tensor_from_json(e, inst.zero().dim(), &R);
    }
  };
  std::vector<E> entries(static_cast<size_t>(1 + k * (n + 1)), inst.unit());
  if (j.contains("entries")) {
    for (auto& [key, val] : j.at("entries").items()) {
      int i = -1, p = -1;
      if (std::sscanf(key.c_str(), "%d,%d", &i, &p) != 2) throw FixtureError("entry key must be \"i,p\"");
      size_t at;
      if (i == 0 && p == 0)
        at = 0;
      else if (i >= 1 && i <= k && p >= 1 && p <= n + 1)
        at = 1 + static_cast<size_t>((i - 1) * (n + 1) + (p - 1));
      else
        throw FixtureError("entry (" + key + ") outside the grid");
      entries[at] = parse(val);
    }
  }
  return make_zigzag(C, k, n, entries, rational_from_json(j.value("scalar", json(1))));
}

template ZigzagElement zigzag_from_json<QForm>(const FormCarrier&, const json&);
template ZigzagElement zigzag_from_json<TensorElement>(const TensorCarrier&, const json&);

json grid_to_json(const Carrier& C, const ZigzagMonomial& m) {
  json entries = json::object();
  const int u = C.unit_key();
  if (m.slots[0] != u) entries["0,0"] = C.label(m.slots[0]);
  for (int i = 1; i <= m.k; ++i)
    for (int p = 1; p <= m.n + 1; ++p)
      if (m.at(i, p) != u) entries[std::to_string(i) + "," + std::to_string(p)] = C.label(m.at(i, p));
  return {{"k", m.k}, {"n", m.n}, {"scalar", m.scalar.get_str()}, {"entries", entries}};
}

}  // namespace curvchen
