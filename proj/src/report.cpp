#include "curvchen/report.hpp"

#include <Eigen/Core>
#include <boost/version.hpp>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <gmp.h>

#include "curvchen/zigzag.hpp"

namespace curvchen {

bool Report::passed() const {
  for (auto& c : checks)
    if (!c.passed) return false;
  return true;
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 0x100000001b3ull;
  }
  return h;
}

const std::string& sign_conventions() {
  // keep in step with SIGNS.md; any edit here changes every report digest
  static const std::string text = [] {
    std::string s;
    s += "wedge: sorted generators, sign = (-1)^inversions\n";
    s += "commutator: [a,b] = ab - (-1)^{|a||b|} ba\n";
    s += "nabla_z: (-1)^{n+beta}, beta = degree sum strictly before the slot in path order\n";
    s += "b_z: b_l with (-1)^{n+l}, l = 0..n, columns l and l+1 merge\n";
    s += "c_z: (-1)^{n+l+1+j}, R inserted on row j between columns l-1 and l\n";
    s += "shuffle: (-1)^{|sigma| + (|x|-n)m}, x's word before y's word\n";
    s += "homotopy: id - eta.alpha = " + std::to_string(kHomotopySign) + " * (D_z s + s D_z)\n";
    s += "transport: P' = -A(gamma')P, P_{a->b} = U(b)U(a)^{-1}\n";
    s += "chen: coefficient of dt_1..dt_n theta_1..theta_q, fibre generators first\n";
    s += "fibre integration: int_F dt ^ beta = beta\n";
    return s;
  }();
  return text;
}

std::string sign_convention_digest() {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(sign_conventions())));
  return buf;
}

nlohmann::ordered_json environment_metadata() {
  nlohmann::ordered_json env;
#if defined(__clang__)
  env["compiler"] = std::string("clang ") + __clang_version__;
#elif defined(__GNUC__)
  env["compiler"] = std::string("gcc ") + __VERSION__;
#else
  env["compiler"] = "unknown";
#endif
  env["cxx_standard"] = static_cast<long>(__cplusplus);
#ifdef NDEBUG
  env["assertions"] = false;
#else
  env["assertions"] = true;
#endif
  env["gmp"] = gmp_version;
  env["eigen"] = std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                 std::to_string(EIGEN_MINOR_VERSION);
  env["boost"] = BOOST_LIB_VERSION;
  return env;
}

nlohmann::ordered_json report_to_json(const Report& r, bool with_timestamp) {
  nlohmann::ordered_json j;
  j["schema_version"] = kReportSchemaVersion;
  j["suite"] = r.suite;
  j["passed"] = r.passed();
  j["sign_convention_digest"] = sign_convention_digest();
  j["environment"] = environment_metadata();
  j["config"] = r.config;
  auto& checks = j["checks"] = nlohmann::ordered_json::array();
  for (auto& c : r.checks) {
    nlohmann::ordered_json cj;
    cj["name"] = c.name;
    cj["status"] = c.passed ? "pass" : "fail";
    cj["trials"] = c.trials;
    if (c.max_error) cj["max_error"] = *c.max_error;
    if (c.tolerance) cj["tolerance"] = *c.tolerance;
    if (!c.counterexample.empty()) cj["counterexample"] = c.counterexample;
    if (!c.reproducer.is_null()) cj["reproducer"] = c.reproducer;
    if (!c.note.empty()) cj["note"] = c.note;
    checks.push_back(std::move(cj));
  }
  j["tables"] = r.tables;
  if (with_timestamp) {
    std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    j["timestamp"] = buf;
  }
  return j;
}

std::string render_text(const Report& r) {
  std::string out = r.suite + "\n";
  size_t width = 0;
  for (auto& c : r.checks) width = std::max(width, c.name.size());
  for (auto& c : r.checks) {
    out += c.passed ? "  PASS  " : "  FAIL  ";
    out += c.name + std::string(width - c.name.size() + 2, ' ');
    out += "trials=" + std::to_string(c.trials);
    if (c.max_error) {
      char buf[64];
      std::snprintf(buf, sizeof buf, "  max_err=%.3e", *c.max_error);
      out += buf;
      if (c.tolerance) {
        std::snprintf(buf, sizeof buf, " (tol %.0e)", *c.tolerance);
        out += buf;
      }
    }
    if (!c.note.empty()) out += "  " + c.note;
    out += "\n";
    if (!c.passed && !c.counterexample.empty()) out += "        counterexample: " + c.counterexample + "\n";
  }
  out += r.passed() ? "all checks passed\n" : "some checks FAILED\n";
  return out;
}

}  // namespace curvchen
