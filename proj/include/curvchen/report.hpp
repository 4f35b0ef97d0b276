#pragma once

#include <cstdint>
#include <json.hpp>
#include <optional>
#include <string>
#include <vector>

namespace curvchen {

inline constexpr int kReportSchemaVersion = 1;

struct CheckResult {
  std::string name;
  bool passed = false;
  int trials = 0;
  std::optional<double> max_error;  // numeric checks
  std::optional<double> tolerance;
  std::string counterexample;      // symbolic failures: first offending input
  nlohmann::json reproducer;       // minimal input that reproduces a failure
  std::string note;
};

struct Report {
  std::string suite;
  nlohmann::json config;
  std::vector<CheckResult> checks;
  nlohmann::json tables = nlohmann::json::object();  // suite-specific data (cohomology dims, convergence)
  bool passed() const;
};

// 64-bit FNV-1a
std::uint64_t fnv1a(const std::string& s);
// the frozen sign conventions, one per line; the digest is what reports carry
const std::string& sign_conventions();
std::string sign_convention_digest();

nlohmann::ordered_json environment_metadata();
// timestamp is the only field allowed to differ between identical runs
nlohmann::ordered_json report_to_json(const Report& r, bool with_timestamp = true);
std::string render_text(const Report& r);

}  // namespace curvchen
