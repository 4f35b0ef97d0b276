#pragma once

#include <cstdint>
#include <json.hpp>
#include <stdexcept>
#include <string>
#include <vector>

#include "curvchen/pathspace.hpp"
#include "curvchen/report.hpp"
#include "curvchen/zigzag.hpp"

namespace curvchen {

struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct ZigzagSuiteConfig {
  std::vector<std::string> instances{"matrix-form", "tensor"};
  std::vector<int> ks{2, 4};
  std::vector<int> ns{0, 1, 2};
  int axiom_trials = 200;
  int d2_trials = 50;  // per (instance, k, n) cell
  int leibniz_trials = 50;
  int assoc_trials = 50;
  int homotopy_trials = 100;
  int confluence_trials = 500;
  int col_trials = 100;
  int max_entry_degree = 2;
  SignFault fault;
};

struct PathspaceTolerances {
  double transport = 1e-8;  // exp oracle and composition
  double liouville = 1e-6;
  double transport_derivative = 1e-4;
  double stokes = 1e-8;
  double eta = 1e-6;
  double chain_map = 1e-2;
  double algebra_map = 1e-3;
  double triangle = 1e-3;
  double homotopy = 1e-2;
  double alternating = 1e-8;
  double covariant = 1e-4;
  double quadrature = 1e-12;
};

struct PathspaceSuiteConfig {
  bool curved = true;       // checks on the curved R^2 connection
  bool flat_scalar = true;  // classical Chen checks
  NumericOptions numeric;
  PathspaceTolerances tol;
  int transport_fixtures = 10;
  int stokes_fixtures = 10;
  int eta_fixtures = 10;
  int algebra_fixtures = 10;
  int triangle_fixtures = 20;
  bool convergence_gate = true;
  std::vector<std::string> fixture_files;  // extra chain-map fixtures in grid form
};

struct CohomologySuiteConfig {
  int tensor_dv = 2;
  int tensor_K = 4;
  nlohmann::json tensor_v = nlohmann::json::array({{{"word", {0}}, {"coeff", 1}}});
  int forms_poly_cap = 3;
  int forms_hi = 2;
  int flat_poly_cap = 3;
};

struct SuiteConfig {
  std::uint64_t seed = 1;
  int threads = 0;  // 0: hardware concurrency
  ZigzagSuiteConfig zigzag;
  PathspaceSuiteConfig pathspace;
  CohomologySuiteConfig cohomology;
};

// strict: unknown keys and out-of-range values raise ConfigError
SuiteConfig parse_config(const nlohmann::json& j);
nlohmann::json config_to_json(const SuiteConfig& c);

Report run_verify_zigzag(const SuiteConfig& c);
Report run_verify_pathspace(const SuiteConfig& c);
Report run_cohomology(const SuiteConfig& c);

}  // namespace curvchen
