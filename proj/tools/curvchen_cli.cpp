#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "curvchen/suites.hpp"

using namespace curvchen;

namespace {

struct Options {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  bool json = false;
  bool no_timestamp = false;
};

int run(const std::string& which, const Options& o) {
  SuiteConfig cfg;
  try {
    nlohmann::json j;
    if (!o.config.empty()) {
      std::ifstream in(o.config);
      if (!in) throw ConfigError("cannot read config " + o.config);
      j = nlohmann::json::parse(in, nullptr, true, true);
    }
    cfg = parse_config(j);
    if (o.seed) cfg.seed = *o.seed;
    // fixture paths in a config are relative to the config file
    for (auto& f : cfg.pathspace.fixture_files)
      if (std::filesystem::path(f).is_relative())
        f = (std::filesystem::path(o.config).parent_path() / f).lexically_normal().string();
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  }

  Report rep;
  try {
    if (which == "verify-zigzag") rep = run_verify_zigzag(cfg);
    else if (which == "verify-pathspace") rep = run_verify_pathspace(cfg);
    else rep = run_cohomology(cfg);
  } catch (const ConfigError& e) {
    // raised lazily, e.g. an unreadable fixture file
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  }

  const std::string js = report_to_json(rep, !o.no_timestamp).dump(2) + "\n";
  if (!o.out.empty()) {
    std::ofstream f(o.out);
    if (!f) {
      std::cerr << "cannot write " << o.out << "\n";
      return 2;
    }
    f << js;
  }
  std::cout << (o.json ? js : render_text(rep));
  return rep.passed() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"curvchen: curved DGAs, zigzag bar construction and curved Chen integrals"};
  app.require_subcommand(1);
  Options o;
  std::string chosen;
  for (const char* name : {"verify-zigzag", "verify-pathspace", "cohomology"}) {
    const char* help = std::string(name) == "verify-zigzag"      ? "exact identities of the zigzag complex"
                       : std::string(name) == "verify-pathspace" ? "numeric checks of the curved Chen map"
                                                                 : "curved cohomology dimension tables";
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--config", o.config, "JSON config file")->check(CLI::ExistingFile);
    sub->add_option("--seed", o.seed, "override the config seed");
    sub->add_option("--out", o.out, "write the JSON report here");
    sub->add_flag("--json", o.json, "print the JSON report instead of the text summary");
    sub->add_flag("--no-timestamp", o.no_timestamp, "omit the timestamp field");
    sub->callback([&chosen, name] { chosen = name; });
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }
  return run(chosen, o);
}
