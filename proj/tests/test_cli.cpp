#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <string>

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

const std::string kCli = CURVCHEN_CLI_PATH;
const fs::path kFixtures = fs::path(CURVCHEN_SOURCE_DIR) / "fixtures";

int run(const std::string& args) {
  std::string cmd = "\"" + kCli + "\" " + args + " >/dev/null 2>&1";
  int st = std::system(cmd.c_str());
  return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

fs::path scratch(const std::string& name) {
  auto dir = fs::temp_directory_path() / "curvchen-cli-tests";
  fs::create_directories(dir);
  return dir / name;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string cfg(const std::string& name) { return "\"" + (kFixtures / name).string() + "\""; }

}  // namespace

TEST_CASE("cli: exit codes") {
  CHECK(run("verify-zigzag --config " + cfg("tensor-only.json")) == 0);
  CHECK(run("") == 2);
  CHECK(run("no-such-command") == 2);
  CHECK(run("verify-zigzag --config /nonexistent.json") == 2);

  auto bad = scratch("bad.json");
  std::ofstream(bad) << R"({"zigzag": {"k_values": [3]}})";
  CHECK(run("verify-zigzag --config \"" + bad.string() + "\"") == 2);
  std::ofstream(bad) << R"({"zigzag": {"no_such_key": 1}})";
  CHECK(run("verify-zigzag --config \"" + bad.string() + "\"") == 2);
}

TEST_CASE("cli: the injected sign fault fails with a reproducer") {
  auto out = scratch("fault.json");
  CHECK(run("verify-zigzag --config " + cfg("sign-fault.json") + " --out \"" + out.string() + "\"") == 1);
  json rep = json::parse(slurp(out));
  CHECK(rep["passed"] == false);
  bool found = false;
  for (auto& c : rep["checks"])
    if (c["status"] == "fail" && c.contains("counterexample")) found = true;
  CHECK(found);
}

TEST_CASE("cli: reports are deterministic without timestamps") {
  auto a = scratch("a.json"), b = scratch("b.json");
  std::string base = "verify-zigzag --config " + cfg("tensor-only.json") + " --seed 7 --no-timestamp --out ";
  REQUIRE(run(base + "\"" + a.string() + "\"") == 0);
  REQUIRE(run(base + "\"" + b.string() + "\"") == 0);
  CHECK(slurp(a) == slurp(b));
  json rep = json::parse(slurp(a));
  CHECK(rep.contains("schema_version"));
  CHECK(rep["suite"] == "verify-zigzag");
  CHECK(rep["config"]["seed"] == 7);
  CHECK_FALSE(rep.contains("timestamp"));
  // only the tensor instance was asked for
  for (auto& c : rep["checks"]) CHECK(c["name"].get<std::string>().find("tensor") != std::string::npos);
}

TEST_CASE("cli: cohomology and pathspace configs") {
  auto out = scratch("coh.json");
  REQUIRE(run("cohomology --config " + cfg("cohomology.json") + " --out \"" + out.string() + "\"") == 0);
  json rep = json::parse(slurp(out));
  CHECK(rep["tables"].contains("tensor"));

  out = scratch("fixture-file.json");
  CHECK(run("verify-pathspace --config " + cfg("with-fixture-file.json") + " --out \"" + out.string() + "\"") == 0);
  rep = json::parse(slurp(out));
  CHECK(rep["passed"] == true);
  // fixtures from the file are named in the report
  CHECK(rep.dump().find("curvature in an interior slot") != std::string::npos);
}
