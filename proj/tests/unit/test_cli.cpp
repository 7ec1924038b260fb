#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "../common/schema_check.hpp"
#include "bz/cli.hpp"

namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "bzcanard");
  std::ostringstream out, err;
  const int code = bz::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

nlohmann::json load_schema(const std::string& name) {
  return nlohmann::json::parse(slurp(fs::path(BZ_SOURCE_DIR) / "schemas" / (name + ".schema.json")));
}

void check_schema(const std::string& text, const std::string& schema_name) {
  const auto doc = nlohmann::json::parse(text);
  const auto errors = schema::validate(doc, load_schema(schema_name));
  for (const auto& e : errors) MESSAGE(e);
  CHECK(errors.empty());
}

fs::path temp_path(const std::string& name) {
  return fs::temp_directory_path() / ("bzcanard_test_" + name);
}

}  // namespace

TEST_CASE("exit code matrix") {
  struct Case {
    std::vector<std::string> args;
    int code;
  };
  const std::vector<Case> cases = {
      {{"qstar"}, 0},
      {{"qstarstar", "--tol", "1e-9"}, 0},
      {{"folds", "--q", "0.07"}, 0},
      {{"analyze", "--f", "1", "--q", "1", "--eps", "0.01"}, 0},
      {{"hopf", "--q", "0.07", "--eps", "1e-4"}, 0},
      {{"--help"}, 0},
      {{}, 2},
      {{"nonsense"}, 2},
      {{"analyze", "--f", "1", "--q", "1"}, 2},
      {{"analyze", "--f", "abc", "--q", "1", "--eps", "0.01"}, 2},
      {{"analyze", "--f", "-1", "--q", "1", "--eps", "0.01"}, 2},
      {{"simulate", "--f", "1", "--q", "0.5", "--eps", "0.5", "--x0", "0.3", "--y0", "0.2", "--t", "1"}, 2},
      {{"sweep", "--q", "0.07", "--eps", "1e-4", "--f-min", "1.6", "--f-max", "1.5", "--steps", "3"}, 2},
      {{"portrait", "--f", "1", "--q", "0.5", "--eps", "0.01", "--out", "-", "--orbits", "x:1"}, 2},
      {{"hopf", "--q", "0.5", "--eps", "1e-4"}, 2},
      {{"hopf", "--q", "0.07", "--eps", "0.1"}, 1},
      {{"cycle", "--f", "1", "--q", "0.5", "--eps", "0.01"}, 1},
      {{"simulate", "--f", "1", "--q", "0.5", "--eps", "0.05", "--x0", "0.3", "--y0", "0.2", "--t", "1",
        "--out", "/nonexistent-dir/x.csv"}, 1},
  };
  for (const Case& c : cases) {
    const Result r = run(c.args);
    std::string joined;
    for (const auto& a : c.args) joined += a + " ";
    INFO(joined);
    CHECK(r.code == c.code);
    if (c.code == 2) CHECK(r.err.find("Usage") != std::string::npos);
    if (c.code == 1) CHECK_FALSE(r.err.empty());
  }
  CHECK(run({"hopf", "--q", "0.07", "--eps", "0.1"}).err.rfind("NoHopfRoots", 0) == 0);
  CHECK(run({"cycle", "--f", "1", "--q", "0.5", "--eps", "0.01"}).err.rfind("ConvergedToEquilibrium", 0) == 0);
}

TEST_CASE("qstar prints the constant") {
  const Result r = run({"qstar"});
  CHECK(r.out.rfind("0.07973", 0) == 0);
  CHECK(std::stod(r.out) == -0.2 + 0.6 * std::cbrt(2.0) - 0.3 * std::cbrt(4.0));
}

TEST_CASE("analysis document") {
  const Result r = run({"analyze", "--f", "1", "--q", "1", "--eps", "0.01", "--json"});
  REQUIRE(r.code == 0);
  check_schema(r.out, "analysis");
  const auto doc = nlohmann::json::parse(r.out);
  CHECK(doc["equilibrium"]["eigenvalues"][0]["re"] == -1.5);
  CHECK(doc["equilibrium"]["eigenvalues"][1]["re"].get<double>() == doctest::Approx(-0.01).epsilon(1e-14));
  CHECK(doc["equilibrium"]["regime"] == "GLOBALLY_STABLE");

  const Result s = run({"analyze", "--f", "1.5", "--q", "0.07", "--eps", "1e-4", "--json"});
  check_schema(s.out, "analysis");
  const auto d2 = nlohmann::json::parse(s.out);
  CHECK(d2.contains("hopf"));
  CHECK(d2["canard"]["min"]["A"].get<double>() == doctest::Approx(-19.69).epsilon(1e-3));
  // Shortest round-trip formatting: re-serialising gives identical text.
  CHECK(nlohmann::ordered_json::parse(s.out).dump(2) + "\n" == s.out);

  const Result t = run({"analyze", "--f", "1.5", "--q", "0.07", "--eps", "1e-4"});
  CHECK(t.out.find("equilibrium.regime: OSCILLATORY") != std::string::npos);
  CHECK(t.out.find("regime_narrative: ") != std::string::npos);
}

TEST_CASE("hopf and cycle documents validate") {
  check_schema(run({"hopf", "--q", "0.02", "--eps", "0.01"}).out, "hopf");
  const Result c = run({"cycle", "--f", "0.5710914362323", "--q", "0.02", "--eps", "0.01", "--both"});
  REQUIRE(c.code == 0);
  check_schema(c.out, "cycle");
  const auto doc = nlohmann::json::parse(c.out);
  REQUIRE(doc["cycles"].size() == 2);
  CHECK(doc["cycles"][0]["stability"] == "STABLE");
  CHECK(doc["cycles"][1]["stability"] == "UNSTABLE");
  CHECK(doc["gap"].get<double>() > 0.0);
  const Result one = run({"cycle", "--f", "1.5", "--q", "0.07", "--eps", "1e-4"});
  check_schema(one.out, "cycle");
}

TEST_CASE("simulate csv matches the golden file byte for byte") {
  const fs::path out = temp_path("golden.csv");
  const Result r = run({"simulate", "--f", "1", "--q", "0.5", "--eps", "0.05", "--x0", "0.3", "--y0",
                        "0.2", "--t", "1", "--out", out.string()});
  REQUIRE(r.code == 0);
  CHECK(r.out.empty());
  const std::string got = slurp(out);
  const std::string want = slurp(fs::path(BZ_SOURCE_DIR) / "tests" / "golden" / "simulate_short.csv");
  CHECK(got == want);
  CHECK(got.rfind("t,x,y\n", 0) == 0);
  CHECK(got.find('\r') == std::string::npos);
  fs::remove(out);

  const Result back = run({"simulate", "--f", "1", "--q", "0.5", "--eps", "0.05", "--x0", "0.3", "--y0",
                           "0.2", "--t", "1", "--backward"});
  CHECK(back.out.find("\n-") != std::string::npos);
}

TEST_CASE("sweep csv and explosion refinement") {
  const Result r = run({"sweep", "--q", "0.07", "--eps", "1e-4", "--f-min", "1.532", "--f-max", "1.538",
                        "--steps", "4", "--refine-explosion"});
  REQUIRE(r.code == 0);
  std::istringstream lines(r.out);
  std::string line;
  std::getline(lines, line);
  CHECK(line == "f,amplitude_x,period,shape,converged");
  int rows = 0;
  while (std::getline(lines, line)) ++rows;
  CHECK(rows == 4);
  CHECK(r.err.find("explosion bracket: [1.53461") != std::string::npos);
}

TEST_CASE("portrait svg is deterministic") {
  const std::vector<std::string> args = {"portrait", "--f", "0.59", "--q", "0.02", "--eps", "0.01",
                                         "--out", "-", "--t", "3000"};
  const Result a = run(args), b = run(args);
  REQUIRE(a.code == 0);
  CHECK(a.out == b.out);
  CHECK(a.out.find("viewBox=\"0 0 1 1.1") != std::string::npos);
  CHECK(a.out.find("stroke=\"#2e8b57\"") != std::string::npos);
  CHECK(a.out.find("stroke=\"#ff8c00\"") != std::string::npos);
  CHECK(a.out.find("stroke-dasharray") != std::string::npos);
  CHECK(a.out.find("stroke=\"#000000\"") != std::string::npos);

  const Result c = run({"portrait", "--f", "1", "--q", "0.5", "--eps", "0.01", "--out", "-", "--orbits",
                        "f:0.9,0.1;f:0.1,0.9", "--t", "500"});
  CHECK(c.code == 0);
  CHECK(c.out.find("#ff8c00") == std::string::npos);
}
