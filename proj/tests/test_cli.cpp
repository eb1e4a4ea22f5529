#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"
#include "loxobound/cli.hpp"
#include "loxobound/errors.hpp"

using namespace loxobound;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "loxobound");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string data_file(const std::string& name) { return std::string(LOXOBOUND_SOURCE_DIR) + "/data/" + name; }

}  // namespace

TEST_CASE("n range parsing") {
  CHECK(parse_n_range("2..5") == std::pair<int, int>{2, 5});
  CHECK(parse_n_range("3") == std::pair<int, int>{3, 3});
  CHECK_THROWS_AS(parse_n_range("5..2"), InputError);
  CHECK_THROWS_AS(parse_n_range("1..3"), InputError);
  CHECK_THROWS_AS(parse_n_range("a..b"), InputError);
  CHECK_THROWS_AS(parse_n_range(""), InputError);
}

TEST_CASE("config validation") {
  RunConfig c;
  CHECK_NOTHROW(c.validate());
  c.tol = 0;
  CHECK_THROWS_AS(c.validate(), InputError);
  c = RunConfig{};
  c.multistarts = 0;
  CHECK_THROWS_AS(c.validate(), InputError);
  c = RunConfig{};
  c.ball_length = 3;
  CHECK_THROWS_AS(c.validate(), InputError);
}

TEST_CASE("alpha command") {
  const Run text = run({"alpha", "--n", "2"});
  CHECK(text.code == kExitSuccess);
  CHECK(text.out.find("24.86921") != std::string::npos);

  const Run a = run({"alpha", "--n-range", "2..4", "--format", "json"});
  const Run b = run({"alpha", "--n-range", "2..4", "--format", "json"});
  REQUIRE(a.code == kExitSuccess);
  CHECK(a.out == b.out);
  const auto doc = nlohmann::json::parse(a.out);
  CHECK(doc["rows"].size() == 3);
  CHECK(doc["rows"][0]["alpha"].get<double>() == doctest::Approx(24.8692144087));
  CHECK(doc.contains("version"));
  CHECK(doc["config"]["n_range"][1] == 4);

  const Run csv = run({"alpha", "--n", "3", "--format", "csv"});
  CHECK(csv.out.rfind("n,c4,c3,c2,c1,c0,lo,hi,alpha,half_log_alpha,trace_bound\n", 0) == 0);
}

TEST_CASE("usage errors") {
  CHECK(run({"alpha", "--n-range", "3..2"}).code == kExitUsageError);
  CHECK(run({"alpha", "--n", "1"}).code == kExitUsageError);
  CHECK(run({"alpha", "--format", "xml"}).code == kExitUsageError);
  CHECK(run({"bogus"}).code == kExitUsageError);
  CHECK(run({}).code == kExitUsageError);
  CHECK(run({"verify", "--ball-length", "5"}).code == kExitUsageError);
  CHECK(run({"check-matrices"}).code == kExitUsageError);
  CHECK(run({"check-matrices", "--matrices", data_file("bad_determinant.json")}).code == kExitUsageError);
  CHECK(run({"check-matrices", "--matrices", "/nonexistent.json"}).code == kExitUsageError);
}

TEST_CASE("verify command and negative control") {
  const Run ok = run({"verify", "--n", "2", "--format", "json"});
  CHECK(ok.code == kExitSuccess);
  CHECK(nlohmann::json::parse(ok.out)["passed"] == true);
  const Run bad = run({"verify", "--n", "2", "--inject-fault"});
  CHECK(bad.code == kExitVerificationFailure);
  CHECK(bad.out.find("FAIL") != std::string::npos);
}

TEST_CASE("check-matrices command") {
  const Run ok = run({"check-matrices", "--matrices", data_file("schottky_pair.json"), "--format", "json"});
  CHECK(ok.code == kExitSuccess);
  const auto doc = nlohmann::json::parse(ok.out);
  CHECK(doc["hypothesis_verified"] == true);
  CHECK(doc["holds"] == true);
  CHECK(doc["warning"].is_null());
  CHECK(doc["trace_pairs"].size() == 2);

  const Run warn = run({"check-matrices", "--matrices", data_file("commuting_pair.json")});
  CHECK(warn.code == kExitSuccess);
  CHECK(warn.out.find("WARNING") != std::string::npos);
}

TEST_CASE("report written to --out") {
  const auto path = std::filesystem::temp_directory_path() / "loxobound_cli_test.json";
  std::filesystem::remove(path);
  const Run r = run({"alpha", "--n", "2", "--format", "json", "--out", path.string()});
  CHECK(r.code == kExitSuccess);
  std::ifstream in(path);
  REQUIRE(in);
  std::stringstream buf;
  buf << in.rdbuf();
  CHECK(nlohmann::json::parse(buf.str())["rows"][0]["n"] == 2);
  std::filesystem::remove(path);
}

TEST_CASE("optimize report carries per-start trajectories") {
  const Run r = run({"optimize", "--n", "2", "--multistarts", "2", "--format", "json"});
  CHECK(r.code == kExitSuccess);
  const auto doc = nlohmann::json::parse(r.out);
  const auto& minimax = doc["details"][0]["minimax"];
  REQUIRE(minimax.size() == 2);
  for (const auto& run_json : minimax) {
    REQUIRE(run_json["starts"].size() == 2);
    const auto& trajectory = run_json["starts"][0]["trajectory"];
    CHECK(trajectory.size() > 1);
    CHECK(trajectory.back()["value"].get<double>() <= trajectory.front()["value"].get<double>());
  }
  CHECK(run({"optimize", "--n", "2", "--multistarts", "0"}).code == kExitUsageError);
}
