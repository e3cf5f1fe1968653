#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "qkb/cli.hpp"

using namespace qkb;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "qkb");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string instance(const std::string& name) { return std::string(QKB_INSTANCE_DIR) + "/" + name; }

std::string write_temp(const std::string& name, const std::string& text) {
  const auto path = std::filesystem::temp_directory_path() / ("qkb_test_" + name);
  std::ofstream(path) << text;
  return path.string();
}

}  // namespace

TEST_CASE("bounds on the two-level instance") {
  const auto r = run_cli({"bounds", "--instance", instance("two_level.json")});
  REQUIRE(r.code == 0);
  const auto j = Json::parse(r.out);
  CHECK(j["bounds"]["ckb_max"].get<double>() == doctest::Approx(std::tanh(0.5)).epsilon(1e-11));
  CHECK(j["meta"]["version"] == cli::kVersion);
  CHECK(j["meta"]["command"] == "bounds");
  CHECK(j["meta"]["seed"] == 0);
}

TEST_CASE("output is deterministic and round-trips") {
  const auto a = run_cli({"bounds", "--instance", instance("overlap.json")});
  const auto b = run_cli({"bounds", "--instance", instance("overlap.json")});
  CHECK(a.out == b.out);
  const auto j = Json::parse(a.out);
  const auto rep = bounds_report_from_json(j["bounds"]);
  CHECK(to_json(rep) == j["bounds"]);
  const auto v1 = run_cli({"verify", "--instance", instance("overlap.json"), "--restarts", "4", "--seed", "3"});
  const auto v2 = run_cli({"verify", "--instance", instance("overlap.json"), "--restarts", "4", "--seed", "3"});
  CHECK(v1.code == 0);
  CHECK(v1.out == v2.out);
}

TEST_CASE("infinities serialize as strings") {
  const auto r = run_cli({"bounds", "--instance", instance("pure_controller.json")});
  REQUIRE(r.code == 0);
  CHECK(Json::parse(r.out)["band_structure"]["bandwidth"] == "inf");
  CHECK(number_from_json(Json("-inf")) == -INFINITY);
}

TEST_CASE("validation errors exit 2 and name the invariant") {
  const auto bad = run_cli({"bounds", "--instance", instance("bad.json")});
  CHECK(bad.code == 2);
  CHECK(bad.err.find("NotNormalized") != std::string::npos);

  const auto missing = run_cli({"bounds", "--instance", "/nonexistent/file.json"});
  CHECK(missing.code == 2);

  const auto garbage = run_cli({"bounds", "--instance", write_temp("garbage.json", "{not json")});
  CHECK(garbage.code == 2);

  const auto both = run_cli({"bounds", "--instance", write_temp("both.json", R"({
    "system": {"spectrum": [1], "thermal": {"preset": "two_level", "lambda": 1}},
    "controller": {"spectrum": [1]}, "observable": "sigma_z"})")});
  CHECK(both.code == 2);
  CHECK(both.err.find("InvalidInstance") != std::string::npos);

  const auto dims = run_cli({"bounds", "--instance", write_temp("dims.json", R"({
    "system": {"spectrum": [0.2, 0.3, 0.5]}, "controller": {"spectrum": [1]}, "observable": "sigma_z"})")});
  CHECK(dims.code == 2);
  CHECK(dims.err.find("DimensionMismatch") != std::string::npos);

  CHECK(run_cli({"bogus"}).code == 2);
  CHECK(run_cli({"bounds"}).code == 2);
  CHECK(run_cli({"figure3", "--lambda-c-grid", "0:1"}).code == 2);
  CHECK(run_cli({"bounds", "--instance", instance("overlap.json"), "--format", "csv"}).code == 2);
}

TEST_CASE("instance forms: density matrix, observable matrix, thermal levels") {
  const auto path = write_temp("matrix.json", R"({
    "system": {"density_matrix": [[0.5, [0.1, 0.2]], [[0.1, -0.2], 0.5]]},
    "controller": {"thermal": {"energies": [0, 1], "temperature": 2}},
    "observable": {"matrix": [[0, 1], [1, 0]]}})");
  const auto r = run_cli({"bounds", "--instance", path});
  REQUIRE(r.code == 0);
  const auto j = Json::parse(r.out);
  const double lam = std::sqrt(0.05);
  CHECK(j["bounds"]["ckb_max"].get<double>() == doctest::Approx(2 * lam).epsilon(1e-10));
  const auto inst = cli::load_instance(path);
  CHECK(inst.controller.thermal);
  CHECK(inst.controller.thermal->beta == doctest::Approx(0.5));
  CHECK_THROWS_AS(cli::observable_preset("nope"), Error);
}

TEST_CASE("figure4 CSV") {
  const auto r = run_cli({"figure4", "--lambda-s", "1", "--M", "10", "--obs", "Pi1", "--format", "csv"});
  REQUIRE(r.code == 0);
  std::istringstream is(r.out);
  std::string line;
  std::getline(is, line);
  CHECK(line == "lambda_c,j_max,j_min,ckb_max,gap_to_ckb");
  int rows = 0;
  while (std::getline(is, line)) {
    ++rows;
    const auto comma = line.find(',');
    const double lc = std::stod(line.substr(0, comma));
    const double gap = std::stod(line.substr(line.rfind(',') + 1));
    if (lc <= 0.1) CHECK(std::abs(gap) <= 1e-12);
  }
  CHECK(rows == 400);
  const auto custom = run_cli({"figure3", "--lambda-c-grid", "0:1:5", "--M", "2"});
  REQUIRE(custom.code == 0);
  CHECK(Json::parse(custom.out)["points"].size() == 5);
}

TEST_CASE("oracle") {
  const auto r = run_cli({"oracle", "--instance", instance("overlap.json")});
  REQUIRE(r.code == 0);
  const auto j = Json::parse(r.out);
  CHECK(j["critical_value_count"] == 6);
  CHECK(j["all_pass"] == true);

  const auto pp = run_cli({"oracle", "--instance", write_temp("pp.json", R"({
    "system": {"spectrum": [0, 0, 1]}, "controller": {"spectrum": [0, 1]},
    "observable": {"distinct": [0, 1, 2], "multiplicities": [1, 1, 1]}})")});
  REQUIRE(pp.code == 0);
  CHECK(Json::parse(pp.out)["critical_value_count"] == 3);

  const auto big = run_cli({"oracle", "--instance", write_temp("big.json", R"({
    "system": {"spectrum": [0.1, 0.2, 0.3, 0.4]}, "controller": {"spectrum": [0.2, 0.3, 0.5]},
    "observable": {"distinct": [0, 1], "multiplicities": [2, 2]}})")});
  CHECK(big.code == 2);
  CHECK(big.err.find("TooLarge") != std::string::npos);
}

TEST_CASE("thermal-check and topology") {
  const auto t = run_cli({"thermal-check", "--instance", instance("spin_bath.json")});
  REQUIRE(t.code == 0);
  CHECK(Json::parse(t.out)["agree"] == true);
  CHECK(run_cli({"thermal-check", "--instance", instance("overlap.json")}).code == 2);
  const auto topo = run_cli({"topology", "--instance", instance("overlap.json")});
  REQUIRE(topo.code == 0);
  CHECK(Json::parse(topo.out)["reports"][0]["n_critical"] == 6);
}

TEST_CASE("verify writes traces") {
  const auto dir = (std::filesystem::temp_directory_path() / "qkb_traces").string();
  std::filesystem::remove_all(dir);
  const auto r = run_cli({"verify", "--instance", instance("pure_controller.json"), "--restarts", "2", "--trace-dir", dir});
  REQUIRE(r.code == 0);
  std::ifstream f(std::filesystem::path(dir) / "ascent_0.csv");
  std::string header;
  std::getline(f, header);
  CHECK(header == "iter,yield,grad_norm");
  CHECK(Json::parse(r.out)["certificate"]["certificate"] == true);
}
