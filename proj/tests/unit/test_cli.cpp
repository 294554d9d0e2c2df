#include "lph/report.hpp"

#include <doctest.h>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string output;
};

Run cli(const std::string& args) {
  static int counter = 0;
  const fs::path log = fs::temp_directory_path() / ("lph_cli_" + std::to_string(counter++) + ".log");
  const std::string cmd = std::string(LPH_CLI_PATH) + " " + args + " > " + log.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  std::ifstream in(log);
  std::stringstream ss;
  ss << in.rdbuf();
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, ss.str()};
}

fs::path scratch() {
  const fs::path dir = fs::temp_directory_path() / "lph_cli_test";
  fs::create_directories(dir);
  return dir;
}

std::string read(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("gen then solve round trip") {
  const fs::path dir = scratch();
  const std::string prefix = (dir / "").string();
  REQUIRE(cli("gen --n 8 --d 2 --p 3 --density 1 --seed 7 --out-prefix " + prefix).code == 0);
  CHECK(fs::exists(dir / "A.mtx"));
  const std::string common = "solve --matrix " + prefix + "A.mtx --b " + prefix + "b.txt --c " + prefix +
                             "c.txt --p 3 --eps 1e-6 --seed 1 ";
  const Run r = cli(common + "--out " + prefix + "report.json");
  CHECK(r.code == 0);
  const auto j = nlohmann::json::parse(read(dir / "report.json"));
  CHECK(j["problem"]["n"] == 8);
  CHECK(j["problem"]["d"] == 2);
  CHECK(j["solver_kind"] == "agd-dense");
  CHECK(j["final_x"].is_array());
  CHECK(j["phases"].size() > 0);
  for (const auto& ph : j["phases"]) CHECK(ph.contains("kkt_residual"));

  // stable across runs apart from timings
  REQUIRE(cli(common + "--out " + prefix + "report2.json").code == 0);
  auto a = j, b = nlohmann::json::parse(read(dir / "report2.json"));
  for (auto* x : {&a, &b}) {
    x->erase("total_wall_ms");
    for (auto& ph : (*x)["phases"]) ph.erase("wall_ms");
  }
  CHECK(a.dump() == b.dump());

  for (const std::string solver : {"agd-sparse", "katyusha"}) {
    const Run s = cli(common + "--solver " + solver + " --out " + prefix + "r_" + solver + ".json --x-out " + prefix +
                      "x_" + solver + ".txt");
    CHECK(s.code == 0);
    const auto k = nlohmann::json::parse(read(dir / ("r_" + solver + ".json")));
    CHECK(k["final_x"] == prefix + "x_" + solver + ".txt");
    CHECK(double(k["final_objective"]) == doctest::Approx(double(j["final_objective"])).epsilon(1e-6));
  }
}

TEST_CASE("usage errors exit 2") {
  const fs::path dir = scratch();
  const std::string prefix = (dir / "").string();
  REQUIRE(cli("gen --n 8 --d 2 --p 3 --seed 7 --out-prefix " + prefix).code == 0);
  const std::string files = "--matrix " + prefix + "A.mtx --b " + prefix + "b.txt --c " + prefix + "c.txt ";
  const Run p1 = cli("solve " + files + "--p 1 --out " + prefix + "x.json");
  CHECK(p1.code == 2);
  CHECK(p1.output.find("p > 1") != std::string::npos);
  CHECK(cli("solve " + files + "--p 3 --eps 0 --out " + prefix + "x.json").code == 2);
  CHECK(cli("solve " + files + "--p 3 --solver newton --out " + prefix + "x.json").code == 2);
  CHECK(cli("solve --p 3").code == 2);
  CHECK(cli("frobnicate").code == 2);
  CHECK(cli("").code == 2);
  CHECK(cli("validate --suite medium").code == 2);
}

TEST_CASE("runtime failures exit 1") {
  const fs::path dir = scratch();
  const std::string prefix = (dir / "").string();
  const Run r = cli("solve --matrix " + prefix + "missing.mtx --b x --c y --p 3 --out " + prefix + "m.json");
  CHECK(r.code == 1);
  std::ofstream(dir / "short_b.txt") << "1\n2\n";
  REQUIRE(cli("gen --n 8 --d 2 --p 3 --seed 7 --out-prefix " + prefix).code == 0);
  CHECK(cli("solve --matrix " + prefix + "A.mtx --b " + prefix + "short_b.txt --c " + prefix +
            "c.txt --p 3 --out " + prefix + "m.json")
            .code == 1);
}

TEST_CASE("bench writes the fixed CSV header in deterministic order") {
  const fs::path dir = scratch();
  const std::string out = (dir / "bench.csv").string();
  REQUIRE(cli("bench --p-list 3,4 --n 20,40 --d 2 --trials 2 --seed 3 --out " + out).code == 0);
  std::ifstream in(out);
  std::string line;
  std::getline(in, line);
  CHECK(line == lph::kBenchHeader);
  std::string prev_key;
  int rows = 0;
  std::string first;
  while (std::getline(in, line)) {
    if (rows == 0) first = line;
    ++rows;
  }
  CHECK(rows > 0);
  CHECK(first.rfind("3.0,20,2,0,", 0) == 0);
  setenv("LP_HOMOTOPY_THREADS", "1", 1);
  const std::string out1 = (dir / "bench1.csv").string();
  REQUIRE(cli("bench --p-list 3,4 --n 20,40 --d 2 --trials 2 --seed 3 --out " + out1).code == 0);
  unsetenv("LP_HOMOTOPY_THREADS");
  auto strip = [](const std::string& text) {
    std::stringstream ss(text), outs;
    std::string l;
    while (std::getline(ss, l)) outs << l.substr(0, l.rfind(',')) << '\n';
    return outs.str();
  };
  CHECK(strip(read(out)) == strip(read(out1)));
}

TEST_CASE("validate quick exits 0") {
  const Run r = cli("validate --suite quick --seed 0");
  CHECK(r.code == 0);
  CHECK(r.output.find("FAIL") == std::string::npos);
}
