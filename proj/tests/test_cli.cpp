#include <sys/wait.h>
#include <unistd.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "commands.hpp"
#include "config.hpp"
#include "diracbound/errors.hpp"
#include "doctest.h"
#include "json.hpp"
#include "oracles.hpp"
#include "report.hpp"

using namespace dbtool;
using oracle::kPi;

namespace {

struct RunOutput {
  int code = -1;
  std::string out;
};

RunOutput run_tool(const std::string& args) {
  const char* exe = std::getenv("DIRACBOUND_EXE");
  REQUIRE_MESSAGE(exe != nullptr, "DIRACBOUND_EXE is not set");
  const std::string cmd = std::string(exe) + " " + args + " 2>/dev/null";
  FILE* p = popen(cmd.c_str(), "r");
  REQUIRE(p != nullptr);
  RunOutput r;
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, n);
  const int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

template <class F>
void check_config_error(F&& f) {
  try {
    f();
    FAIL("expected a configuration error");
  } catch (const db::Error& e) {
    CHECK(e.kind() == db::ErrorKind::Config);
  }
}

double field(const nlohmann::json& j, const char* key) { return std::stod(j.at(key).get<std::string>()); }

std::filesystem::path temp_path(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("diracbound_test_" + std::to_string(::getpid()) + "_" + name);
}

}  // namespace

TEST_CASE("configuration text") {
  RunConfig c;
  load_config_text(c,
                   "# torus run\n"
                   "[geometry]\n"
                   "kind = torus\n"
                   "L1 = 2.5  # comment\n"
                   "spin = 1, 1\n"
                   "[bundle]\n"
                   "twist = 6.25\n"
                   "[bc]\n"
                   "kind = mit\n"
                   "sign = -1\n"
                   "[solver]\n"
                   "k = 3\n"
                   "resolution = 20\n"
                   "[output]\n"
                   "format = csv\n"
                   "[run]\n"
                   "seed = 7\n");
  CHECK(c.geometry == "torus");
  CHECK(c.geometryGiven);
  CHECK(c.L1 == 2.5);
  CHECK(c.spin == std::array<int, 2>{1, 1});
  CHECK(c.twist == 6.25);
  CHECK(c.bc == "mit");
  CHECK(c.sign == -1);
  CHECK(c.k == 3);
  CHECK(effective_resolution(c) == 20);
  CHECK(c.format == "csv");
  CHECK(c.seed == 7u);

  RunConfig d;
  CHECK(effective_resolution(d) == 256);
  apply_setting(d, "geometry", "torus");
  CHECK(effective_resolution(d) == 16);
}

TEST_CASE("configuration errors") {
  RunConfig c;
  check_config_error([&] { load_config_text(c, "[nowhere]\nk = 1\n"); });
  check_config_error([&] { load_config_text(c, "[solver]\nbogus = 1\n"); });
  check_config_error([&] { load_config_text(c, "k = 1\n"); });
  check_config_error([&] { load_config_text(c, "[solver]\nk 1\n"); });
  check_config_error([&] { load_config_text(c, "[solver\n"); });
  check_config_error([&] { load_config_text(c, "[solver]\nk = three\n"); });
  check_config_error([&] { apply_setting(c, "tol", "1e-8x"); });
  check_config_error([&] { apply_setting(c, "bc", "dirichlet"); });
  check_config_error([&] { apply_setting(c, "sign", "0"); });
  check_config_error([&] { apply_setting(c, "seed", "-1"); });
  check_config_error([&] { apply_setting(c, "colour", "red"); });
  check_config_error([&] { load_config_file(c, "/nonexistent/diracbound.conf"); });
  // a key in the wrong section
  check_config_error([&] { load_config_text(c, "[bundle]\nk = 1\n"); });
}

TEST_CASE("bundle validation from the configuration") {
  RunConfig c;
  apply_setting(c, "geometry", "torus");
  apply_setting(c, "spin", "2,0");
  try {
    make_bundle(c);
    FAIL("expected a parameter error");
  } catch (const db::Error& e) {
    CHECK(e.kind() == db::ErrorKind::Parameter);
  }
  RunConfig ok;
  apply_setting(ok, "geometry", "annulus");
  apply_setting(ok, "rho_in", "0.25");
  const db::DiracBundleSpec b = make_bundle(ok);
  CHECK(b.geometry.kind == db::GeometryKind::Annulus);
  apply_setting(ok, "bc", "maps");
  apply_setting(ok, "b", "-0.5");
  const db::BoundaryCondition bc = make_bc(ok);
  CHECK(bc.kind == db::BCKind::ModifiedAPS);
  CHECK(bc.b == -0.5);
}

TEST_CASE("report rendering") {
  Report r;
  r.kind = "spectrum";
  r.tolerance = 1e-8;
  r.results.push_back({{"re", num(0.1)}});
  r.notes.push_back("a note");
  r.csvHeader = {"name", "value"};
  r.csvRows.push_back({"a,b", "say \"x\""});
  RunConfig c;
  const nlohmann::json j = nlohmann::json::parse(render_json(r, c));
  CHECK(j["kind"] == "spectrum");
  CHECK(j["version"] == kToolVersion);
  CHECK(std::stod(j["tolerance"].get<std::string>()) == 1e-8);
  CHECK(j["config"]["geometry"] == "disk");
  CHECK(std::stod(j["results"][0]["re"].get<std::string>()) == 0.1);
  CHECK(j["notes"][0] == "a note");
  CHECK(render_csv(r) == "name,value\n\"a,b\",\"say \"\"x\"\"\"\n");
  CHECK(num(1.0 / 3.0) == "0.33333333333333331");
  CHECK(num(std::nan("")) == "nan");
  CHECK(num(-INFINITY) == "-inf");
}

TEST_CASE("spectrum command") {
  SUBCASE("torus with spin (1,1): smallest cluster at pi sqrt 2") {
    // four momenta (+-1/2, +-1/2) times two signs: the cluster has eight members
    const RunOutput r = run_tool("spectrum --geometry torus --L1 1 --L2 1 --spin 1,1 -k 8");
    REQUIRE(r.code == 0);
    const nlohmann::json j = nlohmann::json::parse(r.out);
    CHECK(j["kind"] == "spectrum");
    CHECK(j["config"]["spin"] == "1,1");
    REQUIRE(j["results"].size() == 8);
    int pos = 0, neg = 0;
    for (const auto& v : j["results"]) {
      CHECK(field(v, "abs") == doctest::Approx(kPi * std::sqrt(2.0)).epsilon(1e-12));
      CHECK(field(v, "residual") <= 1e-8);
      (field(v, "re") > 0 ? pos : neg)++;
    }
    CHECK(pos == 4);
    CHECK(neg == 4);
  }
  SUBCASE("disk with the MIT condition: non-real eigenvalues") {
    const RunOutput r = run_tool("spectrum --geometry disk --bc mit -k 2 --format csv");
    REQUIRE(r.code == 0);
    std::istringstream in(r.out);
    std::string line;
    std::getline(in, line);
    CHECK(line == "index,re,im,abs,mode,parity,multiplicity,residual,method");
    int rows = 0;
    while (std::getline(in, line)) {
      std::vector<std::string> cells;
      std::stringstream ls(line);
      for (std::string cell; std::getline(ls, cell, ',');) cells.push_back(cell);
      REQUIRE(cells.size() == 9);
      CHECK(std::abs(std::stod(cells[2])) > 1e-6);
      CHECK(cells[8] == "shooting");
      ++rows;
    }
    CHECK(rows == 2);
  }
  SUBCASE("output file and configuration file") {
    const auto conf = temp_path("run.conf");
    const auto out = temp_path("out.json");
    {
      std::ofstream f(conf);
      f << "[geometry]\nkind = torus\nspin = 1,0\n[solver]\nk = 2\nresolution = 8\n";
    }
    const RunOutput r = run_tool("spectrum --config " + conf.string() + " --L1 2 --out " + out.string());
    REQUIRE(r.code == 0);
    CHECK(r.out.empty());
    std::ifstream f(out);
    std::stringstream text;
    text << f.rdbuf();
    const nlohmann::json j = nlohmann::json::parse(text.str());
    // flags override the file: L1 = 2 gives |lambda| = 2 pi |1/2| / 2
    CHECK(j["config"]["L1"] == "2");
    CHECK(field(j["results"][0], "abs") == doctest::Approx(kPi / 2.0).epsilon(1e-12));
    std::filesystem::remove(conf);
    std::filesystem::remove(out);
  }
}

TEST_CASE("bound command") {
  const RunOutput r = run_tool("bound --geometry sphere --theorem t1 --resolution 128 --modes 1");
  REQUIRE(r.code == 0);
  const nlohmann::json j = nlohmann::json::parse(r.out);
  const auto& b = j["results"][0];
  CHECK(b["theorem"] == "T1");
  CHECK(field(b, "rhs") == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(field(b, "gap") >= -field(b, "tolerance"));
  CHECK(b["hypothesesOk"] == true);
  CHECK(b["rhsProvenance"] == "closed form");
  CHECK_FALSE(b["equality"].is_null());
}

TEST_CASE("verify command") {
  const RunOutput r = run_tool("verify --suite identities --instances 2 --seed 3");
  REQUIRE(r.code == 0);
  const nlohmann::json j = nlohmann::json::parse(r.out);
  CHECK(j["kind"] == "verify");
  REQUIRE(!j["results"].empty());
  for (const auto& c : j["results"]) {
    CHECK(c["pass"] == true);
    CHECK(c.contains("criterion"));
    CHECK(c.contains("provenance"));
  }
}

TEST_CASE("exit codes") {
  CHECK(run_tool("spectrum --geometry torus --spin 2,0").code == kExitConfigError);
  CHECK(run_tool("spectrum --geometry klein").code == kExitConfigError);
  CHECK(run_tool("spectrum --bogus 1").code == kExitConfigError);
  CHECK(run_tool("").code == kExitConfigError);
  CHECK(run_tool("bound --geometry disk --theorem thm2").code == kExitConfigError);
  CHECK(run_tool("converge --refinements 2").code == kExitConfigError);
  CHECK(run_tool("spectrum --config /nonexistent/diracbound.conf").code == kExitConfigError);
  // a residual tolerance below rounding cannot be met
  CHECK(run_tool("spectrum --geometry torus --spin 1,1 -k 4 --resolution 8 --tol 1e-300").code ==
        kExitSolverFailure);
  CHECK(run_tool("--help").code == kExitOk);
}
