#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

namespace fs = std::filesystem;

namespace {

const fs::path work = fs::temp_directory_path() / "ewm_cli_test";

int cli(const std::string& args) {
  const std::string cmd = std::string(EWM_CLI_PATH) + " " + args + " > " + (work / "last.log").string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

nlohmann::json load(const fs::path& p) { return nlohmann::json::parse(slurp(p)); }

struct Workdir {
  Workdir() {
    fs::remove_all(work);
    fs::create_directories(work);
  }
};

}  // namespace

TEST_CASE_FIXTURE(Workdir, "stationary writes a solution and sidecar") {
  const auto out = work / "stat";
  {
    std::ofstream c(work / "round.json");
    c << R"({"surface": {"kind": "round"}, "l": 1})";
  }
  REQUIRE(cli("stationary --config " + (work / "round.json").string() + " --out " + out.string()) == 0);
  CHECK(slurp(out / "solution.csv").rfind("r,phi\n", 0) == 0);
  const auto j = load(out / "solution.json");
  CHECK(j["converged"] == true);
  CHECK(j["degree"] == 1);
  CHECK(j["config_hash"].get<std::string>().size() == 16);
  for (const char* k : {"l", "omega", "action", "residual_norm", "exponents"}) CHECK(j.contains(k));
}

TEST_CASE_FIXTURE(Workdir, "refusals and config errors exit 2") {
  CHECK(cli("evolve --set evolve.cfl=1.5 --out " + (work / "e").string()) == 2);
  CHECK(slurp(work / "last.log").find("cfl") != std::string::npos);
  CHECK(cli("stationary --set omgea=0.5") == 2);
  CHECK(slurp(work / "last.log").find("omgea") != std::string::npos);
  CHECK(cli("stationary --set surface.kind=\\\"tabulated\\\" --set surface.table=\\\"/nope.csv\\\"") == 2);
  CHECK(cli("stationary --set solver.max_iter=1 --set grid.N=400 --out " + (work / "nc").string()) == 2);
}

TEST_CASE_FIXTURE(Workdir, "evolution abort exits 3") {
  CHECK(cli("evolve --set grid.N=200 --set omega=0.5 --set evolve.delta=0.1 --set evolve.constraint_limit=1e-300 --out " +
            (work / "ab").string()) == 3);
  const auto j = load(work / "ab" / "evolve.json");
  CHECK(j["aborted"] == true);
  CHECK(j["failure"].get<std::string>().find("constraint") != std::string::npos);
}

TEST_CASE_FIXTURE(Workdir, "stability writes a series and a verdict, reproducibly") {
  const std::string args = "stability --set grid.N=400 --set omega=0.5 --set stability.delta=1e-3 --seed 4 --out ";
  REQUIRE(cli(args + (work / "a").string()) == 0);
  REQUIRE(cli(args + (work / "b").string()) == 0);
  const auto header = slurp(work / "a" / "series.csv").substr(0, 50);
  CHECK(header.rfind("t,E,Q,D,G,identity_residual,X,flux,dist\n", 0) == 0);
  const auto j = load(work / "a" / "stability.json");
  CHECK(j["verdict"] == "stable");
  CHECK(j.contains("sup_dist"));
  CHECK(j.contains("drifts"));
  CHECK(slurp(work / "a" / "series.csv") == slurp(work / "b" / "series.csv"));
  CHECK(slurp(work / "a" / "stability.json") == slurp(work / "b" / "stability.json"));
}

TEST_CASE_FIXTURE(Workdir, "unstable verdict exits 1") {
  CHECK(cli("stability --set grid.N=400 --set omega=0.5 --set stability.delta=0.1 --out " + (work / "u").string()) == 1);
  CHECK(load(work / "u" / "stability.json")["verdict"] == "unstable");
}

TEST_CASE_FIXTURE(Workdir, "every JSON output carries the config hash") {
  const auto out = work / "all";
  CHECK(cli("validate --out " + out.string()) == 0);
  CHECK(cli("evolve --set grid.N=200 --set omega=0.3 --set evolve.delta=1e-3 --out " + out.string()) == 0);
  CHECK(cli("regularity-check --out " + out.string()) == 0);
  CHECK(cli("geometry-check --set geometry.samples=30 --out " + out.string()) == 0);
  int n = 0;
  for (const auto& e : fs::directory_iterator(out))
    if (e.path().extension() == ".json") {
      CHECK(load(e.path()).contains("config_hash"));
      ++n;
    }
  CHECK(n == 5);
  CHECK(fs::exists(out / "snapshot.csv"));
  CHECK(slurp(out / "snapshot.csv").rfind("r,u1,u2,u3,v1,v2,v3\n", 0) == 0);
}

TEST_CASE_FIXTURE(Workdir, "validate reports a failing profile") {
  {
    std::ofstream t(work / "disc.csv");
    t << "r,f\n";
    for (int i = 0; i <= 10; ++i) t << i / 10.0 << "," << i / 10.0 << "\n";
  }
  CHECK(cli("validate --set surface.kind=\\\"tabulated\\\" --set surface.table=\\\"" + (work / "disc.csv").string() +
            "\\\" --out " + (work / "v").string()) == 1);
  const auto j = load(work / "v" / "validate.json");
  CHECK(j["all_passed"] == false);
}
