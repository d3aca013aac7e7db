#include <sys/wait.h>
#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "json.hpp"

namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("selforg_cli_" + name + "_" + std::to_string(::getpid()));
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

int run(const std::string& args) {
  const std::string cmd = std::string(SELFORG_CLI) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST_CASE("map-params example") {
  const fs::path out = fresh_dir("map");
  REQUIRE(run("map-params --set delta_1=-1 --set delta_2=-1 --set kappa_1=1 --set kappa_2=1 "
              "--set s_1=0.1 --set s_2=0.1 --set n_atoms=100 --out " + out.string()) == 0);
  const auto j = nlohmann::json::parse(slurp(out / "effective_model.json"));
  CHECK(j.at("alpha_1").get<double>() == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(j.at("alpha_2").get<double>() == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(j.at("beta").get<double>() == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(j.at("eta_1").get<double>() == 0.0);
  CHECK(j.at("eta_2").get<double>() == 0.0);
  CHECK(j.contains("manifest_id"));
  fs::remove_all(out);
}

TEST_CASE("config file and shape of a 3x3 phase diagram") {
  const fs::path out = fresh_dir("pd");
  {
    std::ofstream cfg(out / "grid.cfg");
    cfg << "# tiny grid\nschema_version = 1\nn_1 = 3\nn_2 = 3\n";
  }
  REQUIRE(run("phase-diagram --config " + (out / "grid.cfg").string() + " --out " + out.string()) == 0);
  std::istringstream csv(slurp(out / "phase_diagram.csv"));
  std::string line;
  int rows = 0;
  std::getline(csv, line);
  CHECK(line.rfind("# manifest_id=", 0) == 0);
  const std::string id = line.substr(14);
  std::getline(csv, line);
  CHECK(line == "alpha_1,alpha_2,phase,theta_1,theta_2,free_energy");
  while (std::getline(csv, line)) ++rows;
  CHECK(rows == 9);
  const auto j = nlohmann::json::parse(slurp(out / "phase_diagram.json"));
  CHECK(j.at("manifest_id") == id);
  CHECK(j.contains("overlays"));

  // The manifest records every output and is appended, never rewritten.
  REQUIRE(run("phase-diagram --config " + (out / "grid.cfg").string() + " --out " + out.string()) == 0);
  std::istringstream log(slurp(out / "manifests.jsonl"));
  int entries = 0;
  while (std::getline(log, line)) {
    const auto m = nlohmann::json::parse(line);
    CHECK(m.at("id") == id);
    CHECK(m.at("outputs").size() == 2);
    ++entries;
  }
  CHECK(entries == 2);
  fs::remove_all(out);
}

TEST_CASE("exit codes") {
  const fs::path out = fresh_dir("exit");
  const std::string o = " --out " + out.string();
  CHECK(run("--help") == 0);
  CHECK(run("") == 1);
  CHECK(run("no-such-command") == 1);
  CHECK(run("map-params --set alpha=1" + o) == 1);      // unknown key
  CHECK(run("map-params --set delta_1=+1" + o) == 1);   // no stationary state
  CHECK(run("md --set epsilon=-9" + o) == 1);           // below the potential floor
  CHECK(run("fixed-points --seed 3" + o) == 1);         // deterministic command takes no seed
  CHECK(run("map-params --config /nonexistent.cfg" + o) == 1);
  CHECK(run("langevin --set n_steps=100 --set momentum_bound=1e-3" + o) == 2);
  CHECK(run("fixed-points --set alpha_1=0.3" + o) == 0);
  fs::remove_all(out);
}

TEST_CASE("environment defaults for output directory and threads") {
  const fs::path out = fresh_dir("env");
  const std::string cmd = "SELFORG_OUT_DIR=" + out.string() + " SELFORG_THREADS=2 " + std::string(SELFORG_CLI) +
                          " fixed-points >/dev/null 2>&1";
  CHECK(std::system(cmd.c_str()) == 0);
  CHECK(fs::exists(out / "fixed_points.csv"));
  const auto m = nlohmann::json::parse(slurp(out / "manifests.jsonl"));
  CHECK(m.at("threads") == 2);
  fs::remove_all(out);
}
