#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <doctest.h>
#include <json.hpp>

namespace fs = std::filesystem;

namespace {

const fs::path kRoot = fs::temp_directory_path() / "thermoplate_cli";

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path write_config(const std::string& name, const std::string& text) {
  fs::create_directories(kRoot);
  const fs::path p = kRoot / (name + ".ini");
  std::ofstream(p) << text;
  return p;
}

struct Run {
  int code = -1;
  std::string out, err;
};

Run tplate(const std::string& args) {
  fs::create_directories(kRoot);
  const fs::path out = kRoot / "stdout.txt", err = kRoot / "stderr.txt";
  const std::string cmd = std::string(TPLATE_BINARY) + " " + args + " >" + out.string() + " 2>" + err.string();
  const int status = std::system(cmd.c_str());
  Run r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = slurp(out);
  r.err = slurp(err);
  return r;
}

std::vector<std::vector<std::string>> read_csv(const fs::path& p) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(slurp(p));
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

std::string config_file(const char* name) { return std::string(THERMOPLATE_CONFIG_DIR) + "/" + name + ".ini"; }

const char* kLinearShort =
    "[physics]\na = sinusoidal(base=1, amplitude=0.25, frequency=1, phase=0)\n"
    "[integrator]\ndt = 0.01\nt_final = 5\nrecord_stride = 1\n";

}  // namespace

TEST_CASE("zero data without a nonlinearity gives an all-zero series") {
  const auto cfg = write_config("zero", std::string(kLinearShort) + "[initial]\nkind = zero\n");
  const auto r = tplate("simulate --config " + cfg.string() + " --output " + (kRoot / "zero").string());
  REQUIRE(r.code == 0);
  const auto rows = read_csv(kRoot / "zero" / "trajectory.csv");
  REQUIRE(rows.size() > 2);
  CHECK(rows[0][0] == "time");
  for (std::size_t i = 1; i < rows.size(); ++i) {
    for (std::size_t j = 1; j < rows[i].size() - 1; ++j) CHECK(std::stod(rows[i][j]) == 0.0);
  }
  CHECK(fs::exists(kRoot / "zero" / "energy.svg"));
  CHECK(fs::exists(kRoot / "zero" / "report.json"));
}

TEST_CASE("linear config gives a monotone y_norm column") {
  const auto r = tplate("simulate --config " + config_file("linear") + " --output " + (kRoot / "linear").string());
  REQUIRE(r.code == 0);
  const auto rows = read_csv(kRoot / "linear" / "trajectory.csv");
  REQUIRE(rows.size() > 100);
  for (std::size_t i = 2; i < rows.size(); ++i) CHECK(std::stod(rows[i][1]) <= std::stod(rows[i - 1][1]) + 1e-12);
}

TEST_CASE("malformed config exits 1 naming the field") {
  const auto cfg = write_config("bad_eta", "[physics]\neta = -1\n");
  const auto r = tplate("simulate --config " + cfg.string());
  CHECK(r.code == 1);
  CHECK(r.err.find("physics.eta") != std::string::npos);
}

TEST_CASE("usage errors exit 1") {
  CHECK(tplate("simulate").code == 1);
  CHECK(tplate("frobnicate --config x").code == 1);
  CHECK(tplate("simulate --config " + config_file("linear") + " --format xml").code == 1);
  CHECK(tplate("simulate --config /nonexistent.ini").code == 1);
}

TEST_CASE("tight coefficient bounds surface as a failed check") {
  const auto cfg = write_config(
      "tight", "[physics]\na = sinusoidal(base=1, amplitude=0.25, frequency=1, phase=0)\na_lower = 0.75\n"
               "a_hoelder_c = 0.1\n[integrator]\ndt = 0.01\nt_final = 1\n");
  const auto r = tplate("verify --config " + cfg.string() + " --output " + (kRoot / "tight").string());
  CHECK(r.code == 3);
  const auto rep = nlohmann::json::parse(slurp(kRoot / "tight" / "report.json"));
  CHECK_FALSE(rep["all_pass"].get<bool>());
  bool found = false;
  for (const auto& c : rep["checks"]) {
    if (c["name"] == "coefficients.validate_a") found = !c["pass"].get<bool>();
  }
  CHECK(found);
}

TEST_CASE("eta above two fails verification with the hypothesis") {
  const auto cfg = write_config("eta3", "[physics]\neta = 3\n[integrator]\ndt = 0.01\nt_final = 1\n");
  const auto r = tplate("verify --config " + cfg.string() + " --output " + (kRoot / "eta3").string());
  CHECK(r.code == 3);
  CHECK(r.err.find("eta <= 2") != std::string::npos);
}

TEST_CASE("shipped default config verifies") {
  const auto r = tplate("verify --config " + config_file("sine") + " --output " + (kRoot / "verify").string());
  CHECK(r.code == 0);
}

TEST_CASE("linear pullback distances decrease strictly") {
  const auto cfg = write_config(
      "pb", std::string(kLinearShort) + "[attractor]\nschedule = 5, 10, 20\nmembers = 5\ntol = 1e-12\n");
  const auto r = tplate("attractor --config " + cfg.string() + " --output " + (kRoot / "pb").string());
  REQUIRE(r.code == 0);
  const auto rows = read_csv(kRoot / "pb" / "pullback.csv");
  REQUIRE(rows.size() == 4);
  CHECK(rows[0][3] == "d_n");
  CHECK(std::stod(rows[3][3]) < std::stod(rows[2][3]));
}

TEST_CASE("outputs are bit-identical across thread counts and reruns") {
  const std::string cfg = config_file("sine");
  for (const char* cmd : {"attractor", "simulate"}) {
    CAPTURE(cmd);
    const fs::path a = kRoot / (std::string(cmd) + "_t1"), b = kRoot / (std::string(cmd) + "_t4"),
                   c = kRoot / (std::string(cmd) + "_again");
    REQUIRE(tplate(std::string(cmd) + " --config " + cfg + " --threads 1 --seed 5 --output " + a.string()).code == 0);
    REQUIRE(tplate(std::string(cmd) + " --config " + cfg + " --threads 4 --seed 5 --output " + b.string()).code == 0);
    REQUIRE(tplate(std::string(cmd) + " --config " + cfg + " --threads 4 --seed 5 --output " + c.string()).code == 0);
    for (const auto& entry : fs::directory_iterator(a)) {
      const auto name = entry.path().filename();
      if (name == "report.json") continue;
      CAPTURE(name.string());
      CHECK(slurp(entry.path()) == slurp(b / name));
      CHECK(slurp(entry.path()) == slurp(c / name));
    }
  }
  const auto d = kRoot / "attractor_seed6";
  REQUIRE(tplate("attractor --config " + cfg + " --seed 6 --output " + d.string()).code == 0);
  CHECK(slurp(d / "attractor.tplt") != slurp(kRoot / "attractor_t1" / "attractor.tplt"));
}

TEST_CASE("json format") {
  const auto r = tplate("simulate --config " + config_file("linear") + " --format json --output " +
                        (kRoot / "json").string());
  REQUIRE(r.code == 0);
  const auto j = nlohmann::json::parse(slurp(kRoot / "json" / "trajectory.json"));
  CHECK(j["columns"][0] == "time");
  CHECK(j["rows"].size() > 10);
}

TEST_CASE("decay fit on the single-mode config matches the cubic root") {
  const auto r = tplate("decay-fit --config " + config_file("single_mode") + " --output " + (kRoot / "df").string());
  REQUIRE(r.code == 0);
  const auto rep = nlohmann::json::parse(slurp(kRoot / "df" / "report.json"));
  // slowest root of x^3 + x^2 + 2x + 1 has real part -0.21508
  CHECK(rep["alpha"].get<double>() == doctest::Approx(0.2150798545).epsilon(0.1));
}

TEST_CASE("operator check command") {
  const auto r = tplate("operator-check --config " + config_file("sine") + " --output " + (kRoot / "op").string());
  CHECK(r.code == 0);
  CHECK(fs::exists(kRoot / "op" / "report.json"));
}
