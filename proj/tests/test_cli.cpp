// End-to-end CLI checks: exit codes, artifact emission, and golden-file
// regression on the committed small scenario.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"

namespace {

const std::string kCli = POLEBASIS_CLI_PATH;
const std::string kSource = POLEBASIS_SOURCE_DIR;

std::string tmp_dir(const std::string& tag) {
  auto p = std::filesystem::temp_directory_path() / ("pb_cli_" + tag);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p.string();
}

int run(const std::string& cmd, std::string* output = nullptr) {
  std::string log = tmp_dir("log") + "/out.txt";
  int rc = std::system((cmd + " > " + log + " 2>&1").c_str());
  if (output) {
    std::ifstream in(log);
    std::stringstream ss;
    ss << in.rdbuf();
    *output = ss.str();
  }
  return WEXITSTATUS(rc);
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE_MESSAGE(bool(in), "missing file: " << path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("poles subcommand on the default scenario") {
  std::string dir = tmp_dir("poles");
  int rc = run(kCli + " --out " + dir + " poles");
  CHECK(rc == 0);
  CHECK(std::filesystem::exists(dir + "/poles.csv"));
}

TEST_CASE("verify --list enumerates criteria without running") {
  std::string out;
  int rc = run(kCli + " verify --list", &out);
  CHECK(rc == 0);
  CHECK(out.find("pole-ladder-exactness") != std::string::npos);
  CHECK(out.find("property-suites") != std::string::npos);
  CHECK(out.find("PASS") == std::string::npos);
}

TEST_CASE("invalid scenario exits with code 2") {
  std::string out;
  int rc = run(kCli + " --scenario /no/such/file.scn poles", &out);
  CHECK(rc == 2);
  CHECK(out.find("error") != std::string::npos);
}

TEST_CASE("zero coupling is a structured free-system failure") {
  std::string dir = tmp_dir("zerocoupling");
  {
    std::ofstream sc(dir + "/zero.scn");
    sc << "density.eta = 0\n";
  }
  std::string out;
  int rc = run(kCli + " --scenario " + dir + "/zero.scn --out " + dir + " poles",
               &out);
  CHECK(rc == 2);
  CHECK(out.find("free-system") != std::string::npos);
}

TEST_CASE("perturbed tolerance forces a named verify failure") {
  std::string out;
  int rc = run("POLEBASIS_TOL_EPS_PSD=1e-30 " + kCli + " verify", &out);
  CHECK(rc == 3);
  CHECK(out.find("FAIL") != std::string::npos);
  CHECK(out.find("property-suites") != std::string::npos);
}

TEST_CASE("golden-file regression on the small scenario") {
  std::string dir = tmp_dir("golden");
  std::string scenario = kSource + "/tests/golden/small.scn";
  REQUIRE(std::filesystem::exists(scenario));
  int rc = run(kCli + " --quiet --scenario " + scenario + " --out " + dir +
               " poles");
  REQUIRE(rc == 0);
  rc = run(kCli + " --quiet --scenario " + scenario + " --out " + dir +
           " timescales");
  REQUIRE(rc == 0);
  rc = run(kCli + " --quiet --scenario " + scenario + " --out " + dir + " basis");
  REQUIRE(rc == 0);
  for (const char* name : {"poles.csv", "timescales.txt", "diagonality.csv",
                           "fidelity.csv", "basis.csv"}) {
    std::string got = slurp(dir + "/" + name);
    std::string want = slurp(kSource + "/tests/golden/" + name);
    CHECK_MESSAGE(got == want, "golden mismatch for " << name);
  }
}

TEST_CASE("timescales --samples analyzes a two-column csv") {
  std::string dir = tmp_dir("samples");
  {
    std::ofstream csv(dir + "/sig.csv");
    csv << "time,value\n";
    for (int k = 0; k < 64; ++k) {
      double t = 0.2 * k;
      csv << t << "," << 1.2 * std::exp(-0.5 * t) + 0.3 << "\n";
    }
  }
  std::string out;
  int rc = run(kCli + " --out " + dir + " timescales --samples " + dir +
               "/sig.csv --model-order 1", &out);
  CHECK(rc == 0);
  CHECK(out.find("gamma0") != std::string::npos);
  CHECK(std::filesystem::exists(dir + "/timescales.txt"));
}
