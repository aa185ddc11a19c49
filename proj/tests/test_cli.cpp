#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include "fsp/cli.hpp"

namespace fs = std::filesystem;

namespace {

std::string cli() {
  const char* p = std::getenv("FSP_CLI");
  return p ? p : "./fsp";
}

int run_cli(const std::string& args, const std::string& log = "cli_test.log") {
  const int status = std::system((cli() + " " + args + " > " + log + " 2>&1").c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

const fs::path kWork = "cli_work";

fs::path write_config(const std::string& name, const std::string& text) {
  fs::create_directories(kWork);
  const fs::path p = kWork / name;
  std::ofstream(p) << text;
  return p;
}

const char* kSmall = R"(
[problem]
model = synthetic
dim = 1
sigma = 0.5
atoms = 0.3; 0.7
atom_weights = 1.0, 0.6
n_samples = 64
noise_y = 0.2
noise_kernel = 0.2
kappa = 0.05
[rates]
audit_points = 100
[run]
K = 30
seed = 2
init_particles = 5
init_mass = 1.6
)";

}  // namespace

TEST_CASE("usage errors exit with 2") {
  CHECK(run_cli("") == 2);
  CHECK(run_cli("frobnicate") == 2);
  CHECK(run_cli("run") == 2);
  CHECK(run_cli("verify --suite nonsense") == 2);
  CHECK(run_cli("run --config " + write_config("bad.ini", "[run]\nunknown_key = 1\n").string()) == 2);
}

TEST_CASE("verify suites exit 0") {
  CHECK(run_cli("verify --suite projection") == 0);
  CHECK(run_cli("verify --suite frechet") == 0);
}

TEST_CASE("calibrate prints the report or exits 2 without positivity") {
  const fs::path ok = write_config("small.ini", kSmall);
  CHECK(run_cli("calibrate --config " + ok.string(), "cal.log") == 0);
  CHECK(slurp("cal.log").find("C_TV") != std::string::npos);
  const fs::path relu = write_config("relu.ini", R"(
[problem]
model = relu
features = 2
n_samples = 100
teacher_neurons = 2
kappa = 0.001
[rates]
mode = calibrated
audit_points = 30
)");
  CHECK(run_cli("calibrate --config " + relu.string()) == 2);
}

TEST_CASE("run writes artifacts and is byte-deterministic") {
  const fs::path cfg = write_config("small.ini", kSmall);
  const fs::path a = kWork / "out_a", b = kWork / "out_b";
  fs::remove_all(a);
  fs::remove_all(b);
  REQUIRE(run_cli("run --config " + cfg.string() + " --out " + a.string()) == 0);
  REQUIRE(run_cli("run --config " + cfg.string() + " --out " + b.string()) == 0);
  for (const char* f : {"trace.csv", "final_swarm.csv", "summary.txt"}) CHECK(fs::exists(a / f));
  CHECK(slurp(a / "trace.csv") == slurp(b / "trace.csv"));
  CHECK(slurp(a / "final_swarm.csv") == slurp(b / "final_swarm.csv"));
  const fs::path c = kWork / "out_c";
  REQUIRE(run_cli("run --config " + cfg.string() + " --out " + c.string() + " --seed 3") == 0);
  CHECK(slurp(a / "trace.csv") != slurp(c / "trace.csv"));

  std::string longer = kSmall;
  longer.replace(longer.find("K = 30"), 6, "K = 60");
  const fs::path d = kWork / "out_d";
  REQUIRE(run_cli("run --config " + write_config("longer.ini", longer).string() + " --out " + d.string()) == 0);

  CHECK(run_cli("report " + (a / "trace.csv").string() + " " + (d / "trace.csv").string() + " --dim 1",
                "report.log") == 0);
  const std::string rep = slurp("report.log");
  CHECK(rep.find("slope") != std::string::npos);
  CHECK(run_cli("report " + (kWork / "missing.csv").string()) == 1);
}

TEST_CASE("log-log fit") {
  const std::vector<double> x{1, 4, 16, 64};
  std::vector<double> y;
  for (double v : x) y.push_back(3.0 / std::sqrt(v));
  const fsp::SlopeFit f = fsp::fit_loglog(x, y);
  CHECK(f.slope == doctest::Approx(-0.5));
  CHECK(std::exp(f.intercept) == doctest::Approx(3.0));
  const std::vector<double> same{2, 2};
  const std::vector<double> yy{1, 1};
  CHECK_THROWS(fsp::fit_loglog(same, yy));
  const std::vector<double> neg{-1, 1};
  CHECK_THROWS(fsp::fit_loglog(std::vector<double>{1, 2}, neg));
}
