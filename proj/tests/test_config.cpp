#include <doctest.h>

#include <sstream>

#include "fsp/config.hpp"

using namespace fsp;

namespace {

ConfigFile parse(const std::string& text) {
  std::istringstream in(text);
  return ConfigFile::parse(in, "/tmp/cfgdir");
}

const char* kSynthetic = R"(
# comment
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
K = 20
seed = 4
init_particles = 5
init_mass = 1.6
)";

}  // namespace

TEST_CASE("parser rejects unknown sections, keys and duplicates") {
  CHECK_THROWS_AS(parse("[nope]\n"), ConfigError);
  CHECK_THROWS_AS(parse("[run]\nKK = 3\n"), ConfigError);
  CHECK_THROWS_AS(parse("[run]\nK = 3\nK = 4\n"), ConfigError);
  CHECK_THROWS_AS(parse("K = 3\n"), ConfigError);
  CHECK_THROWS_AS(parse("[run\n"), ConfigError);
  const ConfigFile ok = parse("[run]\nK = 3   # trailing\n");
  CHECK(ok.get("run", "K") == "3");
  CHECK_FALSE(ok.get("run", "seed").has_value());
}

TEST_CASE("paths resolve against the config directory") {
  const ConfigFile c = parse("[run]\nK = 1\n");
  CHECK(c.resolve("data/x.csv") == std::filesystem::path("/tmp/cfgdir/data/x.csv"));
  CHECK(c.resolve("/abs/x.csv") == std::filesystem::path("/abs/x.csv"));
}

TEST_CASE("theory profile calibrates the synthetic problem") {
  const Setup s = build_setup(parse(kSynthetic));
  CHECK(s.profile == Profile::Theory);
  CHECK(s.rates_mode == "calibrated");
  REQUIRE(s.calibration.has_value());
  REQUIRE(s.oracle.has_value());
  CHECK(s.run.alpha == s.calibration->alpha);
  CHECK(s.run.K == 20);
  CHECK(s.run.seed == 4);
  CHECK(s.run.death.variant == DeathVariant::Theory);
  CHECK(plan_name(s.run.plan) == "anytime");
  CHECK(s.oracle->a_exponent == doctest::Approx(1.0 / 6.0));
  CHECK(tv_norm(s.run.initial) == doctest::Approx(1.6));
  const Setup t = build_setup(parse(kSynthetic), SetupOptions{std::nullopt, 99, false});
  CHECK(t.run.seed == 99);
}

TEST_CASE("experiments profile defaults") {
  ConfigFile c = parse(kSynthetic);
  c.set("rates", "alpha", "0.5");
  c.set("rates", "beta", "0.01");
  const Setup s = build_setup(c, SetupOptions{Profile::Experiments, std::nullopt, false});
  CHECK(s.rates_mode == "manual");
  CHECK(s.run.alpha == 0.5);
  CHECK(s.run.death.variant == DeathVariant::Ratio);
  CHECK(plan_name(s.run.plan) == "constant");
  CHECK_FALSE(s.calibration.has_value());
}

TEST_CASE("manual rates must be present and inside the calibrated range") {
  ConfigFile c = parse(kSynthetic);
  c.set("rates", "mode", "manual");
  CHECK_THROWS_AS(build_setup(c), ConfigError);
  ConfigFile d = parse(kSynthetic);
  d.set("rates", "alpha", "10");
  CHECK_THROWS_AS(build_setup(d), ConfigError);
}

TEST_CASE("relu kernels cannot be calibrated") {
  const char* relu = R"(
[problem]
model = relu
features = 3
n_samples = 200
teacher_neurons = 3
noise = 0.1
kappa = 0.001
[rates]
mode = calibrated
audit_points = 50
)";
  CHECK_THROWS_AS(build_setup(parse(relu)), CalibrationUnavailable);
}

TEST_CASE("bad values are configuration errors") {
  ConfigFile c = parse(kSynthetic);
  c.set("run", "K", "abc");
  CHECK_THROWS_AS(build_setup(c), ConfigError);
  ConfigFile d = parse(kSynthetic);
  d.set("problem", "model", "bogus");
  CHECK_THROWS_AS(build_setup(d), ConfigError);
  CHECK_THROWS_AS(parse_profile("fast"), ConfigError);
  CHECK_THROWS_AS(ConfigFile::load("/nonexistent/x.ini"), ConfigError);
}

TEST_CASE("gmm calibration report warns about the normalization") {
  const char* gmm = R"(
[problem]
model = gmm
preset = desk
n_samples = 200
kappa = 0.0001
[rates]
audit_points = 50
[run]
init_particles = 5
)";
  const Setup s = build_setup(parse(gmm), SetupOptions{std::nullopt, std::nullopt, true});
  std::ostringstream out;
  write_calibration_report(out, s);
  CHECK(out.str().find("normaliz") != std::string::npos);
}
