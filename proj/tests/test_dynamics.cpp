#include <doctest.h>

#include <cmath>

#include "fsp/dynamics.hpp"
#include "fsp/verify.hpp"

using namespace fsp;

TEST_CASE("zero rates leave the swarm bitwise unchanged") {
  RandomStream rng(1);
  const Problem pb = small_synthetic_problem(2, 1);
  const ParticleSwarm sw = random_swarm(pb, 6, 1.0, rng);
  CHECK(exact_step(pb, sw, {0.0, 0.0}) == sw);
  std::vector<double> certs(sw.size(), 3.0);
  CHECK(weight_push_update(pb, sw, certs, {}, {0.0, 0.0}) == sw);
}

TEST_CASE("weight halves when the certificate equals log 2 over alpha") {
  const Problem pb = small_synthetic_problem(1, 1);
  ParticleSwarm sw;
  sw.push_back({0.8, 1, Vector{{0.5}}});
  const double alpha = 0.01;
  const std::vector<double> certs{std::log(2.0) / alpha};
  const ParticleSwarm out = weight_push_update(pb, sw, certs, {}, {alpha, 0.0});
  CHECK(out[0].weight == doctest::Approx(0.4));
  CHECK(out[0].position == sw[0].position);
}

TEST_CASE("positions stay in the domain after arbitrary steps") {
  RandomStream rng(2);
  const Problem pb = small_synthetic_problem(2, 3);
  for (int trial = 0; trial < 50; ++trial) {
    const ParticleSwarm sw = random_swarm(pb, 5, 1.0, rng);
    std::vector<double> certs(5);
    std::vector<Vector> grads(5);
    for (int j = 0; j < 5; ++j) {
      certs[j] = rng.normal();
      grads[j] = Vector{{50.0 * rng.normal(), 50.0 * rng.normal()}};
    }
    const ParticleSwarm out = weight_push_update(pb, sw, certs, grads, {0.1, 1.0});
    for (const auto& p : out) CHECK(pb.domain.contains(p.position));
  }
}

TEST_CASE("mass never grows when every certificate is nonnegative") {
  RandomStream rng(3);
  const Problem base = small_synthetic_problem(1, 2, 0.2, 0.5);
  const Problem pb(base.model, base.domain, 50.0);
  ParticleSwarm sw = random_swarm(pb, 5, 1.0, rng);
  for (int k = 0; k < 20; ++k) {
    const double before = tv_norm(sw);
    std::vector<double> certs;
    sw = exact_step(pb, sw, {0.01, 0.01}, &certs);
    for (double c : certs) REQUIRE(c >= 0.0);
    CHECK(tv_norm(sw) <= before);
  }
}

TEST_CASE("descent inequality for small rates") {
  RandomStream rng(4);
  const Problem pb = small_synthetic_problem(1, 4, 0.0, 0.5);
  for (int trial = 0; trial < 20; ++trial) {
    const ParticleSwarm sw = random_swarm(pb, 4, 1.0, rng);
    std::vector<double> certs;
    std::vector<Vector> pis;
    const StepRates rates{1e-3, 1e-3};
    exact_step(pb, sw, rates, &certs, &pis);
    const DescentCheck dc = descent_check(pb, sw, rates, certs, pis);
    CHECK(dc.holds);
    CHECK(dc.rhs <= 0.0);
  }
  const ParticleSwarm sw = random_swarm(pb, 3, 1.0, rng);
  std::vector<double> certs;
  std::vector<Vector> pis;
  exact_step(pb, sw, {0.0, 0.0}, &certs, &pis);
  const DescentCheck zero = descent_check(pb, sw, {0.0, 0.0}, certs, pis);
  CHECK(zero.lhs == 0.0);
  CHECK(zero.rhs == 0.0);
  CHECK(zero.holds);
}

TEST_CASE("rates are validated") {
  const Problem pb = small_synthetic_problem(1, 1);
  ParticleSwarm sw;
  sw.push_back({1.0, 1, Vector{{0.5}}});
  const std::vector<double> c{0.0};
  CHECK_THROWS_AS(weight_push_update(pb, sw, c, {}, {-1.0, 0.0}), std::invalid_argument);
  CHECK_THROWS_AS(weight_push_update(pb, sw, c, {}, {0.1, 0.5}), std::invalid_argument);
}
