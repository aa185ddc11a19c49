#include <doctest.h>

#include <cmath>
#include <limits>

#include "fsp/birth_death.hpp"
#include "fsp/verify.hpp"

using namespace fsp;

namespace {

ParticleSwarm line_swarm(std::vector<double> weights) {
  ParticleSwarm s;
  for (std::size_t j = 0; j < weights.size(); ++j) s.push_back({weights[j], 1, Vector{{0.1 * static_cast<double>(j)}}});
  return s;
}

}  // namespace

TEST_CASE("ratio death compares certificate over weight with tau") {
  RandomStream rng(1);
  const ParticleSwarm sw = line_swarm({1.0, 1.0, 0.1});
  const std::vector<double> certs{6.0, 4.0, 0.6};
  const auto d = select_deaths(sw, certs, DeathRule::ratio(5.0), 0.1, rng);
  CHECK(d == std::vector<std::size_t>{0, 2});
}

TEST_CASE("theory death needs a nonnegative certificate and a small weight") {
  RandomStream rng(1);
  const double eps = 0.1;
  const ParticleSwarm sw = line_swarm({2 * eps, std::sqrt(2.0) * eps, 0.05, 0.05});
  const std::vector<double> certs{1.0, 0.0, 1.0, -0.01};
  const auto d = select_deaths(sw, certs, DeathRule::theory(), eps, rng);
  CHECK(d == std::vector<std::size_t>{1, 2});
  const std::vector<double> negative(4, -1.0);
  CHECK(select_deaths(sw, negative, DeathRule::theory(), eps, rng).empty());
  CHECK(select_deaths(sw, negative, DeathRule::ratio(1.0), eps, rng).empty());
}

TEST_CASE("single uniform scan tests at most one particle") {
  RandomStream rng(2);
  const ParticleSwarm sw = line_swarm(std::vector<double>(10, 0.01));
  const std::vector<double> certs(10, 1.0);
  for (int i = 0; i < 50; ++i)
    CHECK(select_deaths(sw, certs, DeathRule::theory(ScanMode::SingleUniform), 0.1, rng).size() == 1);
  CHECK(select_deaths(ParticleSwarm{}, {}, DeathRule::theory(), 0.1, rng).empty());
}

TEST_CASE("infinite threshold accepts every candidate at mass eps") {
  RandomStream rng(3);
  const Problem pb = small_synthetic_problem(2, 1);
  BirthRule rule;
  rule.threshold_coeff = std::numeric_limits<double>::infinity();
  rule.candidates_per_iter = 7;
  const BirthOutcome out = propose_births(pb, ParticleSwarm{}, rule, 0.05, 16, draw_batch(rng, 16, pb.model->n_samples()), rng);
  CHECK(out.candidates == 7);
  REQUIRE(out.born.size() == 7);
  for (const auto& p : out.born) {
    CHECK(p.weight == 0.05);
    CHECK(pb.domain.contains(p.position));
  }
  rule.threshold_coeff = -std::numeric_limits<double>::infinity();
  CHECK(propose_births_exact(pb, ParticleSwarm{}, rule, 0.05, 16, rng).born.empty());
  rule.threshold_coeff = std::numeric_limits<double>::infinity();
  rule.birth_mass = 0.3;
  CHECK(propose_births_exact(pb, ParticleSwarm{}, rule, 0.05, 16, rng).born[0].weight == 0.3);
}

TEST_CASE("exact births only keep candidates below the level") {
  RandomStream rng(4);
  const Problem base = small_synthetic_problem(1, 2, 0.2, 0.5);
  const Problem pb(base.model, base.domain, 1.2);
  BirthRule rule;
  rule.threshold_coeff = 0.0;
  rule.candidates_per_iter = 200;
  const BirthOutcome out = propose_births_exact(pb, ParticleSwarm{}, rule, 0.01, 50, rng);
  CHECK(!out.born.empty());
  CHECK(out.born.size() < 200);
  for (const auto& p : out.born) CHECK(dual_certificate(pb, ParticleSwarm{}, p.position, p.sign) <= 0.0);
}

TEST_CASE("signed problems give births of both signs") {
  RandomStream rng(5);
  const Problem base = small_synthetic_problem(1, 2);
  const Problem pb(base.model, base.domain, base.kappa, true);
  BirthRule rule;
  rule.threshold_coeff = std::numeric_limits<double>::infinity();
  rule.candidates_per_iter = 100;
  int neg = 0;
  for (const auto& p : propose_births_exact(pb, ParticleSwarm{}, rule, 0.01, 4, rng).born) neg += p.sign < 0;
  CHECK(neg > 25);
  CHECK(neg < 75);
}

TEST_CASE("mass tweak bookkeeping") {
  const ParticleSwarm sw = line_swarm({1, 2, 3, 4});
  const ParticleSwarm born = line_swarm({9});
  const std::vector<std::size_t> dead{1, 3};
  const ParticleSwarm out = apply_mass_tweak(sw, dead, born);
  REQUIRE(out.size() == 3);
  CHECK(out[0].weight == 1);
  CHECK(out[1].weight == 3);
  CHECK(out[2].weight == 9);
  const std::vector<std::size_t> dup{1, 1};
  CHECK_THROWS_AS(apply_mass_tweak(sw, dup, born), std::invalid_argument);
  const std::vector<std::size_t> oob{4};
  CHECK_THROWS_AS(apply_mass_tweak(sw, oob, born), std::invalid_argument);
}

TEST_CASE("one theory death plus one birth moves the certificate by at most (sqrt2+1) eps") {
  RandomStream rng(6);
  const Problem pb = small_synthetic_problem(1, 3, 0.2, 0.4);
  const auto grid = lattice(pb.domain, 200);
  const double eps = 0.05;
  for (int trial = 0; trial < 20; ++trial) {
    ParticleSwarm sw = random_swarm(pb, 6, 1.0, rng);
    sw[0].weight = std::sqrt(2.0) * eps * rng.uniform();
    std::vector<double> certs(sw.size(), 0.0);
    certs[0] = 1.0;
    const auto dead = select_deaths(sw, certs, DeathRule::theory(), eps, rng);
    BirthRule rule;
    rule.threshold_coeff = std::numeric_limits<double>::infinity();
    const BirthOutcome b = propose_births_exact(pb, sw, rule, eps, 10, rng);
    const ParticleSwarm after = apply_mass_tweak(sw, dead, b.born);
    CHECK(after.size() == sw.size() - dead.size() + b.born.size());
    double worst = 0.0;
    for (const auto& t : grid)
      for (int s : pb.admissible_signs())
        worst = std::max(worst, std::abs(dual_certificate(pb, after, t, s) - dual_certificate(pb, sw, t, s)));
    CHECK(worst <= (std::sqrt(2.0) + 1.0) * eps + 1e-12);
  }
}

TEST_CASE("birth rule validation") {
  BirthRule r;
  r.candidates_per_iter = 0;
  CHECK_THROWS_AS(r.validate(), std::invalid_argument);
  CHECK_THROWS_AS(DeathRule::ratio(-1.0), std::invalid_argument);
}
