#include "fsp/birth_death.hpp"

#include <cmath>
#include <stdexcept>

namespace fsp {

DeathRule DeathRule::ratio(double tau, ScanMode scan) {
  if (!(tau > 0.0)) throw std::invalid_argument("death rule: tau_death must be positive");
  return {DeathVariant::Ratio, scan, tau};
}

void BirthRule::validate() const {
  if (candidates_per_iter < 1) throw std::invalid_argument("birth rule: candidates_per_iter must be >= 1");
  if (std::isnan(threshold_coeff)) throw std::invalid_argument("birth rule: threshold is NaN");
}

namespace {

bool qualifies(const DeathRule& rule, double cert, double weight, double eps_k) {
  if (rule.variant == DeathVariant::Theory) return cert >= 0.0 && weight <= std::sqrt(2.0) * eps_k;
  if (weight <= 0.0) return cert > 0.0;
  return cert / weight > rule.tau_death;
}

struct Candidates {
  std::vector<Vector> points;
  std::vector<int> signs;
};

Candidates draw_candidates(const Problem& problem, int count, RandomStream& rng) {
  Candidates c;
  c.points.reserve(count);
  c.signs.reserve(count);
  for (int i = 0; i < count; ++i) {
    c.points.push_back(sample_uniform(problem.domain, rng));
    c.signs.push_back(problem.signed_measures ? (rng.uniform() < 0.5 ? 1 : -1) : 1);
  }
  return c;
}

BirthOutcome accept(const Candidates& c, std::span<const double> certs, double level, double mass) {
  BirthOutcome out;
  out.candidates = c.points.size();
  for (std::size_t i = 0; i < c.points.size(); ++i)
    if (certs[i] <= level) out.born.push_back(Particle{mass, c.signs[i], c.points[i]});
  return out;
}

}  // namespace

std::vector<std::size_t> select_deaths(const ParticleSwarm& swarm, std::span<const double> pushed_certs,
                                       const DeathRule& rule, double eps_k, RandomStream& rng) {
  if (pushed_certs.size() != swarm.size()) throw std::invalid_argument("select_deaths: certificate count mismatch");
  std::vector<std::size_t> out;
  if (swarm.empty()) return out;
  if (rule.scan == ScanMode::SingleUniform) {
    const std::size_t j = rng.index(swarm.size());
    if (qualifies(rule, pushed_certs[j], swarm[j].weight, eps_k)) out.push_back(j);
    return out;
  }
  for (std::size_t j = 0; j < swarm.size(); ++j)
    if (qualifies(rule, pushed_certs[j], swarm[j].weight, eps_k)) out.push_back(j);
  return out;
}

BirthOutcome propose_births(const Problem& problem, const ParticleSwarm& swarm, const BirthRule& rule,
                            double eps_k, std::size_t m_k, const MiniBatch& batch, RandomStream& rng) {
  rule.validate();
  const double level = birth_level(rule.threshold_coeff, m_k);
  const double mass = rule.birth_mass > 0.0 ? rule.birth_mass : eps_k;
  Candidates c = draw_candidates(problem, rule.candidates_per_iter, rng);
  std::vector<double> certs(c.points.size());
  estimate_certificate_and_grad(problem, swarm, c.points, c.signs, batch, certs, {});
  return accept(c, certs, level, mass);
}

BirthOutcome propose_births_exact(const Problem& problem, const ParticleSwarm& swarm, const BirthRule& rule,
                                  double eps_k, std::size_t m_k, RandomStream& rng) {
  rule.validate();
  const double level = birth_level(rule.threshold_coeff, m_k);
  const double mass = rule.birth_mass > 0.0 ? rule.birth_mass : eps_k;
  Candidates c = draw_candidates(problem, rule.candidates_per_iter, rng);
  std::vector<double> certs(c.points.size());
  dual_certificates(problem, swarm, c.points, c.signs, certs);
  return accept(c, certs, level, mass);
}

ParticleSwarm apply_mass_tweak(const ParticleSwarm& swarm, std::span<const std::size_t> deaths,
                               const ParticleSwarm& births) {
  std::vector<char> dead(swarm.size(), 0);
  for (std::size_t j : deaths) {
    if (j >= swarm.size()) throw std::invalid_argument("apply_mass_tweak: death index out of range");
    if (dead[j]) throw std::invalid_argument("apply_mass_tweak: duplicate death index");
    dead[j] = 1;
  }
  ParticleSwarm out;
  for (std::size_t j = 0; j < swarm.size(); ++j)
    if (!dead[j]) out.push_back(swarm[j]);
  out.append(births);
  return out;
}

}  // namespace fsp
