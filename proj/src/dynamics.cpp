#include "fsp/dynamics.hpp"

#include <cmath>
#include <stdexcept>

namespace fsp {

namespace {

void check_rates(const StepRates& rates) {
  if (!(rates.alpha >= 0.0) || !(rates.beta >= 0.0) || !std::isfinite(rates.alpha) || !std::isfinite(rates.beta))
    throw std::invalid_argument("step rates must be finite and nonnegative");
}

}  // namespace

ParticleSwarm weight_push_update(const Problem& problem, const ParticleSwarm& swarm,
                                 std::span<const double> certs, std::span<const Vector> grads,
                                 const StepRates& rates) {
  check_rates(rates);
  if (certs.size() != swarm.size()) throw std::invalid_argument("weight_push_update: certificate count mismatch");
  if (rates.beta > 0.0 && grads.size() != swarm.size())
    throw std::invalid_argument("weight_push_update: gradient count mismatch");
  ParticleSwarm out = swarm;
  for (std::size_t j = 0; j < swarm.size(); ++j) {
    Particle& p = out[j];
    p.weight *= std::exp(-rates.alpha * certs[j]);
    if (rates.beta > 0.0) p.position = prox_step(problem.domain, p.position, grads[j], rates.beta).t_plus;
  }
  return out;
}

ParticleSwarm exact_step(const Problem& problem, const ParticleSwarm& swarm, const StepRates& rates,
                         std::vector<double>* certs, std::vector<Vector>* pis) {
  const auto pos = swarm.positions();
  const auto sg = swarm.signs();
  std::vector<double> c(swarm.size());
  std::vector<Vector> g(swarm.size());
  dual_certificates(problem, swarm, pos, sg, c, g);
  ParticleSwarm after = weight_push_update(problem, swarm, c, g, rates);
  if (pis) {
    pis->assign(swarm.size(), Vector());
    for (std::size_t j = 0; j < swarm.size(); ++j) {
      if (rates.beta > 0.0)
        (*pis)[j] = prox_step(problem.domain, pos[j], g[j], rates.beta).pi;
      else
        (*pis)[j] = Vector::Zero(pos[j].size());
    }
  }
  if (certs) *certs = std::move(c);
  return after;
}

DescentCheck descent_check(const Problem& problem, const ParticleSwarm& before, const StepRates& rates,
                           std::span<const double> exact_certs, std::span<const Vector> exact_pis) {
  check_rates(rates);
  if (exact_certs.size() != before.size() || exact_pis.size() != before.size())
    throw std::invalid_argument("descent_check: input count mismatch");
  ParticleSwarm after = before;
  double weighted_cert = 0.0;
  double weighted_pi = 0.0;
  for (std::size_t j = 0; j < before.size(); ++j) {
    const double w = before[j].weight;
    weighted_cert += w * exact_certs[j] * exact_certs[j];
    weighted_pi += w * exact_pis[j].squaredNorm();
    after[j].weight = w * std::exp(-rates.alpha * exact_certs[j]);
    if (rates.beta > 0.0) after[j].position = before[j].position - rates.beta * exact_pis[j];
  }
  DescentCheck out;
  out.lhs = loss(problem, after) - loss(problem, before);
  out.rhs = -0.75 * (rates.alpha * weighted_cert + rates.beta * weighted_pi);
  out.holds = out.lhs <= out.rhs + 1e-10;
  return out;
}

}  // namespace fsp
