#pragma once

#include <span>
#include <vector>

#include "fsp/objective.hpp"

namespace fsp {

struct StepRates {
  double alpha = 0.0;
  double beta = 0.0;
};

/// Exponential weight update and projected position step. `certs` and `grads`
/// are indexed like the swarm, with each particle's sign already folded in.
ParticleSwarm weight_push_update(const Problem& problem, const ParticleSwarm& swarm,
                                 std::span<const double> certs, std::span<const Vector> grads,
                                 const StepRates& rates);

struct DescentCheck {
  bool holds = false;
  double lhs = 0.0;
  double rhs = 0.0;
};

/// Compares J(after) - J(before) with -3/4 (alpha sum w cert^2 + beta sum w |pi|^2).
/// `exact_pis` are the generalized gradients (t - t_plus) / beta at each particle.
DescentCheck descent_check(const Problem& problem, const ParticleSwarm& before, const StepRates& rates,
                           std::span<const double> exact_certs, std::span<const Vector> exact_pis);

/// Exact certificates and gradients at the swarm support, then one update.
/// Returns the updated swarm and fills `certs`/`pis` when non-null.
ParticleSwarm exact_step(const Problem& problem, const ParticleSwarm& swarm, const StepRates& rates,
                         std::vector<double>* certs = nullptr, std::vector<Vector>* pis = nullptr);

}  // namespace fsp
