#pragma once

#include <cstddef>
#include <limits>
#include <vector>

#include "fsp/objective.hpp"
#include "fsp/oracle.hpp"
#include "fsp/random.hpp"

namespace fsp {

enum class DeathVariant { Theory, Ratio };
enum class ScanMode { AllParticles, SingleUniform };

struct DeathRule {
  DeathVariant variant = DeathVariant::Theory;
  ScanMode scan = ScanMode::AllParticles;
  double tau_death = 5.0;  // Ratio only

  static DeathRule theory(ScanMode scan = ScanMode::AllParticles) { return {DeathVariant::Theory, scan, 5.0}; }
  static DeathRule ratio(double tau, ScanMode scan = ScanMode::AllParticles);
};

struct BirthRule {
  double threshold_coeff = 0.0;
  int candidates_per_iter = 1;
  /// Mass of a newborn particle; non-positive means eps_k.
  double birth_mass = 0.0;

  void validate() const;
};

/// Theory: cert >= 0 and weight <= sqrt(2) eps_k. Ratio: cert / weight > tau_death.
/// SingleUniform tests one uniformly drawn particle only.
std::vector<std::size_t> select_deaths(const ParticleSwarm& swarm, std::span<const double> pushed_certs,
                                       const DeathRule& rule, double eps_k, RandomStream& rng);

struct BirthOutcome {
  ParticleSwarm born;
  std::size_t candidates = 0;
};

/// Draws uniform candidates (uniform sign when signed) and keeps those whose
/// certificate estimate on `batch` is at most threshold_coeff sqrt(log m_k / m_k).
BirthOutcome propose_births(const Problem& problem, const ParticleSwarm& swarm, const BirthRule& rule,
                            double eps_k, std::size_t m_k, const MiniBatch& batch, RandomStream& rng);

/// Same with exact certificates (full-batch runs).
BirthOutcome propose_births_exact(const Problem& problem, const ParticleSwarm& swarm, const BirthRule& rule,
                                  double eps_k, std::size_t m_k, RandomStream& rng);

/// Removes `deaths` and appends `births` in order.
ParticleSwarm apply_mass_tweak(const ParticleSwarm& swarm, std::span<const std::size_t> deaths,
                               const ParticleSwarm& births);

}  // namespace fsp
