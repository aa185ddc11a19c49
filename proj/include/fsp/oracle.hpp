#pragma once

#include <span>
#include <vector>

#include "fsp/objective.hpp"
#include "fsp/random.hpp"

namespace fsp {

/// Indices of i.i.d. uniform draws (with replacement) from the data samples.
struct MiniBatch {
  SampleIndices indices;
  std::size_t size() const { return indices.size(); }
};

/// Noise model for the threshold of the birth test.
struct OracleConfig {
  double a_exponent = 0.0;
  double E_inf = 0.0;

  /// Default noise exponent d / (2 (2 + d)).
  static double min_exponent(int d) { return d / (2.0 * (2.0 + d)); }
  static OracleConfig make(double a_exponent, double E_inf);
  /// c_a = E_inf sqrt(2 a)
  double c_a() const;
};

/// sqrt(8 log 8), the product bound on alpha * E_inf.
double hoeffding_constant();

MiniBatch draw_batch(RandomStream& rng, std::size_t m, std::size_t n);
/// Batch enumerating every sample once.
MiniBatch full_batch(std::size_t n);

/// Mini-batch certificate estimates at lifted points.
std::vector<double> estimate_certificate(const Problem& problem, const ParticleSwarm& swarm,
                                         std::span<const Vector> points, std::span<const int> signs,
                                         const MiniBatch& batch);

std::vector<Vector> estimate_certificate_grad(const Problem& problem, const ParticleSwarm& swarm,
                                              std::span<const Vector> points, std::span<const int> signs,
                                              const MiniBatch& batch);

/// Values and gradients in one pass (the push-forward step needs both).
void estimate_certificate_and_grad(const Problem& problem, const ParticleSwarm& swarm,
                                   std::span<const Vector> points, std::span<const int> signs,
                                   const MiniBatch& batch, std::span<double> values,
                                   std::span<Vector> grads);

/// True iff alpha * E_inf <= sqrt(8 log 8).
bool check_hoeffding_cap(double alpha, double E_inf);

/// Birth level coeff * sqrt(log m / m).
double birth_level(double coeff, std::size_t m);

}  // namespace fsp
