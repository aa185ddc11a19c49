#include "fsp/oracle.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace fsp {

OracleConfig OracleConfig::make(double a_exponent, double E_inf) {
  if (!(a_exponent > 0.0)) throw std::invalid_argument("OracleConfig: exponent a must be positive");
  if (!(E_inf > 0.0)) throw std::invalid_argument("OracleConfig: E_inf must be positive");
  return OracleConfig{a_exponent, E_inf};
}

double OracleConfig::c_a() const { return E_inf * std::sqrt(2.0 * a_exponent); }

double hoeffding_constant() { return std::sqrt(8.0 * std::log(8.0)); }

MiniBatch draw_batch(RandomStream& rng, std::size_t m, std::size_t n) {
  if (m == 0) throw std::invalid_argument("draw_batch: batch size must be >= 1");
  if (n == 0) throw std::invalid_argument("draw_batch: no samples");
  MiniBatch batch;
  batch.indices.reserve(m);
  for (std::size_t l = 0; l < m; ++l) batch.indices.push_back(rng.index(n));
  return batch;
}

MiniBatch full_batch(std::size_t n) {
  MiniBatch batch;
  batch.indices.resize(n);
  for (std::size_t i = 0; i < n; ++i) batch.indices[i] = i;
  return batch;
}

void estimate_certificate_and_grad(const Problem& problem, const ParticleSwarm& swarm,
                                   std::span<const Vector> points, std::span<const int> signs,
                                   const MiniBatch& batch, std::span<double> values,
                                   std::span<Vector> grads) {
  if (signs.size() != points.size()) throw std::invalid_argument("estimate_certificate: sign count mismatch");
  if (batch.indices.empty()) throw std::invalid_argument("estimate_certificate: empty batch");
  problem.model->residual_field(swarm, points, &batch.indices, values, grads);
  for (std::size_t k = 0; k < points.size(); ++k) {
    values[k] = signs[k] * values[k] + problem.kappa;
    if (!grads.empty()) grads[k] *= static_cast<double>(signs[k]);
  }
}

std::vector<double> estimate_certificate(const Problem& problem, const ParticleSwarm& swarm,
                                         std::span<const Vector> points, std::span<const int> signs,
                                         const MiniBatch& batch) {
  std::vector<double> values(points.size());
  estimate_certificate_and_grad(problem, swarm, points, signs, batch, values, {});
  return values;
}

std::vector<Vector> estimate_certificate_grad(const Problem& problem, const ParticleSwarm& swarm,
                                              std::span<const Vector> points, std::span<const int> signs,
                                              const MiniBatch& batch) {
  std::vector<double> values(points.size());
  std::vector<Vector> grads(points.size());
  estimate_certificate_and_grad(problem, swarm, points, signs, batch, values, grads);
  return grads;
}

bool check_hoeffding_cap(double alpha, double E_inf) {
  if (!(E_inf > 0.0)) throw std::invalid_argument("check_hoeffding_cap: E_inf must be positive");
  // Boundary inclusive: alpha = sqrt(8 log 8) / E_inf must pass despite rounding.
  return alpha * E_inf <= hoeffding_constant() * (1.0 + 4.0 * std::numeric_limits<double>::epsilon());
}

double birth_level(double coeff, std::size_t m) {
  if (m == 0) throw std::invalid_argument("birth_level: m must be >= 1");
  if (std::isinf(coeff)) return coeff;
  const double md = static_cast<double>(m);
  return coeff * std::sqrt(std::log(md) / md);
}

}  // namespace fsp
