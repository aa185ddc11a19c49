#pragma once

#include <memory>
#include <span>
#include <vector>

#include "fsp/domain.hpp"
#include "fsp/kernel_model.hpp"
#include "fsp/particles.hpp"

namespace fsp {

/// BLASSO instance: J(nu) = 1/2 ||y - Phi nu||^2 + kappa ||nu||_TV.
/// `signed_measures` selects whether the lifted domain uses both signs.
struct Problem {
  std::shared_ptr<const KernelModel> model;
  Domain domain;
  double kappa = 0.0;
  bool signed_measures = false;

  Problem(std::shared_ptr<const KernelModel> m, Domain d, double k, bool is_signed = false);

  int dim() const { return domain.dim(); }
  /// Signs the lifted domain admits: {+1} or {+1, -1}.
  std::vector<int> admissible_signs() const;
};

/// Exact objective via the Gram form: 1/2 ||y||^2 + <kappa - k_T, W> + 1/2 W^T K_T W.
double loss(const Problem& problem, const ParticleSwarm& swarm);

/// J'_nu(t, sign) = sign * (sum_j w_j s_j K(t_j, t) - <y, phi_t>) + kappa.
double dual_certificate(const Problem& problem, const ParticleSwarm& swarm, const Vector& t, int sign);
Vector dual_certificate_grad(const Problem& problem, const ParticleSwarm& swarm, const Vector& t, int sign);

/// Certificates (and optionally gradients) at many lifted points in one pass.
void dual_certificates(const Problem& problem, const ParticleSwarm& swarm,
                       std::span<const Vector> points, std::span<const int> signs,
                       std::span<double> values, std::span<Vector> grads = {});

/// |J(nu + sigma) - J(nu) - <J'_nu, sigma> - 1/2 ||Phi sigma||^2| where
/// nu + sigma is the concatenation of the two swarms.
double frechet_gap(const Problem& problem, const ParticleSwarm& nu, const ParticleSwarm& sigma);

struct KktReport {
  double min_cert_grid = 0.0;
  Vector argmin_grid;
  int argmin_sign = 1;
  double max_abs_cert_support = 0.0;
  /// min_cert_grid clipped at zero from above.
  double violation() const { return min_cert_grid < 0.0 ? min_cert_grid : 0.0; }
};

/// Certificate minimum over (grid x admissible signs) plus the support, and the largest
/// |certificate| on the swarm support. The grid must be non-empty.
KktReport kkt_residual(const Problem& problem, const ParticleSwarm& swarm, std::span<const Vector> grid);

}  // namespace fsp
