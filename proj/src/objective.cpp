#include "fsp/objective.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace fsp {

Problem::Problem(std::shared_ptr<const KernelModel> m, Domain d, double k, bool is_signed)
    : model(std::move(m)), domain(std::move(d)), kappa(k), signed_measures(is_signed) {
  if (!model) throw std::invalid_argument("Problem: null kernel model");
  if (!(kappa > 0.0)) throw std::invalid_argument("Problem: kappa must be positive");
  if (model->dim() != domain.dim()) throw std::invalid_argument("Problem: model and domain dimensions differ");
}

std::vector<int> Problem::admissible_signs() const {
  if (signed_measures) return {1, -1};
  return {1};
}

double loss(const Problem& problem, const ParticleSwarm& swarm) {
  const auto& model = *problem.model;
  double linear = 0.0;
  for (const auto& p : swarm) linear += p.weight * (problem.kappa - p.sign * model.y_inner(p.position));
  return 0.5 * model.y_norm_sq() + linear + 0.5 * model.quadratic_form(swarm);
}

void dual_certificates(const Problem& problem, const ParticleSwarm& swarm,
                       std::span<const Vector> points, std::span<const int> signs,
                       std::span<double> values, std::span<Vector> grads) {
  if (signs.size() != points.size()) throw std::invalid_argument("dual_certificates: sign count mismatch");
  problem.model->residual_field(swarm, points, nullptr, values, grads);
  for (std::size_t k = 0; k < points.size(); ++k) {
    values[k] = signs[k] * values[k] + problem.kappa;
    if (!grads.empty()) grads[k] *= static_cast<double>(signs[k]);
  }
}

double dual_certificate(const Problem& problem, const ParticleSwarm& swarm, const Vector& t, int sign) {
  double v = 0.0;
  const int s[1] = {sign};
  dual_certificates(problem, swarm, std::span<const Vector>(&t, 1), s, std::span<double>(&v, 1));
  return v;
}

Vector dual_certificate_grad(const Problem& problem, const ParticleSwarm& swarm, const Vector& t, int sign) {
  double v = 0.0;
  Vector g;
  const int s[1] = {sign};
  dual_certificates(problem, swarm, std::span<const Vector>(&t, 1), s, std::span<double>(&v, 1),
                    std::span<Vector>(&g, 1));
  return g;
}

double frechet_gap(const Problem& problem, const ParticleSwarm& nu, const ParticleSwarm& sigma) {
  ParticleSwarm sum = nu;
  sum.append(sigma);
  const double j_nu = loss(problem, nu);
  const double j_sum = loss(problem, sum);

  const auto pos = sigma.positions();
  const auto sg = sigma.signs();
  std::vector<double> certs(sigma.size());
  dual_certificates(problem, nu, pos, sg, certs);
  double linear = 0.0;
  for (std::size_t l = 0; l < sigma.size(); ++l) linear += sigma[l].weight * certs[l];
  const double quad = problem.model->quadratic_form(sigma);
  return std::abs(j_sum - j_nu - linear - 0.5 * quad);
}

KktReport kkt_residual(const Problem& problem, const ParticleSwarm& swarm, std::span<const Vector> grid) {
  if (grid.empty()) throw std::invalid_argument("kkt_residual: empty grid");
  KktReport report;
  report.min_cert_grid = std::numeric_limits<double>::infinity();
  for (int sign : problem.admissible_signs()) {
    std::vector<int> signs(grid.size(), sign);
    std::vector<double> vals(grid.size());
    dual_certificates(problem, swarm, grid, signs, vals);
    for (std::size_t k = 0; k < grid.size(); ++k) {
      if (vals[k] < report.min_cert_grid) {
        report.min_cert_grid = vals[k];
        report.argmin_grid = grid[k];
        report.argmin_sign = sign;
      }
    }
  }
  if (!swarm.empty()) {
    const auto pos = swarm.positions();
    const auto sg = swarm.signs();
    std::vector<double> vals(swarm.size());
    dual_certificates(problem, swarm, pos, sg, vals);
    for (std::size_t j = 0; j < vals.size(); ++j) {
      report.max_abs_cert_support = std::max(report.max_abs_cert_support, std::abs(vals[j]));
      if (vals[j] < report.min_cert_grid) {
        report.min_cert_grid = vals[j];
        report.argmin_grid = pos[j];
        report.argmin_sign = sg[j];
      }
    }
  }
  return report;
}

}  // namespace fsp
