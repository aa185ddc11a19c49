#include "fsp/kernel_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>
#include <stdexcept>

namespace fsp {

void KernelModel::residual_field(const ParticleSwarm& swarm, std::span<const Vector> points,
                                 const SampleIndices* batch, std::span<double> values,
                                 std::span<Vector> grads) const {
  if (values.size() != points.size() || (!grads.empty() && grads.size() != points.size())) {
    throw std::invalid_argument("residual_field: output size mismatch");
  }
  const bool want_grad = !grads.empty();
  for (std::size_t k = 0; k < points.size(); ++k) {
    const Vector& t = points[k];
    double u = 0.0;
    Vector g = Vector::Zero(dim());
    if (batch == nullptr) {
      for (const auto& p : swarm) {
        const double ws = p.weight * p.sign;
        u += ws * kernel(p.position, t);
        if (want_grad) g += ws * grad1_kernel(t, p.position);
      }
      u -= y_inner(t);
      if (want_grad) g -= grad_y_inner(t);
    } else {
      const double inv_m = 1.0 / static_cast<double>(batch->size());
      for (std::size_t i : *batch) {
        double ui = 0.0;
        for (const auto& p : swarm) {
          const double ws = p.weight * p.sign;
          ui += ws * kernel_sample(p.position, t, i);
          if (want_grad) g += (ws * inv_m) * grad1_kernel_sample(t, p.position, i);
        }
        u += inv_m * (ui - y_inner_sample(t, i));
        if (want_grad) g -= inv_m * grad_y_inner_sample(t, i);
      }
    }
    values[k] = u;
    if (want_grad) grads[k] = std::move(g);
  }
}

double KernelModel::quadratic_form(const ParticleSwarm& swarm) const {
  const auto pos = swarm.positions();
  const auto sg = swarm.signs();
  const Vector w = swarm.weights();
  return w.dot(gram_matrix(*this, pos, sg) * w);
}

Matrix gram_matrix(const KernelModel& model, std::span<const Vector> positions,
                   std::span<const int> signs) {
  if (positions.size() != signs.size()) throw std::invalid_argument("gram_matrix: size mismatch");
  const auto p = static_cast<Eigen::Index>(positions.size());
  Matrix g(p, p);
  for (Eigen::Index i = 0; i < p; ++i) {
    for (Eigen::Index j = i; j < p; ++j) {
      const auto ui = static_cast<std::size_t>(i);
      const auto uj = static_cast<std::size_t>(j);
      const double v = signs[ui] * signs[uj] * model.kernel(positions[ui], positions[uj]);
      g(i, j) = v;
      g(j, i) = v;
    }
  }
  return g;
}

Vector y_inner_vec(const KernelModel& model, std::span<const Vector> positions,
                   std::span<const int> signs) {
  if (positions.size() != signs.size()) throw std::invalid_argument("y_inner_vec: size mismatch");
  Vector k(static_cast<Eigen::Index>(positions.size()));
  for (std::size_t j = 0; j < positions.size(); ++j) {
    k[static_cast<Eigen::Index>(j)] = signs[j] * model.y_inner(positions[j]);
  }
  return k;
}

namespace {

std::vector<Vector> extreme_points(const Domain& domain) {
  std::vector<Vector> pts;
  const int d = domain.dim();
  if (domain.is_box()) {
    if (d > 10) return pts;
    const auto& b = domain.as_box();
    for (unsigned mask = 0; mask < (1u << d); ++mask) {
      Vector x(d);
      for (int i = 0; i < d; ++i) x[i] = (mask >> i) & 1u ? b.upper[i] : b.lower[i];
      pts.push_back(std::move(x));
    }
  } else {
    const auto& b = domain.as_ball();
    for (int i = 0; i < d; ++i) {
      for (double s : {-1.0, 1.0}) {
        Vector x = b.center;
        x[i] += s * b.radius;
        pts.push_back(std::move(x));
      }
    }
  }
  return pts;
}

double hessian_op_norm(const KernelModel& model, const Vector& s, const Vector& t, double h) {
  const int d = model.dim();
  Matrix hess(d, d);
  for (int k = 0; k < d; ++k) {
    Vector sp = s;
    Vector sm = s;
    sp[k] += h;
    sm[k] -= h;
    hess.col(k) = (model.grad1_kernel(sp, t) - model.grad1_kernel(sm, t)) / (2.0 * h);
  }
  const Matrix sym = 0.5 * (hess + hess.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> eig(sym, Eigen::EigenvaluesOnly);
  return eig.eigenvalues().cwiseAbs().maxCoeff();
}

}  // namespace

AssumptionBounds audit_assumptions(const KernelModel& model, const Domain& domain, int grid_points,
                                   RandomStream& rng, double tv_cap) {
  if (model.dim() != domain.dim()) throw std::invalid_argument("audit_assumptions: dimension mismatch");
  std::vector<Vector> pts = extreme_points(domain);
  for (int k = 0; k < grid_points; ++k) pts.push_back(sample_uniform(domain, rng));
  const std::size_t np = pts.size();

  AssumptionBounds out;
  out.c_P_est = std::numeric_limits<double>::infinity();
  double c_max = std::sqrt(std::max(0.0, model.y_norm_sq()));

  // Kernel values on pairs: all pairs when affordable, otherwise a random subset.
  constexpr std::size_t kMaxPairs = 45000;
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  if (np * (np + 1) / 2 <= kMaxPairs) {
    for (std::size_t i = 0; i < np; ++i)
      for (std::size_t j = i; j < np; ++j) pairs.emplace_back(i, j);
  } else {
    for (std::size_t i = 0; i < np; ++i) pairs.emplace_back(i, i);
    while (pairs.size() < kMaxPairs) pairs.emplace_back(rng.index(np), rng.index(np));
  }
  std::pair<std::size_t, std::size_t> worst{0, 0};
  for (const auto& [i, j] : pairs) {
    const double k = model.kernel(pts[i], pts[j]);
    if (k < out.c_P_est) worst = {i, j};
    out.c_P_est = std::min(out.c_P_est, k);
    c_max = std::max(c_max, std::abs(k));
    if (i == j) out.normalization_gap = std::max(out.normalization_gap, std::abs(k - 1.0));
  }

  // Derivative bounds on a random subset of pairs.
  const double h = 1e-5 * std::max(1.0, domain.diameter());
  const std::size_t n_deriv = std::min<std::size_t>(200, pairs.size());
  const Vector center = 0.5 * (domain.bounding_box().lower + domain.bounding_box().upper);
  for (std::size_t r = 0; r < n_deriv; ++r) {
    const auto& [i, j] = pairs[rng.index(pairs.size())];
    // Finite differences need room on both sides; pull s slightly inside.
    const Vector s = pts[i] + 2.0 * h * (center - pts[i]).normalized();
    c_max = std::max(c_max, model.grad1_kernel(pts[i], pts[j]).norm());
    c_max = std::max(c_max, hessian_op_norm(model, s, pts[j], h));
  }
  out.C_P_est = c_max;

  if (!(out.c_P_est > 0.0)) out.c_P_est = 0.0;
  out.positivity_ok = out.c_P_est > 0.0;

  // Per-sample deviations.
  const std::size_t n = model.n_samples();
  SampleIndices samples;
  if (n <= 512) {
    for (std::size_t i = 0; i < n; ++i) samples.push_back(i);
  } else {
    for (int k = 0; k < 512; ++k) samples.push_back(rng.index(n));
  }
  std::vector<std::size_t> t_idx{worst.second};
  for (std::size_t k = 0; k < std::min<std::size_t>(np, 32); ++k) t_idx.push_back(rng.index(np));
  std::vector<std::size_t> s_idx{worst.first};
  for (std::size_t k = 0; k < std::min<std::size_t>(np, 6); ++k) s_idx.push_back(rng.index(np));

  double max_y_dev = 0.0, max_gy_dev = 0.0, max_k_dev = 0.0, max_gk_dev = 0.0;
  out.G = std::numeric_limits<double>::infinity();
  out.H = 0.0;
  for (const auto& t : pts) out.H = std::max(out.H, std::abs(model.y_inner(t)));
  for (std::size_t ti : t_idx) {
    const Vector& t = pts[ti];
    const double y = model.y_inner(t);
    const Vector gy = model.grad_y_inner(t);
    std::vector<double> k_full;
    std::vector<Vector> gk_full;
    for (std::size_t si : s_idx) {
      k_full.push_back(model.kernel(pts[si], t));
      gk_full.push_back(model.grad1_kernel(t, pts[si]));
    }
    for (std::size_t i : samples) {
      const double yi = model.y_inner_sample(t, i);
      out.H = std::max(out.H, std::abs(yi));
      max_y_dev = std::max(max_y_dev, std::abs(yi - y));
      max_gy_dev = std::max(max_gy_dev, (model.grad_y_inner_sample(t, i) - gy).norm());
      for (std::size_t a = 0; a < s_idx.size(); ++a) {
        const double ki = model.kernel_sample(pts[s_idx[a]], t, i);
        out.G = std::min(out.G, ki);
        max_k_dev = std::max(max_k_dev, std::abs(ki - k_full[a]));
        max_gk_dev = std::max(max_gk_dev, (model.grad1_kernel_sample(t, pts[s_idx[a]], i) - gk_full[a]).norm());
      }
    }
  }
  if (!(out.G > 0.0)) out.G = 0.0;
  out.raw_max_deviation = std::max(max_y_dev + tv_cap * max_k_dev, max_gy_dev + tv_cap * max_gk_dev);
  out.E_inf_est = kNoiseSafetyFactor * out.raw_max_deviation;
  return out;
}

}  // namespace fsp
