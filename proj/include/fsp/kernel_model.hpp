#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "fsp/domain.hpp"
#include "fsp/particles.hpp"
#include "fsp/random.hpp"

namespace fsp {

using SampleIndices = std::vector<std::size_t>;

/// Problem-specific access to the feature map phi_t through inner products.
///
/// The full quantities are averages of per-sample quantities over the n data
/// samples: kernel(s,t) = mean_i kernel_sample(s,t,i) and
/// y_inner(t) = mean_i y_inner_sample(t,i). Gradients are taken with respect
/// to the first argument of the kernel and to t for y_inner.
class KernelModel {
 public:
  virtual ~KernelModel() = default;

  virtual std::string name() const = 0;
  virtual int dim() const = 0;
  virtual std::size_t n_samples() const = 0;
  /// ||y||_H^2
  virtual double y_norm_sq() const = 0;

  virtual double kernel(const Vector& s, const Vector& t) const = 0;
  virtual Vector grad1_kernel(const Vector& s, const Vector& t) const = 0;
  virtual double y_inner(const Vector& t) const = 0;
  virtual Vector grad_y_inner(const Vector& t) const = 0;

  virtual double kernel_sample(const Vector& s, const Vector& t, std::size_t i) const = 0;
  virtual Vector grad1_kernel_sample(const Vector& s, const Vector& t, std::size_t i) const = 0;
  virtual double y_inner_sample(const Vector& t, std::size_t i) const = 0;
  virtual Vector grad_y_inner_sample(const Vector& t, std::size_t i) const = 0;

  /// Residual field u(t) = sum_j w_j s_j K(t_j, t) - <y, phi_t> and its
  /// gradient in t at every point. With `batch` null the exact quantities
  /// are used, otherwise the per-sample forms averaged over the batch.
  /// `grads` may be empty when only values are needed.
  virtual void residual_field(const ParticleSwarm& swarm, std::span<const Vector> points,
                              const SampleIndices* batch, std::span<double> values,
                              std::span<Vector> grads) const;

  /// W^T K_T W with lifted signs folded in.
  virtual double quadratic_form(const ParticleSwarm& swarm) const;
};

/// Gram matrix with entries s_i s_j K(t_i, t_j).
Matrix gram_matrix(const KernelModel& model, std::span<const Vector> positions,
                   std::span<const int> signs);

/// Entries s_j <y, phi_{t_j}>.
Vector y_inner_vec(const KernelModel& model, std::span<const Vector> positions,
                   std::span<const int> signs);

/// Empirical estimates of the kernel assumption constants.
struct AssumptionBounds {
  double c_P_est = 0.0;  // min sampled kernel value, 0 when positivity fails
  double C_P_est = 0.0;  // max of |K|, |grad K|, |hess K|, ||y||
  double E_inf_est = 0.0;  // 1.5 x max sampled per-sample deviation
  double G = 0.0;  // min sampled per-sample kernel value
  double H = 0.0;  // max sampled |<y, phi_t>| over full and per-sample forms
  bool positivity_ok = false;
  double normalization_gap = 0.0;  // max |K(t,t) - 1| over the audit points
  double raw_max_deviation = 0.0;
};

inline constexpr double kNoiseSafetyFactor = 1.5;

/// Samples `grid_points` points of the domain (plus its extreme points) and
/// estimates the constants. Per-sample kernel deviations are scaled by
/// `tv_cap`, the mass a swarm may carry.
AssumptionBounds audit_assumptions(const KernelModel& model, const Domain& domain, int grid_points,
                                   RandomStream& rng, double tv_cap = 1.0);

}  // namespace fsp
