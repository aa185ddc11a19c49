#pragma once

#include <cstdint>
#include <vector>

#include "fsp/kernel_model.hpp"

namespace fsp {

/// Gaussian kernel exp(-|s-t|^2 / (2 sigma^2)) with an observation
/// y = Phi(mu0) for a planted signed atomic measure mu0.
///
/// Samples come in antithetic pairs (2l, 2l+1): sample 2l sees
/// y + eta_y * phi_{z_l} and the kernel scaled by (1 + eta_K c_l), sample
/// 2l+1 sees the opposite perturbations. Pair averages are exact, so the
/// per-sample forms are unbiased at any sample count.
class SyntheticKernel final : public KernelModel {
 public:
  struct Params {
    double sigma = 0.3;
    std::vector<Vector> atoms;        // support of mu0
    std::vector<double> atom_weights;  // signed weights of mu0
    std::size_t n_samples = 256;       // rounded up to even
    double noise_y = 0.0;
    double noise_kernel = 0.0;         // must be < 1
    std::uint64_t seed = 1;
  };

  SyntheticKernel(Params params, const Domain& domain);

  std::string name() const override { return "synthetic"; }
  int dim() const override { return dim_; }
  std::size_t n_samples() const override { return 2 * pair_points_.size(); }
  double y_norm_sq() const override { return y_norm_sq_; }

  double kernel(const Vector& s, const Vector& t) const override;
  Vector grad1_kernel(const Vector& s, const Vector& t) const override;
  double y_inner(const Vector& t) const override;
  Vector grad_y_inner(const Vector& t) const override;

  double kernel_sample(const Vector& s, const Vector& t, std::size_t i) const override;
  Vector grad1_kernel_sample(const Vector& s, const Vector& t, std::size_t i) const override;
  double y_inner_sample(const Vector& t, std::size_t i) const override;
  Vector grad_y_inner_sample(const Vector& t, std::size_t i) const override;

  void residual_field(const ParticleSwarm& swarm, std::span<const Vector> points,
                      const SampleIndices* batch, std::span<double> values,
                      std::span<Vector> grads) const override;

  const Params& params() const { return params_; }
  /// Closed-form lower bound exp(-diam^2 / (2 sigma^2)) on the domain.
  double kernel_floor() const { return kernel_floor_; }

 private:
  double sample_sign(std::size_t i) const { return (i % 2 == 0) ? 1.0 : -1.0; }

  Params params_;
  int dim_;
  double kernel_floor_;
  double y_norm_sq_ = 0.0;
  std::vector<Vector> pair_points_;  // z_l
  std::vector<double> pair_scales_;  // c_l in [-1, 1]
};

/// Smoothed L2 fit of a Gaussian mixture sample. Feature map
/// phi_t = N(.; t, (1+tau^2) I), data atom i smoothed to N(.; X_i, tau^2 I).
class GmmKernel final : public KernelModel {
 public:
  GmmKernel(Matrix samples, double tau);

  std::string name() const override { return "gmm"; }
  int dim() const override { return static_cast<int>(samples_.cols()); }
  std::size_t n_samples() const override { return static_cast<std::size_t>(samples_.rows()); }
  double y_norm_sq() const override { return y_norm_sq_; }
  double tau() const { return tau_; }
  const Matrix& samples() const { return samples_; }

  double kernel(const Vector& s, const Vector& t) const override;
  Vector grad1_kernel(const Vector& s, const Vector& t) const override;
  double y_inner(const Vector& t) const override;
  Vector grad_y_inner(const Vector& t) const override;

  double kernel_sample(const Vector& s, const Vector& t, std::size_t) const override { return kernel(s, t); }
  Vector grad1_kernel_sample(const Vector& s, const Vector& t, std::size_t) const override {
    return grad1_kernel(s, t);
  }
  double y_inner_sample(const Vector& t, std::size_t i) const override;
  Vector grad_y_inner_sample(const Vector& t, std::size_t i) const override;

  void residual_field(const ParticleSwarm& swarm, std::span<const Vector> points,
                      const SampleIndices* batch, std::span<double> values,
                      std::span<Vector> grads) const override;

 private:
  /// Isotropic Gaussian density with variance v at offset r2 = |x - mean|^2.
  double density(double r2, double v) const;

  Matrix samples_;  // n x d
  double tau_;
  double kernel_var_;  // 2 (1 + tau^2)
  double data_var_;    // 1 + 2 tau^2
  double y_norm_sq_ = 0.0;
};

/// Empirical kernel of affine ReLU neurons t = (v, b) acting on x~ = (x, 1).
class ReluKernel final : public KernelModel {
 public:
  /// features: n x d, targets: n. Neurons live in R^{d+1}.
  ReluKernel(const Matrix& features, Vector targets);

  std::string name() const override { return "relu"; }
  int dim() const override { return static_cast<int>(inputs_.cols()); }
  std::size_t n_samples() const override { return static_cast<std::size_t>(inputs_.rows()); }
  double y_norm_sq() const override { return y_norm_sq_; }

  double kernel(const Vector& s, const Vector& t) const override;
  Vector grad1_kernel(const Vector& s, const Vector& t) const override;
  double y_inner(const Vector& t) const override;
  Vector grad_y_inner(const Vector& t) const override;

  double kernel_sample(const Vector& s, const Vector& t, std::size_t i) const override;
  Vector grad1_kernel_sample(const Vector& s, const Vector& t, std::size_t i) const override;
  double y_inner_sample(const Vector& t, std::size_t i) const override;
  Vector grad_y_inner_sample(const Vector& t, std::size_t i) const override;

  void residual_field(const ParticleSwarm& swarm, std::span<const Vector> points,
                      const SampleIndices* batch, std::span<double> values,
                      std::span<Vector> grads) const override;
  double quadratic_form(const ParticleSwarm& swarm) const override;

  /// Network output f(x) = sum_j w_j s_j ReLU(<t_j, (x,1)>) for each row of `features`.
  Vector predict(const ParticleSwarm& swarm, const Matrix& features) const;

  const Matrix& inputs() const { return inputs_; }
  const Vector& targets() const { return targets_; }

 private:
  Matrix inputs_;  // n x (d+1), last column = 1
  Vector targets_;
  double y_norm_sq_;
};

}  // namespace fsp
