#include "fsp/kernels.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace fsp {

// ---------------------------------------------------------------- synthetic

SyntheticKernel::SyntheticKernel(Params params, const Domain& domain)
    : params_(std::move(params)), dim_(domain.dim()) {
  if (!(params_.sigma > 0.0)) throw std::invalid_argument("SyntheticKernel: sigma must be positive");
  if (params_.atoms.size() != params_.atom_weights.size()) {
    throw std::invalid_argument("SyntheticKernel: atoms and weights differ in length");
  }
  if (!(params_.noise_kernel >= 0.0 && params_.noise_kernel < 1.0)) {
    throw std::invalid_argument("SyntheticKernel: noise_kernel must lie in [0, 1)");
  }
  if (params_.n_samples < 2) params_.n_samples = 2;
  for (const auto& a : params_.atoms) {
    if (a.size() != dim_) throw std::invalid_argument("SyntheticKernel: atom dimension mismatch");
  }
  const double diam = domain.diameter();
  kernel_floor_ = std::exp(-diam * diam / (2.0 * params_.sigma * params_.sigma));

  RandomStream rng = RandomStream(params_.seed).split("synthetic-samples");
  const std::size_t pairs = (params_.n_samples + 1) / 2;
  for (std::size_t l = 0; l < pairs; ++l) {
    pair_points_.push_back(sample_uniform(domain, rng));
    pair_scales_.push_back(2.0 * rng.uniform() - 1.0);
  }
  for (std::size_t a = 0; a < params_.atoms.size(); ++a) {
    for (std::size_t b = 0; b < params_.atoms.size(); ++b) {
      y_norm_sq_ += params_.atom_weights[a] * params_.atom_weights[b] *
                    kernel(params_.atoms[a], params_.atoms[b]);
    }
  }
}

double SyntheticKernel::kernel(const Vector& s, const Vector& t) const {
  return std::exp(-(s - t).squaredNorm() / (2.0 * params_.sigma * params_.sigma));
}

Vector SyntheticKernel::grad1_kernel(const Vector& s, const Vector& t) const {
  return (-kernel(s, t) / (params_.sigma * params_.sigma)) * (s - t);
}

double SyntheticKernel::y_inner(const Vector& t) const {
  double v = 0.0;
  for (std::size_t a = 0; a < params_.atoms.size(); ++a) v += params_.atom_weights[a] * kernel(params_.atoms[a], t);
  return v;
}

Vector SyntheticKernel::grad_y_inner(const Vector& t) const {
  Vector g = Vector::Zero(dim_);
  for (std::size_t a = 0; a < params_.atoms.size(); ++a) {
    g += params_.atom_weights[a] * grad1_kernel(t, params_.atoms[a]);
  }
  return g;
}

double SyntheticKernel::kernel_sample(const Vector& s, const Vector& t, std::size_t i) const {
  return kernel(s, t) * (1.0 + sample_sign(i) * params_.noise_kernel * pair_scales_.at(i / 2));
}

Vector SyntheticKernel::grad1_kernel_sample(const Vector& s, const Vector& t, std::size_t i) const {
  return grad1_kernel(s, t) * (1.0 + sample_sign(i) * params_.noise_kernel * pair_scales_.at(i / 2));
}

double SyntheticKernel::y_inner_sample(const Vector& t, std::size_t i) const {
  return y_inner(t) + sample_sign(i) * params_.noise_y * kernel(pair_points_.at(i / 2), t);
}

Vector SyntheticKernel::grad_y_inner_sample(const Vector& t, std::size_t i) const {
  return grad_y_inner(t) + sample_sign(i) * params_.noise_y * grad1_kernel(t, pair_points_.at(i / 2));
}

namespace {

Matrix positions_matrix(const ParticleSwarm& swarm, int dim) {
  Matrix t(dim, static_cast<Eigen::Index>(swarm.size()));
  for (std::size_t j = 0; j < swarm.size(); ++j) t.col(static_cast<Eigen::Index>(j)) = swarm[j].position;
  return t;
}

Vector signed_weights(const ParticleSwarm& swarm) {
  Vector ws(static_cast<Eigen::Index>(swarm.size()));
  for (std::size_t j = 0; j < swarm.size(); ++j) ws[static_cast<Eigen::Index>(j)] = swarm[j].weight * swarm[j].sign;
  return ws;
}

// u(t) += sum_c coeff_c exp(-|x_c - t|^2 / (2 sigma^2)) and its t-gradient,
// for centers x_c (columns of `centers`) and targets (columns of `targets`).
void add_gaussian_field(const Matrix& centers, const Vector& coeff, const Matrix& targets, double sigma,
                        Vector& u, Matrix* grad) {
  if (centers.cols() == 0) return;
  const double inv2s2 = 1.0 / (2.0 * sigma * sigma);
  Matrix d2 = (-2.0 * centers.transpose() * targets).colwise() + centers.colwise().squaredNorm().transpose();
  d2.rowwise() += targets.colwise().squaredNorm();
  const Matrix k = (-(d2.array().max(0.0)) * inv2s2).exp().matrix();  // c x q
  const Vector kc = k.transpose() * coeff;                          // q
  u += kc;
  if (grad != nullptr) {
    // sum_c coeff_c K_c (x_c - t) / sigma^2
    *grad += (centers * coeff.asDiagonal() * k - targets * kc.asDiagonal()) / (sigma * sigma);
  }
}

}  // namespace

void SyntheticKernel::residual_field(const ParticleSwarm& swarm, std::span<const Vector> points,
                                     const SampleIndices* batch, std::span<double> values,
                                     std::span<Vector> grads) const {
  if (values.size() != points.size() || (!grads.empty() && grads.size() != points.size())) {
    throw std::invalid_argument("residual_field: output size mismatch");
  }
  if (points.empty()) return;
  const bool want_grad = !grads.empty();
  const Eigen::Index q = static_cast<Eigen::Index>(points.size());
  Matrix targets(dim_, q);
  for (Eigen::Index k = 0; k < q; ++k) targets.col(k) = points[static_cast<std::size_t>(k)];

  double kernel_factor = 1.0;
  Vector u = Vector::Zero(q);
  Matrix g = Matrix::Zero(dim_, want_grad ? q : 0);
  Matrix* gp = want_grad ? &g : nullptr;

  if (batch != nullptr) {
    // Net signed count of each antithetic pair in the batch.
    double acc = 0.0;
    std::vector<double> counts(pair_points_.size(), 0.0);
    for (std::size_t i : *batch) {
      acc += sample_sign(i) * params_.noise_kernel * pair_scales_.at(i / 2);
      counts.at(i / 2) += sample_sign(i);
    }
    kernel_factor = 1.0 + acc / static_cast<double>(batch->size());
    if (params_.noise_y != 0.0) {
      const double scale = params_.noise_y / static_cast<double>(batch->size());
      std::vector<Eigen::Index> used;
      for (std::size_t l = 0; l < counts.size(); ++l)
        if (counts[l] != 0.0) used.push_back(static_cast<Eigen::Index>(l));
      Matrix z(dim_, static_cast<Eigen::Index>(used.size()));
      Vector c(static_cast<Eigen::Index>(used.size()));
      for (std::size_t r = 0; r < used.size(); ++r) {
        z.col(static_cast<Eigen::Index>(r)) = pair_points_[static_cast<std::size_t>(used[r])];
        c[static_cast<Eigen::Index>(r)] = -scale * counts[static_cast<std::size_t>(used[r])];
      }
      add_gaussian_field(z, c, targets, params_.sigma, u, gp);
    }
  }

  Vector swarm_part = Vector::Zero(q);
  Matrix swarm_grad = Matrix::Zero(dim_, want_grad ? q : 0);
  add_gaussian_field(positions_matrix(swarm, dim_), signed_weights(swarm), targets, params_.sigma, swarm_part,
                     want_grad ? &swarm_grad : nullptr);
  u += kernel_factor * swarm_part;
  if (want_grad) g += kernel_factor * swarm_grad;

  Matrix atoms(dim_, static_cast<Eigen::Index>(params_.atoms.size()));
  for (std::size_t a = 0; a < params_.atoms.size(); ++a) atoms.col(static_cast<Eigen::Index>(a)) = params_.atoms[a];
  const Vector aw = -Eigen::Map<const Vector>(params_.atom_weights.data(), static_cast<Eigen::Index>(params_.atom_weights.size()));
  add_gaussian_field(atoms, aw, targets, params_.sigma, u, gp);

  for (Eigen::Index k = 0; k < q; ++k) {
    values[static_cast<std::size_t>(k)] = u[k];
    if (want_grad) grads[static_cast<std::size_t>(k)] = g.col(k);
  }
}

// ---------------------------------------------------------------- gmm

GmmKernel::GmmKernel(Matrix samples, double tau)
    : samples_(std::move(samples)), tau_(tau), kernel_var_(2.0 * (1.0 + tau * tau)),
      data_var_(1.0 + 2.0 * tau * tau) {
  if (!(tau > 0.0)) throw std::invalid_argument("GmmKernel: tau must be positive");
  if (samples_.rows() == 0 || samples_.cols() == 0) throw std::invalid_argument("GmmKernel: empty sample");
  const Eigen::Index n = samples_.rows();
  // <f_hat, f_hat> = (1/n^2) sum_ij N(X_i; X_j, 2 tau^2 I)
  double acc = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    double row = 0.5 * density(0.0, 2.0 * tau * tau);
    for (Eigen::Index j = i + 1; j < n; ++j) {
      row += density((samples_.row(i) - samples_.row(j)).squaredNorm(), 2.0 * tau * tau);
    }
    acc += 2.0 * row;
  }
  y_norm_sq_ = acc / (static_cast<double>(n) * static_cast<double>(n));
}

double GmmKernel::density(double r2, double v) const {
  const double d = static_cast<double>(samples_.cols());
  return std::pow(2.0 * std::numbers::pi * v, -0.5 * d) * std::exp(-r2 / (2.0 * v));
}

double GmmKernel::kernel(const Vector& s, const Vector& t) const {
  return density((s - t).squaredNorm(), kernel_var_);
}

Vector GmmKernel::grad1_kernel(const Vector& s, const Vector& t) const {
  return (-kernel(s, t) / kernel_var_) * (s - t);
}

double GmmKernel::y_inner_sample(const Vector& t, std::size_t i) const {
  return density((samples_.row(static_cast<Eigen::Index>(i)).transpose() - t).squaredNorm(), data_var_);
}

Vector GmmKernel::grad_y_inner_sample(const Vector& t, std::size_t i) const {
  const Vector diff = samples_.row(static_cast<Eigen::Index>(i)).transpose() - t;
  return (density(diff.squaredNorm(), data_var_) / data_var_) * diff;
}

double GmmKernel::y_inner(const Vector& t) const {
  double acc = 0.0;
  for (std::size_t i = 0; i < n_samples(); ++i) acc += y_inner_sample(t, i);
  return acc / static_cast<double>(n_samples());
}

Vector GmmKernel::grad_y_inner(const Vector& t) const {
  Vector acc = Vector::Zero(dim());
  for (std::size_t i = 0; i < n_samples(); ++i) acc += grad_y_inner_sample(t, i);
  return acc / static_cast<double>(n_samples());
}

void GmmKernel::residual_field(const ParticleSwarm& swarm, std::span<const Vector> points,
                               const SampleIndices* batch, std::span<double> values,
                               std::span<Vector> grads) const {
  if (values.size() != points.size() || (!grads.empty() && grads.size() != points.size())) {
    throw std::invalid_argument("residual_field: output size mismatch");
  }
  const bool want_grad = !grads.empty();
  const std::size_t m = batch != nullptr ? batch->size() : n_samples();
  const double inv_m = 1.0 / static_cast<double>(m);
  const double norm = std::pow(2.0 * std::numbers::pi * data_var_, -0.5 * dim());
  const int d = dim();
  for (std::size_t k = 0; k < points.size(); ++k) {
    const Vector& t = points[k];
    double u = 0.0;
    Vector g = Vector::Zero(d);
    for (const auto& p : swarm) {
      const double ws = p.weight * p.sign;
      const double kv = kernel(p.position, t);
      u += ws * kv;
      if (want_grad) g += (ws * kv / kernel_var_) * (p.position - t);
    }
    double yv = 0.0;
    Vector gy = Vector::Zero(d);
    for (std::size_t r = 0; r < m; ++r) {
      const auto i = static_cast<Eigen::Index>(batch != nullptr ? (*batch)[r] : r);
      double r2 = 0.0;
      for (int c = 0; c < d; ++c) {
        const double diff = samples_(i, c) - t[c];
        r2 += diff * diff;
      }
      const double q = norm * std::exp(-r2 / (2.0 * data_var_));
      yv += q;
      if (want_grad) {
        for (int c = 0; c < d; ++c) gy[c] += q * (samples_(i, c) - t[c]);
      }
    }
    values[k] = u - yv * inv_m;
    if (want_grad) grads[k] = g - gy * (inv_m / data_var_);
  }
}

// ---------------------------------------------------------------- relu


ReluKernel::ReluKernel(const Matrix& features, Vector targets) : targets_(std::move(targets)) {
  if (features.rows() == 0 || features.rows() != targets_.size()) {
    throw std::invalid_argument("ReluKernel: features and targets must be non-empty and aligned");
  }
  inputs_.resize(features.rows(), features.cols() + 1);
  inputs_.leftCols(features.cols()) = features;
  inputs_.col(features.cols()).setOnes();
  y_norm_sq_ = targets_.squaredNorm() / static_cast<double>(targets_.size());
}

double ReluKernel::kernel(const Vector& s, const Vector& t) const {
  const Vector a = (inputs_ * s).cwiseMax(0.0);
  const Vector b = (inputs_ * t).cwiseMax(0.0);
  return a.dot(b) / static_cast<double>(inputs_.rows());
}

Vector ReluKernel::grad1_kernel(const Vector& s, const Vector& t) const {
  const Vector zs = inputs_ * s;
  const Vector b = (inputs_ * t).cwiseMax(0.0);
  const Vector coeff = (zs.array() > 0.0).select(b, 0.0);
  return inputs_.transpose() * coeff / static_cast<double>(inputs_.rows());
}

double ReluKernel::y_inner(const Vector& t) const {
  return targets_.dot((inputs_ * t).cwiseMax(0.0)) / static_cast<double>(inputs_.rows());
}

Vector ReluKernel::grad_y_inner(const Vector& t) const {
  const Vector z = inputs_ * t;
  const Vector coeff = (z.array() > 0.0).select(targets_, 0.0);
  return inputs_.transpose() * coeff / static_cast<double>(inputs_.rows());
}

double ReluKernel::kernel_sample(const Vector& s, const Vector& t, std::size_t i) const {
  const auto row = inputs_.row(static_cast<Eigen::Index>(i));
  return std::max(0.0, row.dot(s)) * std::max(0.0, row.dot(t));
}

Vector ReluKernel::grad1_kernel_sample(const Vector& s, const Vector& t, std::size_t i) const {
  const auto row = inputs_.row(static_cast<Eigen::Index>(i));
  if (!(row.dot(s) > 0.0)) return Vector::Zero(dim());
  return std::max(0.0, row.dot(t)) * row.transpose();
}

double ReluKernel::y_inner_sample(const Vector& t, std::size_t i) const {
  const auto row = inputs_.row(static_cast<Eigen::Index>(i));
  return targets_[static_cast<Eigen::Index>(i)] * std::max(0.0, row.dot(t));
}

Vector ReluKernel::grad_y_inner_sample(const Vector& t, std::size_t i) const {
  const auto row = inputs_.row(static_cast<Eigen::Index>(i));
  if (!(row.dot(t) > 0.0)) return Vector::Zero(dim());
  return targets_[static_cast<Eigen::Index>(i)] * row.transpose();
}

void ReluKernel::residual_field(const ParticleSwarm& swarm, std::span<const Vector> points,
                                const SampleIndices* batch, std::span<double> values,
                                std::span<Vector> grads) const {
  if (values.size() != points.size() || (!grads.empty() && grads.size() != points.size())) {
    throw std::invalid_argument("residual_field: output size mismatch");
  }
  if (points.empty()) return;
  Matrix xb_storage;
  Vector yb_storage;
  if (batch != nullptr) {
    xb_storage.resize(static_cast<Eigen::Index>(batch->size()), inputs_.cols());
    yb_storage.resize(static_cast<Eigen::Index>(batch->size()));
    for (std::size_t r = 0; r < batch->size(); ++r) {
      const auto i = static_cast<Eigen::Index>((*batch)[r]);
      xb_storage.row(static_cast<Eigen::Index>(r)) = inputs_.row(i);
      yb_storage[static_cast<Eigen::Index>(r)] = targets_[i];
    }
  }
  const Matrix& xb = batch != nullptr ? xb_storage : inputs_;
  const Vector& yb = batch != nullptr ? yb_storage : targets_;
  const double inv_m = 1.0 / static_cast<double>(xb.rows());

  Vector residual = -yb;
  if (!swarm.empty()) {
    residual.noalias() += (xb * positions_matrix(swarm, dim())).cwiseMax(0.0) * signed_weights(swarm);
  }
  Matrix pts(dim(), static_cast<Eigen::Index>(points.size()));
  for (std::size_t k = 0; k < points.size(); ++k) pts.col(static_cast<Eigen::Index>(k)) = points[k];
  const Matrix z = xb * pts;  // m x q
  const Vector vals = z.cwiseMax(0.0).transpose() * residual * inv_m;
  for (std::size_t k = 0; k < points.size(); ++k) values[k] = vals[static_cast<Eigen::Index>(k)];
  if (!grads.empty()) {
    const Matrix masked = (z.array() > 0.0).cast<double>().matrix().array().colwise() * residual.array();
    const Matrix g = xb.transpose() * masked * inv_m;  // (d+1) x q
    for (std::size_t k = 0; k < points.size(); ++k) grads[k] = g.col(static_cast<Eigen::Index>(k));
  }
}

double ReluKernel::quadratic_form(const ParticleSwarm& swarm) const {
  if (swarm.empty()) return 0.0;
  const Vector f = (inputs_ * positions_matrix(swarm, dim())).cwiseMax(0.0) * signed_weights(swarm);
  return f.squaredNorm() / static_cast<double>(inputs_.rows());
}

Vector ReluKernel::predict(const ParticleSwarm& swarm, const Matrix& features) const {
  if (features.cols() + 1 != inputs_.cols()) throw std::invalid_argument("predict: feature dimension mismatch");
  if (swarm.empty()) return Vector::Zero(features.rows());
  Matrix aug(features.rows(), features.cols() + 1);
  aug.leftCols(features.cols()) = features;
  aug.col(features.cols()).setOnes();
  return (aug * positions_matrix(swarm, dim())).cwiseMax(0.0) * signed_weights(swarm);
}

}  // namespace fsp
