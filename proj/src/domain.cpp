#include "fsp/domain.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace fsp {

namespace {

void check_dim(const Domain& domain, const Vector& x, const char* what) {
  if (x.size() != domain.dim()) {
    throw std::invalid_argument(std::string(what) + ": dimension mismatch (got " +
                                std::to_string(x.size()) + ", domain has " +
                                std::to_string(domain.dim()) + ")");
  }
}

}  // namespace

Domain Domain::box(Vector lower, Vector upper) {
  if (lower.size() == 0 || lower.size() != upper.size()) {
    throw std::invalid_argument("Domain::box: bounds must be non-empty and of equal length");
  }
  for (Eigen::Index i = 0; i < lower.size(); ++i) {
    if (!(lower[i] < upper[i]) || !std::isfinite(lower[i]) || !std::isfinite(upper[i])) {
      throw std::invalid_argument("Domain::box: need finite lower[i] < upper[i]");
    }
  }
  Domain d;
  d.dim_ = static_cast<int>(lower.size());
  d.shape_ = Box{std::move(lower), std::move(upper)};
  return d;
}

Domain Domain::unit_box(int dim) { return box(Vector::Zero(dim), Vector::Ones(dim)); }

Domain Domain::ball(Vector center, double radius) {
  if (center.size() == 0) throw std::invalid_argument("Domain::ball: empty center");
  if (!(radius > 0.0) || !std::isfinite(radius)) {
    throw std::invalid_argument("Domain::ball: radius must be positive and finite");
  }
  Domain d;
  d.dim_ = static_cast<int>(center.size());
  d.shape_ = Ball{std::move(center), radius};
  return d;
}

bool Domain::contains(const Vector& x, double tol) const {
  if (x.size() != dim_) return false;
  if (const auto* b = std::get_if<Box>(&shape_)) {
    return ((x - b->lower).array() >= -tol).all() && ((b->upper - x).array() >= -tol).all();
  }
  const auto& ball = std::get<Ball>(shape_);
  return (x - ball.center).norm() <= ball.radius * (1.0 + tol) + tol;
}

double Domain::volume() const {
  if (const auto* b = std::get_if<Box>(&shape_)) return (b->upper - b->lower).prod();
  const auto& ball = std::get<Ball>(shape_);
  return unit_ball_volume(dim_) * std::pow(ball.radius, dim_);
}

double Domain::diameter() const {
  if (const auto* b = std::get_if<Box>(&shape_)) return (b->upper - b->lower).norm();
  return 2.0 * std::get<Ball>(shape_).radius;
}

Box Domain::bounding_box() const {
  if (const auto* b = std::get_if<Box>(&shape_)) return *b;
  const auto& ball = std::get<Ball>(shape_);
  const Vector r = Vector::Constant(dim_, ball.radius);
  return Box{ball.center - r, ball.center + r};
}

Vector project(const Domain& domain, const Vector& x) {
  check_dim(domain, x, "project");
  if (domain.is_box()) {
    const auto& b = domain.as_box();
    return x.cwiseMax(b.lower).cwiseMin(b.upper);
  }
  const auto& ball = domain.as_ball();
  const Vector offset = x - ball.center;
  const double r = offset.norm();
  if (r <= ball.radius) return x;
  return ball.center + offset * (ball.radius / r);
}

ProxResult prox_step(const Domain& domain, const Vector& t, const Vector& v, double beta) {
  if (!(beta > 0.0)) throw std::invalid_argument("prox_step: beta must be positive");
  check_dim(domain, t, "prox_step");
  check_dim(domain, v, "prox_step");
  ProxResult out;
  out.t_plus = project(domain, t - beta * v);
  out.pi = (t - out.t_plus) / beta;
  return out;
}

Vector sample_uniform(const Domain& domain, RandomStream& rng) {
  const Box bb = domain.bounding_box();
  Vector x(domain.dim());
  for (;;) {
    for (int i = 0; i < domain.dim(); ++i) {
      x[i] = bb.lower[i] + (bb.upper[i] - bb.lower[i]) * rng.uniform();
    }
    if (domain.is_box() || domain.contains(x, 0.0)) return x;
  }
}

double volume(const Domain& domain) { return domain.volume(); }

std::vector<Vector> lattice(const Domain& domain, int resolution) {
  std::vector<Vector> points;
  if (resolution < 1) return points;
  const Box bb = domain.bounding_box();
  const int d = domain.dim();
  std::vector<int> idx(d, 0);
  Vector x(d);
  for (;;) {
    for (int i = 0; i < d; ++i) {
      const double frac = resolution == 1 ? 0.5 : static_cast<double>(idx[i]) / (resolution - 1);
      x[i] = bb.lower[i] + frac * (bb.upper[i] - bb.lower[i]);
    }
    if (domain.contains(x)) points.push_back(project(domain, x));
    int i = 0;
    while (i < d && ++idx[i] == resolution) idx[i++] = 0;
    if (i == d) break;
  }
  return points;
}

double unit_ball_volume(int d) {
  return std::pow(std::numbers::pi, 0.5 * d) / std::tgamma(0.5 * d + 1.0);
}

}  // namespace fsp
