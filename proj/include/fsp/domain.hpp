#pragma once

#include <Eigen/Dense>

#include <variant>
#include <vector>

#include "fsp/random.hpp"

namespace fsp {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

struct Box {
  Vector lower;
  Vector upper;
};

struct Ball {
  Vector center;
  double radius = 1.0;
};

/// Compact convex parameter domain. Only axis-aligned boxes and closed
/// Euclidean balls are supported; both have closed-form projections.
class Domain {
 public:
  static Domain box(Vector lower, Vector upper);
  static Domain unit_box(int dim);
  static Domain ball(Vector center, double radius);

  int dim() const { return dim_; }
  bool is_box() const { return std::holds_alternative<Box>(shape_); }
  const Box& as_box() const { return std::get<Box>(shape_); }
  const Ball& as_ball() const { return std::get<Ball>(shape_); }

  bool contains(const Vector& x, double tol = 1e-12) const;
  double volume() const;
  double diameter() const;
  /// Smallest axis-aligned box containing the domain.
  Box bounding_box() const;

 private:
  Domain() = default;
  std::variant<Box, Ball> shape_;
  int dim_ = 0;
};

/// Euclidean projection onto the domain.
Vector project(const Domain& domain, const Vector& x);

struct ProxResult {
  Vector t_plus;
  Vector pi;
};

/// Generalized gradient step: t_plus = argmin_{u in X} <u,v> + |u-t|^2/(2 beta),
/// pi = (t - t_plus) / beta.
ProxResult prox_step(const Domain& domain, const Vector& t, const Vector& v, double beta);

/// Uniform draw over the domain (rejection from the bounding box for balls).
Vector sample_uniform(const Domain& domain, RandomStream& rng);

double volume(const Domain& domain);

/// Regular lattice with `resolution` points per axis over the bounding box,
/// restricted to points inside the domain.
std::vector<Vector> lattice(const Domain& domain, int resolution);

/// Volume of the d-dimensional unit ball.
double unit_ball_volume(int d);

}  // namespace fsp
