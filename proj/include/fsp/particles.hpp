#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "fsp/domain.hpp"

namespace fsp {

/// One lifted Dirac mass: weight * delta_(position, sign). The feature of a
/// signed particle is sign * phi(position).
struct Particle {
  double weight = 0.0;
  int sign = 1;
  Vector position;
};

/// Finite nonnegative measure on X x {-1,+1}, stored as an ordered list.
class ParticleSwarm {
 public:
  ParticleSwarm() = default;
  explicit ParticleSwarm(std::vector<Particle> particles);

  std::size_t size() const { return particles_.size(); }
  bool empty() const { return particles_.empty(); }
  const Particle& operator[](std::size_t j) const { return particles_[j]; }
  Particle& operator[](std::size_t j) { return particles_[j]; }
  const std::vector<Particle>& particles() const { return particles_; }

  void push_back(Particle p);
  void append(const ParticleSwarm& other);

  auto begin() const { return particles_.begin(); }
  auto end() const { return particles_.end(); }

  std::vector<Vector> positions() const;
  std::vector<int> signs() const;
  Vector weights() const;

  /// Throws std::invalid_argument if any weight is negative or any field is not finite.
  void validate() const;

  friend bool operator==(const ParticleSwarm& a, const ParticleSwarm& b);

 private:
  std::vector<Particle> particles_;
};

double tv_norm(const ParticleSwarm& swarm);

/// Keeps particles with weight > floor, preserving order.
ParticleSwarm prune_zero(const ParticleSwarm& swarm, double floor);

/// Lifts signed atoms a_j delta_{x_j} to nonnegative particles {|a_j|, sign(a_j), x_j};
/// zero atoms are dropped.
ParticleSwarm lift_signed(std::span<const double> weights, std::span<const Vector> positions);

/// CSV with header `weight,sign,x0,...,x{d-1}`.
void write_swarm_csv(std::ostream& out, const ParticleSwarm& swarm, int dim);
ParticleSwarm read_swarm_csv(std::istream& in);
void save_swarm_csv(const std::string& path, const ParticleSwarm& swarm, int dim);
ParticleSwarm load_swarm_csv(const std::string& path);

}  // namespace fsp
