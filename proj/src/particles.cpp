#include "fsp/particles.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

#include "fsp/csv.hpp"

namespace fsp {

ParticleSwarm::ParticleSwarm(std::vector<Particle> particles) : particles_(std::move(particles)) {}

void ParticleSwarm::push_back(Particle p) { particles_.push_back(std::move(p)); }

void ParticleSwarm::append(const ParticleSwarm& other) {
  particles_.insert(particles_.end(), other.particles_.begin(), other.particles_.end());
}

std::vector<Vector> ParticleSwarm::positions() const {
  std::vector<Vector> out;
  out.reserve(particles_.size());
  for (const auto& p : particles_) out.push_back(p.position);
  return out;
}

std::vector<int> ParticleSwarm::signs() const {
  std::vector<int> out;
  out.reserve(particles_.size());
  for (const auto& p : particles_) out.push_back(p.sign);
  return out;
}

Vector ParticleSwarm::weights() const {
  Vector w(static_cast<Eigen::Index>(particles_.size()));
  for (std::size_t j = 0; j < particles_.size(); ++j) w[static_cast<Eigen::Index>(j)] = particles_[j].weight;
  return w;
}

void ParticleSwarm::validate() const {
  for (std::size_t j = 0; j < particles_.size(); ++j) {
    const auto& p = particles_[j];
    if (!(p.weight >= 0.0) || !std::isfinite(p.weight)) {
      throw std::invalid_argument("particle " + std::to_string(j) + ": weight must be finite and >= 0");
    }
    if (p.sign != 1 && p.sign != -1) {
      throw std::invalid_argument("particle " + std::to_string(j) + ": sign must be +1 or -1");
    }
    if (!p.position.allFinite()) {
      throw std::invalid_argument("particle " + std::to_string(j) + ": non-finite position");
    }
  }
}

bool operator==(const ParticleSwarm& a, const ParticleSwarm& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t j = 0; j < a.size(); ++j) {
    const auto& p = a.particles_[j];
    const auto& q = b.particles_[j];
    if (p.weight != q.weight || p.sign != q.sign || p.position.size() != q.position.size() ||
        p.position != q.position) {
      return false;
    }
  }
  return true;
}

double tv_norm(const ParticleSwarm& swarm) {
  double total = 0.0;
  for (const auto& p : swarm) total += p.weight;
  return total;
}

ParticleSwarm prune_zero(const ParticleSwarm& swarm, double floor) {
  std::vector<Particle> kept;
  kept.reserve(swarm.size());
  for (const auto& p : swarm) {
    if (p.weight > floor) kept.push_back(p);
  }
  return ParticleSwarm(std::move(kept));
}

ParticleSwarm lift_signed(std::span<const double> weights, std::span<const Vector> positions) {
  if (weights.size() != positions.size()) {
    throw std::invalid_argument("lift_signed: weights and positions differ in length");
  }
  std::vector<Particle> out;
  for (std::size_t j = 0; j < weights.size(); ++j) {
    if (weights[j] == 0.0) continue;
    out.push_back(Particle{std::abs(weights[j]), weights[j] > 0.0 ? 1 : -1, positions[j]});
  }
  return ParticleSwarm(std::move(out));
}

void write_swarm_csv(std::ostream& out, const ParticleSwarm& swarm, int dim) {
  out << "weight,sign";
  for (int i = 0; i < dim; ++i) out << ",x" << i;
  out << '\n';
  for (const auto& p : swarm) {
    out << csv::format_double(p.weight) << ',' << p.sign;
    for (Eigen::Index i = 0; i < p.position.size(); ++i) out << ',' << csv::format_double(p.position[i]);
    out << '\n';
  }
}

ParticleSwarm read_swarm_csv(std::istream& in) {
  const auto table = csv::read_table(in);
  if (table.header.size() < 3 || table.header[0] != "weight" || table.header[1] != "sign") {
    throw std::runtime_error("swarm CSV: header must be weight,sign,x0,...");
  }
  const auto dim = static_cast<Eigen::Index>(table.header.size() - 2);
  std::vector<Particle> particles;
  for (const auto& row : table.rows) {
    Particle p;
    p.weight = csv::parse_double(row[0]);
    const double s = csv::parse_double(row[1]);
    if (s != 1.0 && s != -1.0) throw std::runtime_error("swarm CSV: sign must be +1 or -1");
    p.sign = s > 0 ? 1 : -1;
    p.position.resize(dim);
    for (Eigen::Index i = 0; i < dim; ++i) p.position[i] = csv::parse_double(row[static_cast<std::size_t>(i) + 2]);
    particles.push_back(std::move(p));
  }
  ParticleSwarm swarm(std::move(particles));
  swarm.validate();
  return swarm;
}

void save_swarm_csv(const std::string& path, const ParticleSwarm& swarm, int dim) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  write_swarm_csv(out, swarm, dim);
}

ParticleSwarm load_swarm_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  return read_swarm_csv(in);
}

}  // namespace fsp
