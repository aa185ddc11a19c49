#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "fsp/kernels.hpp"
#include "fsp/objective.hpp"

namespace fsp {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

const std::vector<std::string>& verify_suite_names();
/// Runs one suite ("all" runs every suite). Throws std::invalid_argument for unknown names.
std::vector<CheckResult> run_verify_suite(const std::string& suite, std::uint64_t seed);

/// Small instances of each kernel model.
Problem small_synthetic_problem(int d, std::uint64_t seed, double noise = 0.2, double sigma = 0.15);
Problem small_gmm_problem(std::uint64_t seed);
Problem small_relu_problem(std::uint64_t seed);

/// Random swarm with total mass `tv` on the problem's lifted domain.
ParticleSwarm random_swarm(const Problem& problem, std::size_t p, double tv, RandomStream& rng);

/// g(x) = v_min + A (1 - exp(-|x-c|^2 / (2 s^2))) + B (1 - cos(w.(x-c))) on the
/// unit box, or a cone v_min + L |x - c| when A = B = 0.
struct BumpFunction {
  Vector center;
  double v_min = -1.0;
  double amp = 0.0;
  double width = 1.0;
  double wave_amp = 0.0;
  Vector wave;
  double cone_slope = 0.0;

  double operator()(const Vector& x) const;
  /// Global Lipschitz constant.
  double lipschitz() const;
};

/// Random bump whose minimizer is far enough from the boundary of [0,1]^d.
BumpFunction random_bump(int d, bool cone, RandomStream& rng);

/// omega_d / 2^d
double sublevel_constant(int d);

struct VolumeCheck {
  double mc_fraction = 0.0;
  double mc_sigma = 0.0;
  double lower_bound = 0.0;
  bool passed = false;
};

/// Monte-Carlo volume of {g <= v_min/2} in [0,1]^d against C_d L^{-d} |v_min|^d.
VolumeCheck check_sublevel_volume(const BumpFunction& g, int d, std::size_t samples, RandomStream& rng);

}  // namespace fsp
