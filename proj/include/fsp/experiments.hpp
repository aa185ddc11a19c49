#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "fsp/kernels.hpp"
#include "fsp/objective.hpp"
#include "fsp/runner.hpp"

namespace fsp {

struct GmmSpec {
  std::vector<Vector> means;
  std::vector<double> weights;  // sums to 1
  std::size_t n_samples = 2000;
  double tau = 0.5;
  std::uint64_t seed = 1;

  /// Five well-separated unit-covariance components in the plane.
  static GmmSpec desk(std::uint64_t seed = 1);
  /// 25 components on a 5x5 lattice, n = 24000.
  static GmmSpec full(std::uint64_t seed = 1);
  int dim() const { return means.empty() ? 0 : static_cast<int>(means.front().size()); }
  void validate() const;
};

struct GmmData {
  Matrix samples;
  std::shared_ptr<const GmmKernel> kernel;
  Domain domain;
  /// The generating mixture as a swarm.
  ParticleSwarm truth;
};

/// Draws the samples (identity covariance) and a bounding box with 10% margin.
GmmData gen_gmm(const GmmSpec& spec);
/// Same from given samples (x0,x1 CSV or loaded elsewhere).
GmmData gmm_from_samples(Matrix samples, double tau);
Matrix load_samples_csv(const std::string& path);
void save_samples_csv(const std::string& path, const Matrix& samples);

struct RegressionDataset {
  Matrix train_x;
  Vector train_y;
  Matrix test_x;
  Vector test_y;
  /// Training-split statistics used for standardization.
  Vector feature_mean;
  Vector feature_scale;
  double target_mean = 0.0;
  double target_scale = 1.0;
  /// Teacher network in the standardized scale, when synthetic.
  std::optional<ParticleSwarm> teacher;
};

/// CSV with numeric columns, last column the target. Standardizes with
/// training statistics and splits rows 80/20 after a seeded shuffle.
RegressionDataset load_regression(const std::string& path, RandomStream& rng, double test_fraction = 0.2);
RegressionDataset make_regression(const Matrix& features, const Vector& targets, RandomStream& rng,
                                  double test_fraction = 0.2);

/// Two-layer ReLU teacher with `neurons` units on Gaussian inputs.
RegressionDataset make_teacher_regression(std::size_t n, int d, int neurons, double noise, RandomStream& rng,
                                          double test_fraction = 0.2);

std::shared_ptr<const ReluKernel> relu_kernel(const RegressionDataset& data);
/// Unit ball in dimension d + 1.
Domain relu_domain(int d);
double test_mse(const ReluKernel& kernel, const ParticleSwarm& swarm, const RegressionDataset& data);

/// Initial swarms.
ParticleSwarm uniform_swarm(const Domain& domain, std::size_t p, double total_mass, bool signed_measures,
                            RandomStream& rng);
/// Each coordinate uniform within `spread` of `center`, projected onto the domain.
ParticleSwarm clustered_swarm(const Domain& domain, const Vector& center, double spread, std::size_t p,
                              double total_mass, RandomStream& rng);

struct SummaryRow {
  std::string method;
  double loss = 0.0;
  double tv = 0.0;
  std::size_t p_initial = 0;
  std::size_t p_final = 0;
  std::optional<double> time_s;
  std::size_t deaths = 0;
  std::size_t births = 0;
  std::optional<double> test_mse;
};

SummaryRow summary_row(const std::string& method, const RunResult& result,
                       const std::optional<double>& test_mse = std::nullopt);
/// Row rebuilt from a trace file; time is the last recorded time if any.
SummaryRow summary_row(const std::string& method, const std::vector<IterationRecord>& trace);

struct SummaryTable {
  std::vector<SummaryRow> rows;
  std::string text() const;
  std::string csv() const;
};

SummaryTable summarize(const std::vector<SummaryRow>& rows);

}  // namespace fsp
