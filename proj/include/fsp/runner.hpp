#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "fsp/birth_death.hpp"
#include "fsp/dynamics.hpp"
#include "fsp/objective.hpp"
#include "fsp/schedules.hpp"

namespace fsp {

enum class Variant { FullBatch, Stochastic };

struct RunConfig {
  Variant variant = Variant::Stochastic;
  bool birth_death = true;
  long K = 0;
  double alpha = 0.0;
  /// eps_k, m_k and beta_k per iteration.
  SchedulePlan plan = ConstantPlan{};
  DeathRule death = DeathRule::theory();
  BirthRule birth;
  ParticleSwarm initial;
  std::uint64_t seed = 0;
  /// Exact loss every `cadence` iterations (always at 0 and K).
  int cadence = 10;
  /// Lattice points per axis for the certificate minimum; 0 disables it.
  int kkt_resolution = 0;
  /// Certificate minimum every `kkt_every` iterations (0 means same as cadence).
  int kkt_every = 0;
  /// Write per-row wall time to the trace (breaks byte determinism).
  bool record_time = false;
  /// Reference value subtracted for the excess loss.
  std::optional<double> j_ref;

  void validate() const;
};

struct IterationRecord {
  long k = 0;
  double time_s = 0.0;
  bool evaluated = false;
  double loss = 0.0;
  double tv = 0.0;
  std::size_t particles = 0;
  std::size_t births = 0;
  std::size_t deaths = 0;
  std::optional<double> min_cert;
  std::optional<double> delta;
  std::optional<double> cert_norm_sq;
};

struct RunResult {
  std::vector<IterationRecord> trace;
  ParticleSwarm final_swarm;
  double rho_hat = 0.0;
  std::size_t best_index = 0;
  std::size_t total_births = 0;
  std::size_t total_deaths = 0;
  double wall_time_s = 0.0;
  bool record_time = false;

  const IterationRecord& last_evaluated() const;
};

RunResult run(const RunConfig& config, const Problem& problem);

/// Same loop with the mass tweak switched off.
RunResult run_plain_cpgd(RunConfig config, const Problem& problem);

/// min over evaluated rows of loss - j_ref.
double track_excess(const std::vector<IterationRecord>& trace, double j_ref);

/// `k,time_s,loss,tv,particles,births,deaths,min_cert,delta,cert_norm_sq`
void write_trace_csv(std::ostream& out, const std::vector<IterationRecord>& trace, bool with_time);
void save_trace_csv(const std::string& path, const std::vector<IterationRecord>& trace, bool with_time);
std::vector<IterationRecord> read_trace_csv(std::istream& in);
std::vector<IterationRecord> load_trace_csv(const std::string& path);

/// `key = value` lines with the final metrics.
void write_summary(std::ostream& out, const RunResult& result, const std::string& method,
                   const std::optional<double>& test_mse = std::nullopt);

}  // namespace fsp
