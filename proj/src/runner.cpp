#include "fsp/runner.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "fsp/csv.hpp"
#include "fsp/oracle.hpp"

namespace fsp {

void RunConfig::validate() const {
  if (K < 0) throw std::invalid_argument("run: K must be >= 0");
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw std::invalid_argument("run: alpha must be finite and >= 0");
  if (cadence < 1) throw std::invalid_argument("run: cadence must be >= 1");
  if (kkt_resolution < 0 || kkt_every < 0) throw std::invalid_argument("run: kkt settings must be >= 0");
  if (birth_death) birth.validate();
  initial.validate();
}

const IterationRecord& RunResult::last_evaluated() const {
  for (auto it = trace.rbegin(); it != trace.rend(); ++it)
    if (it->evaluated) return *it;
  throw std::runtime_error("run result has no evaluated rows");
}

RunResult run(const RunConfig& config, const Problem& problem) {
  config.validate();
  using clock = std::chrono::steady_clock;
  const auto start = clock::now();
  auto elapsed = [&] { return std::chrono::duration<double>(clock::now() - start).count(); };

  const RandomStream root(config.seed);
  RandomStream batch_rng = root.split("batch");
  RandomStream batch_plus_rng = root.split("batch-plus");
  RandomStream death_rng = root.split("death");
  RandomStream birth_rng = root.split("birth");

  const bool stochastic = config.variant == Variant::Stochastic;
  const std::size_t n = problem.model->n_samples();
  const int kkt_every = config.kkt_every > 0 ? config.kkt_every : config.cadence;
  std::vector<Vector> grid;
  if (config.kkt_resolution > 0) grid = lattice(problem.domain, config.kkt_resolution);

  RunResult result;
  result.record_time = config.record_time;
  ParticleSwarm swarm = config.initial;
  std::optional<double> last_loss;

  auto record = [&](long k, std::size_t births, std::size_t deaths, std::optional<double> cert_norm_sq) {
    IterationRecord rec;
    rec.k = k;
    rec.tv = tv_norm(swarm);
    rec.particles = swarm.size();
    rec.births = births;
    rec.deaths = deaths;
    rec.cert_norm_sq = cert_norm_sq;
    const bool boundary = k == 0 || k == config.K;
    if (boundary || k % config.cadence == 0) {
      rec.evaluated = true;
      rec.loss = loss(problem, swarm);
      if (last_loss) rec.delta = *last_loss - rec.loss;
      last_loss = rec.loss;
    }
    if (!grid.empty() && (boundary || k % kkt_every == 0))
      rec.min_cert = kkt_residual(problem, swarm, grid).min_cert_grid;
    rec.time_s = elapsed();
    result.trace.push_back(rec);
  };

  record(0, 0, 0, std::nullopt);

  for (long k = 1; k <= config.K; ++k) {
    const ScheduleStep step = schedule_at(config.plan, k);
    const StepRates rates{config.alpha, step.beta};

    const auto pos = swarm.positions();
    const auto sg = swarm.signs();
    std::vector<double> certs(swarm.size());
    std::vector<Vector> grads(swarm.size());
    if (stochastic) {
      const MiniBatch z = draw_batch(batch_rng, step.m, n);
      estimate_certificate_and_grad(problem, swarm, pos, sg, z, certs, grads);
    } else {
      dual_certificates(problem, swarm, pos, sg, certs, grads);
    }
    double cert_norm_sq = 0.0;
    for (std::size_t j = 0; j < swarm.size(); ++j) cert_norm_sq += swarm[j].weight * certs[j] * certs[j];

    ParticleSwarm pushed = weight_push_update(problem, swarm, certs, grads, rates);

    std::size_t n_births = 0;
    std::size_t n_deaths = 0;
    if (config.birth_death) {
      const auto ppos = pushed.positions();
      const auto psg = pushed.signs();
      std::vector<double> pushed_certs(pushed.size());
      BirthOutcome births;
      if (stochastic) {
        const MiniBatch z_plus = draw_batch(batch_plus_rng, step.m, n);
        if (!pushed.empty()) estimate_certificate_and_grad(problem, pushed, ppos, psg, z_plus, pushed_certs, {});
        const auto deaths = select_deaths(pushed, pushed_certs, config.death, step.eps, death_rng);
        births = propose_births(problem, pushed, config.birth, step.eps, step.m, z_plus, birth_rng);
        n_deaths = deaths.size();
        swarm = apply_mass_tweak(pushed, deaths, births.born);
      } else {
        if (!pushed.empty()) dual_certificates(problem, pushed, ppos, psg, pushed_certs);
        const auto deaths = select_deaths(pushed, pushed_certs, config.death, step.eps, death_rng);
        births = propose_births_exact(problem, pushed, config.birth, step.eps, step.m, birth_rng);
        n_deaths = deaths.size();
        swarm = apply_mass_tweak(pushed, deaths, births.born);
      }
      n_births = births.born.size();
    } else {
      swarm = std::move(pushed);
    }
    result.total_births += n_births;
    result.total_deaths += n_deaths;
    record(k, n_births, n_deaths, cert_norm_sq);
  }

  result.final_swarm = swarm;
  const double j_ref = config.j_ref.value_or(0.0);
  result.rho_hat = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < result.trace.size(); ++i) {
    const auto& rec = result.trace[i];
    if (rec.evaluated && rec.loss - j_ref < result.rho_hat) {
      result.rho_hat = rec.loss - j_ref;
      result.best_index = i;
    }
  }
  result.wall_time_s = elapsed();
  return result;
}

RunResult run_plain_cpgd(RunConfig config, const Problem& problem) {
  config.birth_death = false;
  return run(config, problem);
}

double track_excess(const std::vector<IterationRecord>& trace, double j_ref) {
  double best = std::numeric_limits<double>::infinity();
  bool any = false;
  for (const auto& rec : trace) {
    if (!rec.evaluated) continue;
    any = true;
    best = std::min(best, rec.loss - j_ref);
  }
  if (!any) throw std::invalid_argument("track_excess: trace has no evaluated loss");
  return best;
}

namespace {

std::string opt(const std::optional<double>& v) { return v ? csv::format_double(*v) : std::string(); }

std::optional<double> parse_opt(const std::string& cell) {
  if (cell.empty()) return std::nullopt;
  return csv::parse_double(cell);
}

const char* const kTraceHeader = "k,time_s,loss,tv,particles,births,deaths,min_cert,delta,cert_norm_sq";

}  // namespace

void write_trace_csv(std::ostream& out, const std::vector<IterationRecord>& trace, bool with_time) {
  out << kTraceHeader << '\n';
  for (const auto& r : trace) {
    out << r.k << ',' << (with_time ? csv::format_double(r.time_s) : std::string()) << ','
        << (r.evaluated ? csv::format_double(r.loss) : std::string()) << ',' << csv::format_double(r.tv) << ','
        << r.particles << ',' << r.births << ',' << r.deaths << ',' << opt(r.min_cert) << ',' << opt(r.delta)
        << ',' << opt(r.cert_norm_sq) << '\n';
  }
}

void save_trace_csv(const std::string& path, const std::vector<IterationRecord>& trace, bool with_time) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  write_trace_csv(out, trace, with_time);
  if (!out) throw std::runtime_error("write failed: " + path);
}

std::vector<IterationRecord> read_trace_csv(std::istream& in) {
  const csv::Table table = csv::read_table(in);
  if (csv::split_line(kTraceHeader) != table.header)
    throw std::runtime_error("malformed trace: unexpected header");
  std::vector<IterationRecord> trace;
  for (const auto& row : table.rows) {
    IterationRecord r;
    r.k = static_cast<long>(csv::parse_double(row[0]));
    r.time_s = row[1].empty() ? 0.0 : csv::parse_double(row[1]);
    if (!row[2].empty()) {
      r.evaluated = true;
      r.loss = csv::parse_double(row[2]);
    }
    r.tv = csv::parse_double(row[3]);
    r.particles = static_cast<std::size_t>(csv::parse_double(row[4]));
    r.births = static_cast<std::size_t>(csv::parse_double(row[5]));
    r.deaths = static_cast<std::size_t>(csv::parse_double(row[6]));
    r.min_cert = parse_opt(row[7]);
    r.delta = parse_opt(row[8]);
    r.cert_norm_sq = parse_opt(row[9]);
    trace.push_back(r);
  }
  if (trace.empty()) throw std::runtime_error("malformed trace: no rows");
  return trace;
}

std::vector<IterationRecord> load_trace_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open trace " + path);
  return read_trace_csv(in);
}

void write_summary(std::ostream& out, const RunResult& result, const std::string& method,
                   const std::optional<double>& test_mse) {
  const auto& last = result.last_evaluated();
  out << "method = " << method << '\n';
  out << "iterations = " << result.trace.back().k << '\n';
  out << "loss = " << csv::format_double(last.loss) << '\n';
  out << "tv = " << csv::format_double(tv_norm(result.final_swarm)) << '\n';
  out << "p_initial = " << result.trace.front().particles << '\n';
  out << "p_final = " << result.final_swarm.size() << '\n';
  out << "deaths = " << result.total_deaths << '\n';
  out << "births = " << result.total_births << '\n';
  out << "rho_hat = " << csv::format_double(result.rho_hat) << '\n';
  out << "best_k = " << result.trace[result.best_index].k << '\n';
  if (last.min_cert) out << "min_cert = " << csv::format_double(*last.min_cert) << '\n';
  if (test_mse) out << "test_mse = " << csv::format_double(*test_mse) << '\n';
  out << "time_s = " << csv::format_double(result.wall_time_s) << '\n';
}

}  // namespace fsp
