#include "fsp/verify.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "fsp/dynamics.hpp"
#include "fsp/experiments.hpp"
#include "fsp/oracle.hpp"
#include "fsp/schedules.hpp"

namespace fsp {

Problem small_synthetic_problem(int d, std::uint64_t seed, double noise, double sigma) {
  const Domain domain = Domain::unit_box(d);
  SyntheticKernel::Params p;
  p.sigma = sigma;
  p.atoms = {Vector::Constant(d, 0.3), Vector::Constant(d, 0.7)};
  p.atom_weights = {1.0, 0.6};
  p.n_samples = 64;
  p.noise_y = noise;
  p.noise_kernel = noise;
  p.seed = seed;
  return Problem(std::make_shared<SyntheticKernel>(p, domain), domain, 0.05, false);
}

Problem small_gmm_problem(std::uint64_t seed) {
  GmmSpec spec = GmmSpec::desk(seed);
  spec.n_samples = 80;
  GmmData data = gen_gmm(spec);
  return Problem(data.kernel, data.domain, 1e-4, false);
}

Problem small_relu_problem(std::uint64_t seed) {
  RandomStream rng = RandomStream(seed).split("small-relu");
  RegressionDataset data = make_teacher_regression(120, 3, 3, 0.1, rng);
  return Problem(relu_kernel(data), relu_domain(3), 5e-4, true);
}

ParticleSwarm random_swarm(const Problem& problem, std::size_t p, double tv, RandomStream& rng) {
  ParticleSwarm swarm;
  std::vector<double> w(p);
  for (auto& x : w) x = 0.05 + rng.uniform();
  const double total = std::accumulate(w.begin(), w.end(), 0.0);
  for (std::size_t j = 0; j < p; ++j) {
    const int s = problem.signed_measures ? (rng.uniform() < 0.5 ? 1 : -1) : 1;
    swarm.push_back(Particle{tv * w[j] / total, s, sample_uniform(problem.domain, rng)});
  }
  return swarm;
}

double BumpFunction::operator()(const Vector& x) const {
  const Vector r = x - center;
  double g = v_min + cone_slope * r.norm();
  if (amp != 0.0) g += amp * (1.0 - std::exp(-r.squaredNorm() / (2.0 * width * width)));
  if (wave_amp != 0.0) g += wave_amp * (1.0 - std::cos(wave.dot(r)));
  return g;
}

double BumpFunction::lipschitz() const {
  double L = cone_slope;
  if (amp != 0.0) L += amp * std::exp(-0.5) / width;
  if (wave_amp != 0.0) L += wave_amp * wave.norm();
  return L;
}

BumpFunction random_bump(int d, bool cone, RandomStream& rng) {
  BumpFunction g;
  g.v_min = -(0.2 + 0.8 * rng.uniform());
  if (cone) {
    g.cone_slope = 2.0 + 6.0 * rng.uniform();
  } else {
    g.amp = 0.5 + 2.0 * rng.uniform();
    g.width = 0.05 + 0.2 * rng.uniform();
    g.wave_amp = 0.3 * rng.uniform();
    g.wave.resize(d);
    for (int a = 0; a < d; ++a) g.wave[a] = 10.0 * (2.0 * rng.uniform() - 1.0);
  }
  const double margin = std::min(0.45, std::abs(g.v_min) / (2.0 * g.lipschitz()));
  g.center.resize(d);
  for (int a = 0; a < d; ++a) g.center[a] = margin + (1.0 - 2.0 * margin) * rng.uniform();
  return g;
}

double sublevel_constant(int d) { return unit_ball_volume(d) / std::pow(2.0, d); }

VolumeCheck check_sublevel_volume(const BumpFunction& g, int d, std::size_t samples, RandomStream& rng) {
  std::size_t hits = 0;
  Vector x(d);
  for (std::size_t i = 0; i < samples; ++i) {
    for (int a = 0; a < d; ++a) x[a] = rng.uniform();
    if (g(x) <= 0.5 * g.v_min) ++hits;
  }
  VolumeCheck out;
  const double n = static_cast<double>(samples);
  out.mc_fraction = static_cast<double>(hits) / n;
  out.lower_bound = sublevel_constant(d) * std::pow(g.lipschitz(), -d) * std::pow(std::abs(g.v_min), d);
  const double p = std::clamp(out.lower_bound, 1.0 / n, 1.0);
  out.mc_sigma = std::sqrt(p * (1.0 - p) / n);
  out.passed = out.mc_fraction >= out.lower_bound - 3.0 * out.mc_sigma;
  return out;
}

namespace {

std::string num(double v) {
  std::ostringstream os;
  os.precision(4);
  os << v;
  return os.str();
}

std::vector<Problem> all_models(std::uint64_t seed) {
  return {small_synthetic_problem(1, seed), small_synthetic_problem(2, seed), small_gmm_problem(seed),
          small_relu_problem(seed)};
}

CheckResult frechet_suite(std::uint64_t seed) {
  RandomStream rng = RandomStream(seed).split("verify-frechet");
  double worst = 0.0;
  for (const Problem& problem : all_models(seed)) {
    for (int trial = 0; trial < 100; ++trial) {
      const ParticleSwarm nu = random_swarm(problem, 1 + rng.index(8), 0.1 + 2.0 * rng.uniform(), rng);
      const ParticleSwarm sigma = random_swarm(problem, 1 + rng.index(5), 0.05 + rng.uniform(), rng);
      ParticleSwarm sum = nu;
      sum.append(sigma);
      const double scale = std::max({std::abs(loss(problem, nu)), std::abs(loss(problem, sum)), 1e-300});
      worst = std::max(worst, frechet_gap(problem, nu, sigma) / scale);
    }
  }
  return {"frechet", worst <= 1e-9, "max relative gap " + num(worst) + " (limit 1e-9)"};
}

CheckResult descent_suite(std::uint64_t seed) {
  const Problem problem = small_synthetic_problem(1, seed, 0.0, 0.5);
  RandomStream audit_rng = RandomStream(seed).split("verify-audit");
  const AssumptionBounds b = audit_assumptions(*problem.model, problem.domain, 300, audit_rng);
  const Calibration cal = calibrate(b, 1.0, problem.kappa, problem.domain.volume(),
                                    std::sqrt(problem.model->y_norm_sq()), false);
  const StepRates rates{cal.alpha, cal.chosen_beta};
  RandomStream rng = RandomStream(seed).split("verify-descent");
  int failures = 0;
  double worst_margin = -std::numeric_limits<double>::infinity();
  for (int trial = 0; trial < 100; ++trial) {
    const ParticleSwarm swarm = random_swarm(problem, 1 + rng.index(10), cal.C_TV * rng.uniform(), rng);
    std::vector<double> certs;
    std::vector<Vector> pis;
    exact_step(problem, swarm, rates, &certs, &pis);
    const DescentCheck c = descent_check(problem, swarm, rates, certs, pis);
    if (!c.holds) ++failures;
    worst_margin = std::max(worst_margin, c.lhs - c.rhs);
  }
  return {"descent", failures == 0,
          std::to_string(failures) + " violations in 100 swarms (alpha " + num(cal.alpha) + ", beta " +
              num(cal.chosen_beta) + ", C_TV " + num(cal.C_TV) + "), worst lhs - rhs " + num(worst_margin)};
}

CheckResult projection_suite(std::uint64_t seed) {
  RandomStream rng = RandomStream(seed).split("verify-projection");
  double worst_inner = 0.0, worst_lip = 0.0;
  for (int trial = 0; trial < 10000; ++trial) {
    const int d = 1 + static_cast<int>(rng.index(4));
    const Domain domain = trial % 2 == 0 ? Domain::unit_box(d) : Domain::ball(Vector::Zero(d), 1.0);
    const Vector t = sample_uniform(domain, rng);
    Vector v(d), w(d);
    for (int a = 0; a < d; ++a) {
      v[a] = 4.0 * rng.normal();
      w[a] = 4.0 * rng.normal();
    }
    const double beta = std::exp(-4.0 + 6.0 * rng.uniform());
    const Vector pi_v = prox_step(domain, t, v, beta).pi;
    const Vector pi_w = prox_step(domain, t, w, beta).pi;
    worst_inner = std::max(worst_inner, pi_v.squaredNorm() - v.dot(pi_v));
    worst_lip = std::max(worst_lip, (pi_v - pi_w).norm() - (v - w).norm());
  }
  const bool ok = worst_inner <= 1e-12 && worst_lip <= 1e-12;
  return {"projection", ok, "max(|pi|^2 - <v,pi>) " + num(worst_inner) + ", max Lipschitz excess " + num(worst_lip)};
}

CheckResult oracle_suite(std::uint64_t seed) {
  const Problem problem = small_relu_problem(seed);
  RandomStream rng = RandomStream(seed).split("verify-oracle");
  const ParticleSwarm swarm = random_swarm(problem, 6, 1.0, rng);
  const Vector t = sample_uniform(problem.domain, rng);
  const int sign = 1;
  const double exact = dual_certificate(problem, swarm, t, sign);
  const std::size_t n = problem.model->n_samples();
  const Vector pts[1] = {t};
  const int sg[1] = {sign};

  auto stats = [&](std::size_t m, int batches) {
    double sum = 0.0, sq = 0.0;
    for (int b = 0; b < batches; ++b) {
      const double v = estimate_certificate(problem, swarm, pts, sg, draw_batch(rng, m, n))[0];
      sum += v;
      sq += v * v;
    }
    const double mean = sum / batches;
    return std::pair<double, double>{mean, std::sqrt(std::max(0.0, sq / batches - mean * mean))};
  };
  const auto [mean, sd] = stats(16, 100000);
  const double z = std::abs(mean - exact) / (sd / std::sqrt(100000.0));
  std::vector<double> lx, ly;
  for (std::size_t m : {16, 64, 256}) {
    lx.push_back(std::log(static_cast<double>(m)));
    ly.push_back(std::log(stats(m, 4000).second));
  }
  const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / 3.0;
  const double my = std::accumulate(ly.begin(), ly.end(), 0.0) / 3.0;
  double sxy = 0.0, sxx = 0.0;
  for (int i = 0; i < 3; ++i) {
    sxy += (lx[i] - mx) * (ly[i] - my);
    sxx += (lx[i] - mx) * (lx[i] - mx);
  }
  const double slope = sxy / sxx;
  const bool ok = z <= 4.0 && std::abs(slope + 0.5) <= 0.05;
  return {"oracle", ok, "mean offset " + num(z) + " sigma, log-std slope " + num(slope)};
}

CheckResult hoeffding_suite(std::uint64_t seed) {
  const Problem problem = small_synthetic_problem(1, seed, 0.3);
  RandomStream audit_rng = RandomStream(seed).split("verify-audit");
  const AssumptionBounds b = audit_assumptions(*problem.model, problem.domain, 300, audit_rng, 1.0);
  const double a = OracleConfig::min_exponent(1);
  const OracleConfig oc = OracleConfig::make(a, b.E_inf_est);
  RandomStream rng = RandomStream(seed).split("verify-hoeffding");
  const ParticleSwarm swarm = random_swarm(problem, 4, 1.0, rng);
  // A point where the exact certificate is nonnegative.
  Vector x;
  for (const Vector& c : lattice(problem.domain, 101)) {
    if (dual_certificate(problem, swarm, c, 1) >= 0.0) {
      x = c;
      break;
    }
  }
  if (x.size() == 0) return {"hoeffding", false, "no point with nonnegative certificate"};
  const double exact = dual_certificate(problem, swarm, x, 1);
  const Vector pts[1] = {x};
  const int sg[1] = {1};
  std::ostringstream detail;
  bool ok = true;
  for (std::size_t m : {64, 256, 1024}) {
    const int trials = 20000;
    const double level = oc.c_a() * std::sqrt(std::log(static_cast<double>(m)) / static_cast<double>(m));
    int hits = 0;
    for (int i = 0; i < trials; ++i)
      if (estimate_certificate(problem, swarm, pts, sg, draw_batch(rng, m, problem.model->n_samples()))[0] - exact <= -level)
        ++hits;
    const double bound = std::pow(static_cast<double>(m), -a);
    const double rate = static_cast<double>(hits) / trials;
    const double sigma = std::sqrt(bound * (1.0 - bound) / trials);
    ok = ok && rate <= bound + 3.0 * sigma;
    detail << "m=" << m << ": rate " << num(rate) << " vs " << num(bound) << "; ";
  }
  return {"hoeffding", ok, detail.str()};
}

CheckResult volume_suite(std::uint64_t seed) {
  RandomStream rng = RandomStream(seed).split("verify-volume");
  int failures = 0;
  double worst_ratio = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 20; ++i) {
    const int d = 1 + i % 2;
    const BumpFunction g = random_bump(d, i % 5 == 0, rng);
    const VolumeCheck c = check_sublevel_volume(g, d, 200000, rng);
    if (!c.passed) ++failures;
    worst_ratio = std::min(worst_ratio, c.mc_fraction / c.lower_bound);
  }
  return {"volume", failures == 0,
          std::to_string(failures) + " failures in 20 functions, min volume / bound " + num(worst_ratio)};
}

}  // namespace

const std::vector<std::string>& verify_suite_names() {
  static const std::vector<std::string> names = {"frechet", "descent", "projection", "oracle", "hoeffding", "volume"};
  return names;
}

std::vector<CheckResult> run_verify_suite(const std::string& suite, std::uint64_t seed) {
  if (suite == "all") {
    std::vector<CheckResult> out;
    for (const auto& name : verify_suite_names()) {
      auto r = run_verify_suite(name, seed);
      out.insert(out.end(), r.begin(), r.end());
    }
    return out;
  }
  if (suite == "frechet") return {frechet_suite(seed)};
  if (suite == "descent") return {descent_suite(seed)};
  if (suite == "projection") return {projection_suite(seed)};
  if (suite == "oracle") return {oracle_suite(seed)};
  if (suite == "hoeffding") return {hoeffding_suite(seed)};
  if (suite == "volume") return {volume_suite(seed)};
  throw std::invalid_argument("unknown suite '" + suite + "'");
}

}  // namespace fsp
