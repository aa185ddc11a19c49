#include "fsp/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <limits>
#include <ostream>
#include <set>
#include <sstream>

#include "fsp/csv.hpp"

namespace fsp {

namespace {

const std::map<std::string, std::set<std::string>>& schema() {
  static const std::map<std::string, std::set<std::string>> s = {
      {"problem",
       {"model", "kappa", "signed", "dim", "lower", "upper", "sigma", "atoms", "atom_weights", "n_samples",
        "noise_y", "noise_kernel", "data_seed", "preset", "samples", "tau", "data", "features", "teacher_neurons",
        "noise", "test_fraction"}},
      {"rates", {"mode", "alpha", "beta", "audit_points", "audit_seed"}},
      {"schedule", {"plan", "eps", "batch"}},
      {"birth_death",
       {"enabled", "death", "tau_death", "scan", "birth_threshold", "a_exponent", "candidates", "birth_mass"}},
      {"run",
       {"profile", "variant", "K", "seed", "cadence", "kkt_resolution", "kkt_every", "init", "init_particles",
        "init_mass", "init_center", "init_spread", "init_file", "reference"}},
      {"output", {"wall_time", "dir"}},
  };
  return s;
}

std::string trim(std::string s) {
  auto not_space = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}

std::string lower(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

// Typed accessors with the section.key in error messages.
class Reader {
 public:
  explicit Reader(const ConfigFile& c) : c_(c) {}

  std::optional<std::string> str(const std::string& sec, const std::string& key) const { return c_.get(sec, key); }
  std::string str(const std::string& sec, const std::string& key, const std::string& def) const {
    return c_.get(sec, key).value_or(def);
  }
  double num(const std::string& sec, const std::string& key, double def) const {
    const auto v = c_.get(sec, key);
    if (!v) return def;
    return to_double(sec, key, *v);
  }
  std::optional<double> num(const std::string& sec, const std::string& key) const {
    const auto v = c_.get(sec, key);
    if (!v) return std::nullopt;
    return to_double(sec, key, *v);
  }
  long integer(const std::string& sec, const std::string& key, long def) const {
    const auto v = c_.get(sec, key);
    if (!v) return def;
    const double d = to_double(sec, key, *v);
    if (d != std::floor(d) || std::abs(d) > 9e15) fail(sec, key, "expected an integer, got '" + *v + "'");
    return static_cast<long>(d);
  }
  std::uint64_t u64(const std::string& sec, const std::string& key, std::uint64_t def) const {
    const auto v = c_.get(sec, key);
    if (!v) return def;
    try {
      std::size_t used = 0;
      const unsigned long long x = std::stoull(*v, &used);
      if (used != v->size()) throw std::invalid_argument("trailing");
      return x;
    } catch (const std::exception&) {
      fail(sec, key, "expected an unsigned integer, got '" + *v + "'");
    }
  }
  bool boolean(const std::string& sec, const std::string& key, bool def) const {
    const auto v = c_.get(sec, key);
    if (!v) return def;
    const std::string s = lower(*v);
    if (s == "true" || s == "yes" || s == "on" || s == "1") return true;
    if (s == "false" || s == "no" || s == "off" || s == "0") return false;
    fail(sec, key, "expected a boolean, got '" + *v + "'");
  }
  std::string choice(const std::string& sec, const std::string& key, const std::string& def,
                     std::initializer_list<const char*> allowed) const {
    const std::string v = lower(str(sec, key, def));
    for (const char* a : allowed)
      if (v == a) return v;
    std::string list;
    for (const char* a : allowed) list += std::string(list.empty() ? "" : ", ") + a;
    fail(sec, key, "unknown value '" + v + "' (expected one of " + list + ")");
  }
  std::vector<double> list(const std::string& sec, const std::string& key) const {
    const auto v = c_.get(sec, key);
    if (!v) return {};
    return parse_list(sec, key, *v);
  }
  // Points separated by ';', coordinates by ',' or whitespace.
  std::vector<Vector> points(const std::string& sec, const std::string& key, int dim) const {
    std::vector<Vector> out;
    const auto v = c_.get(sec, key);
    if (!v) return out;
    std::stringstream ss(*v);
    std::string item;
    while (std::getline(ss, item, ';')) {
      if (trim(item).empty()) continue;
      const auto xs = parse_list(sec, key, item);
      if (static_cast<int>(xs.size()) != dim)
        fail(sec, key, "point '" + trim(item) + "' does not have " + std::to_string(dim) + " coordinates");
      out.push_back(Eigen::Map<const Vector>(xs.data(), dim));
    }
    return out;
  }

  [[noreturn]] static void fail(const std::string& sec, const std::string& key, const std::string& msg) {
    throw ConfigError("[" + sec + "] " + key + ": " + msg);
  }

 private:
  static double to_double(const std::string& sec, const std::string& key, const std::string& v) {
    const std::string s = lower(v);
    if (s == "inf" || s == "+inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    try {
      return csv::parse_double(v);
    } catch (const std::exception&) {
      fail(sec, key, "expected a number, got '" + v + "'");
    }
  }
  static std::vector<double> parse_list(const std::string& sec, const std::string& key, const std::string& v) {
    std::string s = v;
    std::replace(s.begin(), s.end(), ',', ' ');
    std::stringstream ss(s);
    std::vector<double> out;
    std::string tok;
    while (ss >> tok) out.push_back(to_double(sec, key, tok));
    return out;
  }

  const ConfigFile& c_;
};

struct Built {
  std::shared_ptr<const KernelModel> model;
  Domain domain;
  std::optional<RegressionDataset> regression;
  std::shared_ptr<const ReluKernel> relu;
  std::optional<ParticleSwarm> truth;
};

Built build_model(const Reader& r, const ConfigFile& cfg, const std::string& model) {
  if (model == "synthetic") {
    const int d = static_cast<int>(r.integer("problem", "dim", 1));
    if (d < 1) Reader::fail("problem", "dim", "must be >= 1");
    auto lo = r.list("problem", "lower");
    auto hi = r.list("problem", "upper");
    if (lo.empty()) lo.assign(d, 0.0);
    if (hi.empty()) hi.assign(d, 1.0);
    if (static_cast<int>(lo.size()) != d || static_cast<int>(hi.size()) != d)
      Reader::fail("problem", "lower", "lower/upper must have dim entries");
    Domain domain = Domain::box(Eigen::Map<Vector>(lo.data(), d), Eigen::Map<Vector>(hi.data(), d));
    SyntheticKernel::Params p;
    p.sigma = r.num("problem", "sigma", 0.1);
    p.atoms = r.points("problem", "atoms", d);
    p.atom_weights = r.list("problem", "atom_weights");
    if (p.atoms.empty()) {
      for (int a = 0; a < 2; ++a) p.atoms.push_back(Vector::Constant(d, a == 0 ? 0.3 : 0.7));
      if (p.atom_weights.empty()) p.atom_weights = {1.0, 0.6};
    }
    if (p.atom_weights.size() != p.atoms.size())
      Reader::fail("problem", "atom_weights", "needs one weight per atom");
    p.n_samples = static_cast<std::size_t>(r.integer("problem", "n_samples", 256));
    p.noise_y = r.num("problem", "noise_y", 0.2);
    p.noise_kernel = r.num("problem", "noise_kernel", 0.2);
    p.seed = r.u64("problem", "data_seed", 1);
    ParticleSwarm truth;
    for (std::size_t a = 0; a < p.atoms.size(); ++a)
      if (p.atom_weights[a] != 0.0)
        truth.push_back(Particle{std::abs(p.atom_weights[a]), p.atom_weights[a] > 0 ? 1 : -1, p.atoms[a]});
    auto model_ptr = std::make_shared<SyntheticKernel>(p, domain);
    return Built{model_ptr, domain, std::nullopt, nullptr, truth};
  }
  if (model == "gmm") {
    const double tau = r.num("problem", "tau", 0.5);
    if (const auto path = r.str("problem", "samples")) {
      GmmData data = gmm_from_samples(load_samples_csv(cfg.resolve(*path).string()), tau);
      return Built{data.kernel, data.domain, std::nullopt, nullptr, std::nullopt};
    }
    const std::string preset = r.choice("problem", "preset", "desk", {"desk", "full"});
    const std::uint64_t seed = r.u64("problem", "data_seed", 1);
    GmmSpec spec = preset == "desk" ? GmmSpec::desk(seed) : GmmSpec::full(seed);
    spec.tau = tau;
    spec.n_samples = static_cast<std::size_t>(r.integer("problem", "n_samples", static_cast<long>(spec.n_samples)));
    GmmData data = gen_gmm(spec);
    return Built{data.kernel, data.domain, std::nullopt, nullptr, data.truth};
  }
  // relu
  RandomStream rng = RandomStream(r.u64("problem", "data_seed", 1)).split("regression");
  const double test_fraction = r.num("problem", "test_fraction", 0.2);
  const std::string data_src = r.str("problem", "data", "teacher");
  RegressionDataset data =
      data_src == "teacher"
          ? make_teacher_regression(static_cast<std::size_t>(r.integer("problem", "n_samples", 2000)),
                                    static_cast<int>(r.integer("problem", "features", 4)),
                                    static_cast<int>(r.integer("problem", "teacher_neurons", 5)),
                                    r.num("problem", "noise", 0.1), rng, test_fraction)
          : load_regression(cfg.resolve(data_src).string(), rng, test_fraction);
  auto kernel = relu_kernel(data);
  Domain domain = relu_domain(static_cast<int>(data.train_x.cols()));
  std::optional<ParticleSwarm> truth = data.teacher;
  return Built{kernel, domain, std::move(data), kernel, truth};
}

}  // namespace

Profile parse_profile(const std::string& name) {
  const std::string s = lower(name);
  if (s == "theory") return Profile::Theory;
  if (s == "experiments") return Profile::Experiments;
  throw ConfigError("unknown profile '" + name + "' (expected theory or experiments)");
}

std::string profile_name(Profile p) { return p == Profile::Theory ? "theory" : "experiments"; }

ConfigFile ConfigFile::parse(std::istream& in, std::filesystem::path base_dir) {
  ConfigFile cfg;
  cfg.base_dir = std::move(base_dir);
  std::string line;
  std::string section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError("line " + std::to_string(lineno) + ": malformed section header");
      section = lower(trim(line.substr(1, line.size() - 2)));
      if (!schema().count(section)) throw ConfigError("line " + std::to_string(lineno) + ": unknown section [" + section + "]");
      cfg.sections[section];
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    if (section.empty()) throw ConfigError("line " + std::to_string(lineno) + ": key outside a section");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (!schema().at(section).count(key))
      throw ConfigError("line " + std::to_string(lineno) + ": unknown key '" + key + "' in [" + section + "]");
    if (cfg.sections[section].count(key))
      throw ConfigError("line " + std::to_string(lineno) + ": duplicate key '" + key + "' in [" + section + "]");
    cfg.sections[section][key] = value;
  }
  return cfg;
}

ConfigFile ConfigFile::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  return parse(in, std::filesystem::absolute(path).parent_path());
}

std::optional<std::string> ConfigFile::get(const std::string& section, const std::string& key) const {
  const auto s = sections.find(section);
  if (s == sections.end()) return std::nullopt;
  const auto k = s->second.find(key);
  if (k == s->second.end()) return std::nullopt;
  return k->second;
}

void ConfigFile::set(const std::string& section, const std::string& key, const std::string& value) {
  if (!schema().count(section) || !schema().at(section).count(key))
    throw ConfigError("unknown key '" + key + "' in [" + section + "]");
  sections[section][key] = value;
}

std::filesystem::path ConfigFile::resolve(const std::string& p) const {
  const std::filesystem::path path(p);
  return path.is_absolute() ? path : base_dir / path;
}

Setup build_setup(const ConfigFile& cfg, const SetupOptions& options) {
  const Reader r(cfg);
  Setup s;
  s.profile = options.profile.value_or(parse_profile(r.str("run", "profile", "theory")));
  const bool theory = s.profile == Profile::Theory;

  s.model_name = r.choice("problem", "model", "synthetic", {"synthetic", "gmm", "relu"});
  Built built = build_model(r, cfg, s.model_name);
  s.model = built.model;
  s.regression = std::move(built.regression);
  s.relu = built.relu;
  const double default_kappa = s.model_name == "gmm" ? 1e-4 : (s.model_name == "relu" ? 5e-4 : 0.05);
  const double kappa = r.num("problem", "kappa", default_kappa);
  if (!(kappa > 0.0)) Reader::fail("problem", "kappa", "must be positive");
  const bool is_signed = r.boolean("problem", "signed", s.model_name == "relu");
  s.problem = std::make_shared<Problem>(built.model, built.domain, kappa, is_signed);
  const Problem& problem = *s.problem;
  const int d = problem.dim();

  RunConfig& run = s.run;
  run.seed = options.seed.value_or(r.u64("run", "seed", 0));
  run.variant = r.choice("run", "variant", "stochastic", {"full", "stochastic"}) == "full" ? Variant::FullBatch
                                                                                          : Variant::Stochastic;
  const bool stochastic = run.variant == Variant::Stochastic;
  run.K = r.integer("run", "K", 1000);
  if (run.K < 0) Reader::fail("run", "K", "must be >= 0");
  run.cadence = static_cast<int>(r.integer("run", "cadence", 10));
  if (run.cadence < 1) Reader::fail("run", "cadence", "must be >= 1");
  run.kkt_resolution = static_cast<int>(r.integer("run", "kkt_resolution", 0));
  run.kkt_every = static_cast<int>(r.integer("run", "kkt_every", 0));
  run.record_time = r.boolean("output", "wall_time", false);

  // Initial swarm.
  RandomStream init_rng = RandomStream(run.seed).split("init");
  const std::string init = r.choice("run", "init", "uniform", {"uniform", "cluster", "file", "empty"});
  const auto p0 = static_cast<std::size_t>(r.integer("run", "init_particles", 20));
  const double mass0 = r.num("run", "init_mass", 1.0);
  if (!(mass0 >= 0.0)) Reader::fail("run", "init_mass", "must be >= 0");
  if (init == "uniform") {
    run.initial = uniform_swarm(problem.domain, p0, mass0, problem.signed_measures, init_rng);
  } else if (init == "cluster") {
    auto c = r.points("run", "init_center", d);
    if (c.size() != 1) Reader::fail("run", "init_center", "cluster init needs exactly one center");
    run.initial = clustered_swarm(problem.domain, c.front(), r.num("run", "init_spread", 0.5), p0, mass0, init_rng);
  } else if (init == "file") {
    const auto path = r.str("run", "init_file");
    if (!path) Reader::fail("run", "init_file", "required when init = file");
    run.initial = load_swarm_csv(cfg.resolve(*path).string());
  }
  for (const auto& p : run.initial)
    if (p.position.size() != d) Reader::fail("run", "init_file", "particle dimension does not match the domain");

  const std::string reference = r.str("run", "reference", "none");
  if (reference == "truth" || reference == "teacher") {
    if (!built.truth) Reader::fail("run", "reference", "this model has no planted reference");
    s.reference = built.truth;
    run.j_ref = loss(problem, *built.truth);
  } else if (reference != "none") {
    run.j_ref = r.num("run", "reference", 0.0);
  }

  // Rates: audited calibration or manual values.
  s.rates_mode = r.choice("rates", "mode", theory ? "calibrated" : "manual", {"calibrated", "manual"});
  const bool calibrated = s.rates_mode == "calibrated";
  const std::string thr = lower(r.str("birth_death", "birth_threshold", theory ? "c_a" : "0"));
  if (calibrated || options.audit_always || thr == "c_a") {
    const int pts = static_cast<int>(r.integer("rates", "audit_points", 300));
    const std::uint64_t audit_seed = r.u64("rates", "audit_seed", 7);
    RandomStream a1 = RandomStream(audit_seed).split("audit");
    AssumptionBounds b = audit_assumptions(*s.model, problem.domain, pts, a1, 1.0);
    s.bounds = b;
    try {
      Calibration first = calibrate(b, tv_norm(run.initial), kappa, problem.domain.volume(),
                                    std::sqrt(s.model->y_norm_sq()), stochastic);
      if (stochastic) {
        // Oracle deviations scale with the mass a swarm may carry.
        RandomStream a2 = RandomStream(audit_seed).split("audit");
        b = audit_assumptions(*s.model, problem.domain, pts, a2, std::max(1.0, first.C_TV));
        s.bounds = b;
        first = calibrate(b, tv_norm(run.initial), kappa, problem.domain.volume(), std::sqrt(s.model->y_norm_sq()),
                          stochastic);
      }
      s.calibration = first;
    } catch (const CalibrationUnavailable&) {
      if (calibrated) throw;
    }
  }

  double alpha = 0.0;
  double beta = 0.0;
  if (calibrated) {
    alpha = s.calibration->alpha;
    beta = s.calibration->chosen_beta;
    if (const auto a = r.num("rates", "alpha")) {
      if (!(*a > 0.0 && *a <= alpha)) Reader::fail("rates", "alpha", "must lie in (0, calibrated alpha]");
      alpha = *a;
    }
    if (const auto bt = r.num("rates", "beta")) {
      if (!(*bt >= 0.0 && *bt <= beta)) Reader::fail("rates", "beta", "must lie in [0, calibrated beta]");
      beta = *bt;
    }
  } else {
    const auto a = r.num("rates", "alpha");
    if (!a || !(*a > 0.0)) Reader::fail("rates", "alpha", "manual rates need alpha > 0");
    alpha = *a;
    beta = r.num("rates", "beta", 0.0);
    if (!(beta >= 0.0)) Reader::fail("rates", "beta", "must be >= 0");
  }
  run.alpha = alpha;

  const std::string plan = r.choice("schedule", "plan", theory ? "anytime" : "constant", {"horizon", "anytime", "constant"});
  if (plan == "horizon") {
    try {
      run.plan = horizon_plan(run.K, alpha, beta, d);
    } catch (const std::invalid_argument& e) {
      Reader::fail("schedule", "plan", e.what());
    }
  } else if (plan == "anytime") {
    run.plan = AnytimePlan{alpha, beta};
  } else {
    ConstantPlan c;
    c.eps = r.num("schedule", "eps", std::min(alpha, 0.01));
    c.m = static_cast<std::size_t>(r.integer("schedule", "batch", 256));
    c.beta = beta;
    if (!(c.eps > 0.0)) Reader::fail("schedule", "eps", "must be positive");
    if (c.m < 1) Reader::fail("schedule", "batch", "must be >= 1");
    run.plan = c;
  }

  // Birth and death.
  run.birth_death = r.boolean("birth_death", "enabled", true);
  const std::string death = r.choice("birth_death", "death", theory ? "theory" : "ratio", {"theory", "ratio"});
  const ScanMode scan =
      r.choice("birth_death", "scan", "all", {"all", "single"}) == "all" ? ScanMode::AllParticles : ScanMode::SingleUniform;
  if (death == "theory") {
    run.death = DeathRule::theory(scan);
  } else {
    const double tau = r.num("birth_death", "tau_death", 5.0);
    if (!(tau > 0.0)) Reader::fail("birth_death", "tau_death", "must be positive");
    run.death = DeathRule::ratio(tau, scan);
  }
  const double a_exp = r.num("birth_death", "a_exponent", OracleConfig::min_exponent(d));
  if (!(a_exp > 0.0)) Reader::fail("birth_death", "a_exponent", "must be positive");
  if (s.bounds && s.bounds->E_inf_est > 0.0) s.oracle = OracleConfig::make(a_exp, s.bounds->E_inf_est);
  if (thr == "c_a") {
    if (!s.oracle) Reader::fail("birth_death", "birth_threshold", "c_a needs a positive audited noise bound");
    run.birth.threshold_coeff = s.oracle->c_a();
  } else {
    run.birth.threshold_coeff = r.num("birth_death", "birth_threshold", 0.0);
  }
  run.birth.candidates_per_iter = static_cast<int>(r.integer("birth_death", "candidates", theory ? 1 : 32));
  if (run.birth.candidates_per_iter < 1) Reader::fail("birth_death", "candidates", "must be >= 1");
  run.birth.birth_mass = r.num("birth_death", "birth_mass", 0.0);

  s.method = std::string(stochastic ? "Stochastic" : "Full-Batch") + (run.birth_death ? " + BD" : "");
  s.output_dir = cfg.resolve(r.str("output", "dir", "out"));
  try {
    run.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return s;
}

void write_calibration_report(std::ostream& out, const Setup& s) {
  const Problem& problem = *s.problem;
  out << "model = " << s.model_name << '\n';
  out << "profile = " << profile_name(s.profile) << '\n';
  out << "dim = " << problem.dim() << '\n';
  out << "kappa = " << csv::format_double(problem.kappa) << '\n';
  out << "domain_volume = " << csv::format_double(problem.domain.volume()) << '\n';
  out << "y_norm = " << csv::format_double(std::sqrt(s.model->y_norm_sq())) << '\n';
  out << "initial_tv = " << csv::format_double(tv_norm(s.run.initial)) << '\n';
  if (s.bounds) {
    const auto& b = *s.bounds;
    out << "[audit]\n";
    out << "c_P = " << csv::format_double(b.c_P_est) << '\n';
    out << "C_P = " << csv::format_double(b.C_P_est) << '\n';
    out << "G = " << csv::format_double(b.G) << '\n';
    out << "H = " << csv::format_double(b.H) << '\n';
    out << "E_inf = " << csv::format_double(b.E_inf_est) << '\n';
    out << "positivity = " << (b.positivity_ok ? "ok" : "FAILED") << '\n';
    out << "normalization_gap = " << csv::format_double(b.normalization_gap) << '\n';
    if (b.normalization_gap > 1e-9)
      out << "warning = kernel is not normalized: max |K(t,t) - 1| = " << csv::format_double(b.normalization_gap) << '\n';
  }
  if (s.calibration) {
    const auto& c = *s.calibration;
    out << "[calibration]\n";
    out << (c.stochastic ? "R_hat = " : "R = ") << csv::format_double(c.R) << '\n';
    out << "C_TV = " << csv::format_double(c.C_TV) << '\n';
    out << "alpha_cap_radius = " << csv::format_double(c.cap_radius) << '\n';
    out << "alpha_cap_structural = " << csv::format_double(c.cap_structural) << '\n';
    out << "alpha_cap_hoeffding = " << csv::format_double(c.hoeffding_cap) << '\n';
    out << "alpha = " << csv::format_double(c.alpha) << '\n';
    out << "binding_cap = " << c.binding_cap << '\n';
    out << "beta_max_struct = " << csv::format_double(c.beta_max_struct) << '\n';
    out << "beta = " << csv::format_double(c.chosen_beta) << '\n';
  }
  if (s.oracle) {
    out << "a_exponent = " << csv::format_double(s.oracle->a_exponent) << '\n';
    out << "c_a = " << csv::format_double(s.oracle->c_a()) << '\n';
  }
  out << "[rates]\n";
  out << "mode = " << s.rates_mode << '\n';
  out << "alpha = " << csv::format_double(s.run.alpha) << '\n';
  out << "[schedule]\n";
  out << "plan = " << plan_name(s.run.plan) << '\n';
  for (long k : {1L, 10L, 100L, 1000L}) {
    if (s.run.K > 0 && k > s.run.K) break;
    const ScheduleStep st = schedule_at(s.run.plan, k);
    out << "k = " << k << ": eps = " << csv::format_double(st.eps) << ", m = " << st.m
        << ", beta = " << csv::format_double(st.beta) << '\n';
  }
}

}  // namespace fsp
