#include "fsp/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "fsp/csv.hpp"

namespace fsp {

GmmSpec GmmSpec::desk(std::uint64_t seed) {
  GmmSpec spec;
  spec.means = {Vector{{-6.0, -6.0}}, Vector{{6.0, -6.0}}, Vector{{0.0, 0.0}}, Vector{{-6.0, 6.0}},
                Vector{{6.0, 6.0}}};
  spec.weights = {0.2, 0.2, 0.2, 0.2, 0.2};
  spec.n_samples = 2000;
  spec.tau = 0.5;
  spec.seed = seed;
  return spec;
}

GmmSpec GmmSpec::full(std::uint64_t seed) {
  GmmSpec spec;
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j) spec.means.push_back(Vector{{-12.0 + 6.0 * i, -12.0 + 6.0 * j}});
  spec.weights.assign(25, 1.0 / 25.0);
  spec.n_samples = 24000;
  spec.tau = 0.5;
  spec.seed = seed;
  return spec;
}

void GmmSpec::validate() const {
  if (means.empty() || means.size() != weights.size()) throw std::invalid_argument("gmm: means and weights must align");
  if (n_samples == 0) throw std::invalid_argument("gmm: n_samples must be >= 1");
  if (!(tau > 0.0)) throw std::invalid_argument("gmm: tau must be positive");
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0)) throw std::invalid_argument("gmm: weights must be nonnegative");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-9) throw std::invalid_argument("gmm: weights must sum to 1");
  for (const auto& m : means)
    if (m.size() != means.front().size()) throw std::invalid_argument("gmm: mean dimension mismatch");
}

namespace {

Domain padded_box(const Matrix& samples) {
  Vector lo = samples.colwise().minCoeff().transpose();
  Vector hi = samples.colwise().maxCoeff().transpose();
  const Vector margin = (0.1 * (hi - lo)).cwiseMax(1e-3);
  return Domain::box(lo - margin, hi + margin);
}

}  // namespace

GmmData gmm_from_samples(Matrix samples, double tau) {
  Domain domain = padded_box(samples);
  auto kernel = std::make_shared<GmmKernel>(samples, tau);
  return GmmData{std::move(samples), std::move(kernel), std::move(domain), ParticleSwarm{}};
}

GmmData gen_gmm(const GmmSpec& spec) {
  spec.validate();
  RandomStream rng = RandomStream(spec.seed).split("gmm-samples");
  const int d = spec.dim();
  std::vector<double> cumulative(spec.weights.size());
  std::partial_sum(spec.weights.begin(), spec.weights.end(), cumulative.begin());
  Matrix samples(static_cast<Eigen::Index>(spec.n_samples), d);
  for (std::size_t i = 0; i < spec.n_samples; ++i) {
    const double u = rng.uniform() * cumulative.back();
    std::size_t c = static_cast<std::size_t>(std::upper_bound(cumulative.begin(), cumulative.end(), u) - cumulative.begin());
    c = std::min(c, spec.means.size() - 1);
    for (int a = 0; a < d; ++a) samples(static_cast<Eigen::Index>(i), a) = spec.means[c][a] + rng.normal();
  }
  GmmData data = gmm_from_samples(std::move(samples), spec.tau);
  for (std::size_t c = 0; c < spec.means.size(); ++c) {
    if (!data.domain.contains(spec.means[c])) throw std::invalid_argument("gmm: mean outside the data box");
    data.truth.push_back(Particle{spec.weights[c], 1, spec.means[c]});
  }
  return data;
}

Matrix load_samples_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open samples " + path);
  const csv::Table table = csv::read_table(in);
  if (table.rows.empty()) throw std::runtime_error("samples file has no rows: " + path);
  Matrix m(static_cast<Eigen::Index>(table.rows.size()), static_cast<Eigen::Index>(table.header.size()));
  for (std::size_t i = 0; i < table.rows.size(); ++i)
    for (std::size_t j = 0; j < table.header.size(); ++j)
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = csv::parse_double(table.rows[i][j]);
  return m;
}

void save_samples_csv(const std::string& path, const Matrix& samples) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  for (Eigen::Index j = 0; j < samples.cols(); ++j) out << (j ? "," : "") << 'x' << j;
  out << '\n';
  for (Eigen::Index i = 0; i < samples.rows(); ++i) {
    for (Eigen::Index j = 0; j < samples.cols(); ++j) out << (j ? "," : "") << csv::format_double(samples(i, j));
    out << '\n';
  }
}

RegressionDataset make_regression(const Matrix& features, const Vector& targets, RandomStream& rng,
                                  double test_fraction) {
  const Eigen::Index n = features.rows();
  if (n < 2 || targets.size() != n) throw std::invalid_argument("regression: need at least two aligned rows");
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) throw std::invalid_argument("regression: bad test fraction");
  if (!features.allFinite() || !targets.allFinite()) throw std::invalid_argument("regression: non-finite value");

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  for (std::size_t i = order.size() - 1; i > 0; --i) std::swap(order[i], order[rng.index(i + 1)]);
  const Eigen::Index n_test = std::max<Eigen::Index>(1, static_cast<Eigen::Index>(std::llround(test_fraction * n)));
  const Eigen::Index n_train = n - n_test;
  if (n_train < 1) throw std::invalid_argument("regression: empty training split");

  Matrix x(n, features.cols());
  Vector y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    x.row(i) = features.row(order[static_cast<std::size_t>(i)]);
    y[i] = targets[order[static_cast<std::size_t>(i)]];
  }
  RegressionDataset data;
  auto standardize = [n_train](auto&& col, const std::string& what, double& mean, double& scale) {
    mean = col.head(n_train).mean();
    const double var = (col.head(n_train).array() - mean).square().mean();
    if (!(var > 1e-24)) throw std::invalid_argument("regression: " + what + " is constant");
    scale = std::sqrt(var);
    col = (col.array() - mean) / scale;
  };
  data.feature_mean.resize(x.cols());
  data.feature_scale.resize(x.cols());
  for (Eigen::Index j = 0; j < x.cols(); ++j)
    standardize(x.col(j), "feature column " + std::to_string(j), data.feature_mean[j], data.feature_scale[j]);
  standardize(y, "target", data.target_mean, data.target_scale);

  data.train_x = x.topRows(n_train);
  data.train_y = y.head(n_train);
  data.test_x = x.bottomRows(n_test);
  data.test_y = y.tail(n_test);
  return data;
}

RegressionDataset load_regression(const std::string& path, RandomStream& rng, double test_fraction) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open regression data " + path);
  const csv::Table table = csv::read_table(in);
  if (table.header.size() < 2) throw std::invalid_argument("regression: need at least one feature and a target");
  const Eigen::Index n = static_cast<Eigen::Index>(table.rows.size());
  const Eigen::Index d = static_cast<Eigen::Index>(table.header.size()) - 1;
  Matrix x(n, d);
  Vector y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& row = table.rows[static_cast<std::size_t>(i)];
    for (Eigen::Index j = 0; j < d; ++j) x(i, j) = csv::parse_double(row[static_cast<std::size_t>(j)]);
    y[i] = csv::parse_double(row.back());
  }
  return make_regression(x, y, rng, test_fraction);
}

RegressionDataset make_teacher_regression(std::size_t n, int d, int neurons, double noise, RandomStream& rng,
                                          double test_fraction) {
  if (n < 2 || d < 1 || neurons < 1) throw std::invalid_argument("teacher: bad sizes");
  const Eigen::Index rows = static_cast<Eigen::Index>(n);
  Matrix x(rows, d);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (int j = 0; j < d; ++j) x(i, j) = rng.normal();
  // Unit-norm hidden units in the augmented space with signed output weights.
  std::vector<Vector> units;
  std::vector<double> out_w;
  for (int u = 0; u < neurons; ++u) {
    Vector w(d + 1);
    for (int j = 0; j <= d; ++j) w[j] = rng.normal();
    w[d] *= 0.5;
    units.push_back(w / w.norm());
    out_w.push_back((u % 2 == 0 ? 1.0 : -1.0) * (1.0 + rng.uniform()));
  }
  Matrix aug(rows, d + 1);
  aug.leftCols(d) = x;
  aug.col(d).setOnes();
  Vector y = Vector::Zero(rows);
  for (int u = 0; u < neurons; ++u) y += out_w[static_cast<std::size_t>(u)] * (aug * units[static_cast<std::size_t>(u)]).cwiseMax(0.0);
  for (Eigen::Index i = 0; i < rows; ++i) y[i] += noise * rng.normal();

  RegressionDataset data = make_regression(x, y, rng, test_fraction);
  const Vector& mx = data.feature_mean;
  const Vector& sx = data.feature_scale;
  const double my = data.target_mean;
  const double sy = data.target_scale;

  // Original x = mx + sx * z, so w.x + b = (w * sx).z + (b + w.mx).
  ParticleSwarm teacher;
  for (int u = 0; u < neurons; ++u) {
    const Vector& w = units[static_cast<std::size_t>(u)];
    Vector t(d + 1);
    t.head(d) = w.head(d).cwiseProduct(sx);
    t[d] = w[d] + w.head(d).dot(mx);
    const double scale = t.norm();
    if (scale == 0.0) continue;
    const double a = out_w[static_cast<std::size_t>(u)] * scale / sy;
    teacher.push_back(Particle{std::abs(a), a >= 0.0 ? 1 : -1, t / scale});
  }
  // Constant unit absorbs the target mean shift.
  Vector bias = Vector::Zero(d + 1);
  bias[d] = 1.0;
  const double shift = -my / sy;
  if (shift != 0.0) teacher.push_back(Particle{std::abs(shift), shift >= 0.0 ? 1 : -1, bias});
  data.teacher = teacher;
  return data;
}

std::shared_ptr<const ReluKernel> relu_kernel(const RegressionDataset& data) {
  return std::make_shared<ReluKernel>(data.train_x, data.train_y);
}

Domain relu_domain(int d) { return Domain::ball(Vector::Zero(d + 1), 1.0); }

double test_mse(const ReluKernel& kernel, const ParticleSwarm& swarm, const RegressionDataset& data) {
  const Vector pred = kernel.predict(swarm, data.test_x);
  return (pred - data.test_y).squaredNorm() / static_cast<double>(data.test_y.size());
}

ParticleSwarm uniform_swarm(const Domain& domain, std::size_t p, double total_mass, bool signed_measures,
                            RandomStream& rng) {
  ParticleSwarm swarm;
  if (p == 0) return swarm;
  const double w = total_mass / static_cast<double>(p);
  for (std::size_t j = 0; j < p; ++j) {
    Vector x = sample_uniform(domain, rng);
    const int s = signed_measures ? (rng.uniform() < 0.5 ? 1 : -1) : 1;
    swarm.push_back(Particle{w, s, std::move(x)});
  }
  return swarm;
}

ParticleSwarm clustered_swarm(const Domain& domain, const Vector& center, double spread, std::size_t p,
                              double total_mass, RandomStream& rng) {
  if (center.size() != domain.dim()) throw std::invalid_argument("clustered_swarm: center dimension mismatch");
  ParticleSwarm swarm;
  if (p == 0) return swarm;
  const double w = total_mass / static_cast<double>(p);
  for (std::size_t j = 0; j < p; ++j) {
    Vector x = center;
    for (Eigen::Index a = 0; a < x.size(); ++a) x[a] += spread * (2.0 * rng.uniform() - 1.0);
    swarm.push_back(Particle{w, 1, project(domain, x)});
  }
  return swarm;
}

SummaryRow summary_row(const std::string& method, const RunResult& result, const std::optional<double>& mse) {
  SummaryRow row;
  row.method = method;
  row.loss = result.last_evaluated().loss;
  row.tv = tv_norm(result.final_swarm);
  row.p_initial = result.trace.front().particles;
  row.p_final = result.final_swarm.size();
  row.time_s = result.wall_time_s;
  row.deaths = result.total_deaths;
  row.births = result.total_births;
  row.test_mse = mse;
  return row;
}

SummaryRow summary_row(const std::string& method, const std::vector<IterationRecord>& trace) {
  if (trace.empty()) throw std::invalid_argument("summary_row: empty trace");
  SummaryRow row;
  row.method = method;
  bool any = false;
  for (auto it = trace.rbegin(); it != trace.rend(); ++it)
    if (it->evaluated) {
      row.loss = it->loss;
      any = true;
      break;
    }
  if (!any) throw std::invalid_argument("summary_row: trace has no evaluated loss");
  row.tv = trace.back().tv;
  row.p_initial = trace.front().particles;
  row.p_final = trace.back().particles;
  if (trace.back().time_s > 0.0) row.time_s = trace.back().time_s;
  for (const auto& r : trace) {
    row.deaths += r.deaths;
    row.births += r.births;
  }
  return row;
}

namespace {

std::string fmt(double v, int precision) {
  std::ostringstream os;
  os << std::setprecision(precision) << v;
  return os.str();
}

}  // namespace

SummaryTable summarize(const std::vector<SummaryRow>& rows) {
  if (rows.empty()) throw std::invalid_argument("summarize: no runs");
  return SummaryTable{rows};
}

std::string SummaryTable::text() const {
  const bool mse = std::any_of(rows.begin(), rows.end(), [](const SummaryRow& r) { return r.test_mse.has_value(); });
  std::vector<std::vector<std::string>> cells;
  std::vector<std::string> head = {"Method", "Loss", "TV", "p_final", "Time", "Deaths", "Births"};
  if (mse) head.push_back("Test MSE");
  cells.push_back(head);
  for (const auto& r : rows) {
    std::vector<std::string> c = {r.method,
                                  fmt(r.loss, 6),
                                  fmt(r.tv, 4),
                                  std::to_string(r.p_final),
                                  r.time_s ? fmt(*r.time_s, 3) : "-",
                                  std::to_string(r.deaths),
                                  std::to_string(r.births)};
    if (mse) c.push_back(r.test_mse ? fmt(*r.test_mse, 6) : "-");
    cells.push_back(c);
  }
  std::vector<std::size_t> width(head.size(), 0);
  for (const auto& c : cells)
    for (std::size_t j = 0; j < c.size(); ++j) width[j] = std::max(width[j], c[j].size());
  std::ostringstream os;
  for (const auto& c : cells) {
    for (std::size_t j = 0; j < c.size(); ++j) {
      if (j) os << "  ";
      if (j == 0)
        os << std::left << std::setw(static_cast<int>(width[j])) << c[j];
      else
        os << std::right << std::setw(static_cast<int>(width[j])) << c[j];
    }
    os << '\n';
  }
  return os.str();
}

std::string SummaryTable::csv() const {
  std::ostringstream os;
  os << "method,loss,tv,p_initial,p_final,time_s,deaths,births,test_mse\n";
  for (const auto& r : rows) {
    os << r.method << ',' << csv::format_double(r.loss) << ',' << csv::format_double(r.tv) << ',' << r.p_initial
       << ',' << r.p_final << ',' << (r.time_s ? csv::format_double(*r.time_s) : "") << ',' << r.deaths << ','
       << r.births << ',' << (r.test_mse ? csv::format_double(*r.test_mse) : "") << '\n';
  }
  return os.str();
}

}  // namespace fsp
