#include "fsp/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "fsp/config.hpp"
#include "fsp/csv.hpp"
#include "fsp/experiments.hpp"
#include "fsp/verify.hpp"

namespace fsp {

SlopeFit fit_loglog(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("fit_loglog: need at least two points");
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw std::invalid_argument("fit_loglog: values must be positive");
    lx.push_back(std::log(x[i]));
    ly.push_back(std::log(y[i]));
  }
  const double n = static_cast<double>(lx.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    mx += lx[i] / n;
    my += ly[i] / n;
  }
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxy += (lx[i] - mx) * (ly[i] - my);
    sxx += (lx[i] - mx) * (lx[i] - mx);
  }
  if (sxx == 0.0) throw std::invalid_argument("fit_loglog: need two distinct x values");
  return {sxy / sxx, my - (sxy / sxx) * mx};
}

namespace {

struct ExitError : std::runtime_error {
  ExitError(int c, const std::string& m) : std::runtime_error(m), code(c) {}
  int code;
};

Setup load_setup(const std::string& path, const std::string& profile, std::optional<std::uint64_t> seed,
                 bool audit_always) {
  const ConfigFile cfg = ConfigFile::load(path);
  SetupOptions opt;
  if (!profile.empty()) opt.profile = parse_profile(profile);
  opt.seed = seed;
  opt.audit_always = audit_always;
  return build_setup(cfg, opt);
}

int cmd_calibrate(const std::string& config, const std::string& profile) {
  const Setup setup = load_setup(config, profile, std::nullopt, true);
  write_calibration_report(std::cout, setup);
  if (!setup.calibration) {
    std::cerr << "error: calibration unavailable: kernel positivity assumption fails (c_P = "
              << (setup.bounds ? csv::format_double(setup.bounds->c_P_est) : "?") << ")\n";
    return 2;
  }
  return 0;
}

int cmd_run(const std::string& config, const std::string& profile, const std::string& out_dir,
            std::optional<std::uint64_t> seed) {
  const Setup setup = load_setup(config, profile, seed, false);
  const std::filesystem::path dir = out_dir.empty() ? setup.output_dir : std::filesystem::path(out_dir);
  std::filesystem::create_directories(dir);

  const RunResult result = run(setup.run, *setup.problem);
  std::optional<double> mse;
  if (setup.relu && setup.regression) mse = test_mse(*setup.relu, result.final_swarm, *setup.regression);

  save_trace_csv((dir / "trace.csv").string(), result.trace, setup.run.record_time);
  save_swarm_csv((dir / "final_swarm.csv").string(), result.final_swarm, setup.problem->dim());
  std::ofstream summary(dir / "summary.txt");
  if (!summary) throw std::runtime_error("cannot write " + (dir / "summary.txt").string());
  summary << "model = " << setup.model_name << '\n';
  summary << "profile = " << profile_name(setup.profile) << '\n';
  summary << "rates = " << setup.rates_mode << '\n';
  summary << "alpha = " << csv::format_double(setup.run.alpha) << '\n';
  summary << "plan = " << plan_name(setup.run.plan) << '\n';
  summary << "seed = " << setup.run.seed << '\n';
  if (setup.calibration) summary << "C_TV = " << csv::format_double(setup.calibration->C_TV) << '\n';
  if (setup.run.j_ref) summary << "j_ref = " << csv::format_double(*setup.run.j_ref) << '\n';
  write_summary(summary, result, setup.method, mse);

  std::cout << summarize({summary_row(setup.method, result, mse)}).text();
  std::cout << "artifacts written to " << dir.string() << '\n';
  return 0;
}

int cmd_verify(const std::string& suite, std::uint64_t seed) {
  const auto& names = verify_suite_names();
  if (suite != "all" && std::find(names.begin(), names.end(), suite) == names.end())
    throw ExitError(2, "unknown suite '" + suite + "'");
  bool ok = true;
  for (const auto& r : run_verify_suite(suite, seed)) {
    std::cout << (r.passed ? "PASS " : "FAIL ") << r.name << ": " << r.detail << '\n';
    ok = ok && r.passed;
  }
  return ok ? 0 : 1;
}

int cmd_report(const std::vector<std::string>& traces, std::optional<double> j_ref, int dim,
               const std::string& csv_out) {
  std::vector<SummaryRow> rows;
  std::vector<double> ks, rhos;
  for (const auto& path : traces) {
    const auto trace = load_trace_csv(path);
    rows.push_back(summary_row(std::filesystem::path(path).parent_path().filename().string().empty()
                                   ? path
                                   : std::filesystem::path(path).parent_path().filename().string(),
                               trace));
    ks.push_back(static_cast<double>(trace.back().k));
    rhos.push_back(track_excess(trace, j_ref.value_or(0.0)));
  }
  const SummaryTable table = summarize(rows);
  std::cout << table.text();
  if (!csv_out.empty()) {
    std::ofstream out(csv_out);
    if (!out) throw std::runtime_error("cannot write " + csv_out);
    out << table.csv();
  }
  std::cout << "\nK, rho_hat\n";
  for (std::size_t i = 0; i < ks.size(); ++i) std::cout << ks[i] << ", " << csv::format_double(rhos[i]) << '\n';
  bool distinct = false;
  for (double k : ks) distinct = distinct || k != ks.front();
  if (distinct) {
    try {
      const SlopeFit fit = fit_loglog(ks, rhos);
      std::cout << "fitted slope of log rho_hat vs log K = " << fit.slope << '\n';
    } catch (const std::invalid_argument& e) {
      std::cout << "slope fit unavailable: " << e.what() << '\n';
    }
    std::cout << "reference slope -1/(2(2+d)) = " << -1.0 / (2.0 * (2.0 + dim)) << " (d = " << dim << ")\n";
  }
  return 0;
}

}  // namespace

int cli_main(int argc, char** argv) {
  CLI::App app{"Birth-death conic particle gradient descent for sparse measure recovery"};
  app.require_subcommand(1);

  std::string config, profile, out_dir, suite = "all", csv_out;
  std::optional<std::uint64_t> seed;
  std::uint64_t verify_seed = 1;
  std::vector<std::string> traces;
  std::optional<double> j_ref;
  int dim = 1;

  auto* cal = app.add_subcommand("calibrate", "audit kernel constants and print step-size calibration");
  cal->add_option("--config", config, "config file")->required();
  cal->add_option("--profile", profile, "theory or experiments");

  auto* runc = app.add_subcommand("run", "run the particle method and write trace.csv, final_swarm.csv, summary.txt");
  runc->add_option("--config", config, "config file")->required();
  runc->add_option("--out", out_dir, "output directory");
  runc->add_option("--seed", seed, "run seed");
  runc->add_option("--profile", profile, "theory or experiments");

  auto* ver = app.add_subcommand("verify", "run property suites");
  ver->add_option("--suite", suite, "frechet, descent, projection, oracle, hoeffding, volume or all");
  ver->add_option("--seed", verify_seed, "suite seed");

  auto* rep = app.add_subcommand("report", "compare traces and fit the excess-loss slope");
  rep->add_option("traces", traces, "trace.csv files")->required();
  rep->add_option("--j-ref", j_ref, "reference loss for the excess");
  rep->add_option("--dim", dim, "domain dimension for the reference slope");
  rep->add_option("--csv", csv_out, "also write the table as CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*cal) return cmd_calibrate(config, profile);
    if (*runc) return cmd_run(config, profile, out_dir, seed);
    if (*ver) return cmd_verify(suite, verify_seed);
    if (*rep) return cmd_report(traces, j_ref, dim, csv_out);
  } catch (const ExitError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.code;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const CalibrationUnavailable& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}

}  // namespace fsp
