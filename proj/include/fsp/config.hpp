#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>

#include "fsp/experiments.hpp"
#include "fsp/oracle.hpp"
#include "fsp/runner.hpp"
#include "fsp/schedules.hpp"

namespace fsp {

/// Bad or inconsistent configuration (CLI exit code 2).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Profile { Theory, Experiments };
Profile parse_profile(const std::string& name);
std::string profile_name(Profile p);

/// `[section]` headers, `key = value` lines, `#` comments. Keys outside the
/// known schema are rejected.
struct ConfigFile {
  std::map<std::string, std::map<std::string, std::string>> sections;
  std::filesystem::path base_dir;

  static ConfigFile parse(std::istream& in, std::filesystem::path base_dir);
  static ConfigFile load(const std::filesystem::path& path);

  std::optional<std::string> get(const std::string& section, const std::string& key) const;
  void set(const std::string& section, const std::string& key, const std::string& value);
  /// Resolves a path relative to the config location.
  std::filesystem::path resolve(const std::string& p) const;
};

/// Everything a run needs, assembled from a config.
struct Setup {
  Profile profile = Profile::Theory;
  std::string model_name;
  std::shared_ptr<const KernelModel> model;
  std::shared_ptr<const Problem> problem;
  RunConfig run;
  std::string method;
  std::string rates_mode;  // "calibrated" or "manual"
  std::optional<AssumptionBounds> bounds;
  std::optional<Calibration> calibration;
  std::optional<OracleConfig> oracle;
  std::optional<RegressionDataset> regression;
  std::shared_ptr<const ReluKernel> relu;
  std::optional<ParticleSwarm> reference;
  std::filesystem::path output_dir;
};

struct SetupOptions {
  std::optional<Profile> profile;
  std::optional<std::uint64_t> seed;
  /// Only audit and calibrate (no failure for manual rates).
  bool audit_always = false;
};

Setup build_setup(const ConfigFile& config, const SetupOptions& options = {});

/// Structured text report of the audit and calibration.
void write_calibration_report(std::ostream& out, const Setup& setup);

}  // namespace fsp
