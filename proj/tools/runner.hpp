#pragma once

#include <cstdint>
#include <filesystem>
#include <istream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ppife/ppife.hpp"

namespace ppife::runner {

/// Validation or parse failure tied to a config key path such as "scheme.epsilon".
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string key, const std::string& message);
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

struct InterfaceSpec {
  std::string type = "plane";  // plane | sphere | orthocircle | cloud
  Vec3 center = Vec3::Zero();
  double radius = 0.5;
  Vec3 normal = Vec3(1.0, 0.0, 1.0);
  double offset = 0.0;
  std::filesystem::path cloud;
};

/// Everything a run needs besides the problem itself.
struct RunOptions {
  std::vector<int> n;
  SchemeParams scheme;
  double tol = 1e-10;
  int max_iter = 20000;
  std::filesystem::path out_dir = "out";
  bool timing = true;
  std::uint64_t seed = 1;
  bool fields = true;
  bool dump_level_set = false;
  bool probes = false;
  int threads = 0;
  bool quiet = false;
};

struct RunConfig {
  std::string name = "custom";
  Vec3 lo = Vec3::Constant(-1.0);
  Vec3 hi = Vec3::Constant(1.0);
  InterfaceSpec interface;
  std::string exact = "gamma-over-beta";  // gamma-over-beta | sphere-cosine | none
  std::string boundary = "exact";         // exact | zero | sin3pi
  std::string source = "exact";           // exact | zero
  std::optional<double> beta_plus;        // beta_minus lives in options.scheme.betas
  RunOptions options;
};

/// TOML-style config; unknown keys and bad values raise ConfigError.
RunConfig parse_config(std::istream& in);
RunConfig load_config(const std::filesystem::path& path);
void validate(const RunConfig& config);
Problem make_problem(const RunConfig& config);

/// Checks shared by configs and command-line overrides.
void validate_options(const RunOptions& options);

struct RunResult {
  std::vector<ErrorReport> reports;
  std::vector<InterfaceStats> stats;
  std::optional<ConvergenceRates> rates;
  bool reference_mode = false;
};

/// Solve for every N, write errors.csv, stats.csv, rates.csv, tau.obj,
/// solution.vtk and the optional dumps into options.out_dir.
RunResult run_problem(const Problem& problem, const RunOptions& options);

/// Classification only: stats.csv and tau.obj.
std::vector<InterfaceStats> run_stats(const Problem& problem, const RunOptions& options);

struct ExampleOverrides {
  std::optional<std::vector<int>> n;
  std::optional<int> epsilon;
  std::optional<double> sigma0;
  std::optional<double> beta_minus;
  std::optional<double> beta_plus;
  std::optional<double> tol;
  std::optional<int> max_iter;
  std::optional<std::string> quadrature;
  std::optional<std::filesystem::path> cloud;
  bool synthetic_sphere = false;
};

/// Numbered experiments 1 (plane), 2 (sphere), 3 (orthocircle), 4 (point cloud).
Problem example_problem(int id, const ExampleOverrides& overrides);
std::vector<int> example_default_n(int id);
/// Defaults for the example, then the overrides.
RunOptions example_options(int id, const ExampleOverrides& overrides, RunOptions base);

void set_threads(int threads);

}  // namespace ppife::runner
