#include <cstdlib>
#include <iostream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "runner.hpp"

using namespace ppife;
using namespace ppife::runner;

namespace {

struct Flags {
  std::vector<int> n;
  int eps = -1;
  double sigma0 = 0.0;
  double beta_minus = 0.0;
  double beta_plus = 0.0;
  double tol = 0.0;
  int max_iter = 0;
  std::string out;
  std::string cloud;
  std::uint64_t seed = 1;
  std::string quadrature;
  int threads = 0;
  bool synthetic_sphere = false;
  bool no_timing = false;
  bool probes = false;
  bool dump_level_set = false;
  bool no_fields = false;
};

struct Opts {
  CLI::Option* n = nullptr;
  CLI::Option* eps = nullptr;
  CLI::Option* sigma0 = nullptr;
  CLI::Option* beta_minus = nullptr;
  CLI::Option* beta_plus = nullptr;
  CLI::Option* tol = nullptr;
  CLI::Option* max_iter = nullptr;
  CLI::Option* out = nullptr;
  CLI::Option* cloud = nullptr;
  CLI::Option* seed = nullptr;
  CLI::Option* quadrature = nullptr;
  CLI::Option* threads = nullptr;
};

Opts add_common(CLI::App* app, Flags& f) {
  Opts o;
  o.n = app->add_option("--n", f.n, "Mesh sizes N (N^3 elements), e.g. --n 10,20,40")->delimiter(',');
  o.eps = app->add_option("--eps", f.eps, "Symmetrization parameter: -1, 0 or 1");
  o.sigma0 = app->add_option("--sigma0", f.sigma0, "Penalty constant");
  o.beta_minus = app->add_option("--beta-minus", f.beta_minus, "Coefficient inside");
  o.beta_plus = app->add_option("--beta-plus", f.beta_plus, "Coefficient outside");
  o.tol = app->add_option("--tol", f.tol, "Relative residual tolerance of the iterative solver");
  o.max_iter = app->add_option("--max-iter", f.max_iter, "Iteration cap of the solver");
  o.out = app->add_option("--out", f.out, "Output directory");
  o.cloud = app->add_option("--cloud", f.cloud, "Point cloud file (.xyz) for example 4");
  o.seed = app->add_option("--seed", f.seed, "Seed of the random inequality probes");
  o.quadrature = app->add_option("--quadrature", f.quadrature, "plane-cut or levelset-sign");
  o.threads = app->add_option("--threads", f.threads, "Worker threads (0: OpenMP default)");
  app->add_flag("--synthetic-sphere", f.synthetic_sphere,
                "Example 4 with a sampled sphere instead of a cloud file");
  app->add_flag("--no-timing", f.no_timing, "Write zero timings so reruns are byte-identical");
  app->add_flag("--probes", f.probes, "Also write probes.csv (inequality constants)");
  app->add_flag("--dump-level-set", f.dump_level_set, "Also write level_set.csv");
  app->add_flag("--no-fields", f.no_fields, "Skip solution.vtk");
  return o;
}

ExampleOverrides overrides(const Flags& f, const Opts& o) {
  ExampleOverrides ov;
  if (*o.n) ov.n = f.n;
  if (*o.eps) ov.epsilon = f.eps;
  if (*o.sigma0) ov.sigma0 = f.sigma0;
  if (*o.beta_minus) ov.beta_minus = f.beta_minus;
  if (*o.beta_plus) ov.beta_plus = f.beta_plus;
  if (*o.tol) ov.tol = f.tol;
  if (*o.max_iter) ov.max_iter = f.max_iter;
  if (*o.quadrature) ov.quadrature = f.quadrature;
  if (*o.cloud) ov.cloud = f.cloud;
  ov.synthetic_sphere = f.synthetic_sphere;
  return ov;
}

void apply_output(const Flags& f, const Opts& o, RunOptions& r) {
  if (*o.out) r.out_dir = f.out;
  if (*o.seed) r.seed = f.seed;
  if (*o.threads) r.threads = f.threads;
  if (f.no_timing) r.timing = false;
  if (f.probes) r.probes = true;
  if (f.dump_level_set) r.dump_level_set = true;
  if (f.no_fields) r.fields = false;
}

RunConfig config_with_flags(const std::string& path, const Flags& f, const Opts& o) {
  RunConfig c = load_config(path);
  if (*o.n) c.options.n = f.n;
  if (*o.eps) c.options.scheme.epsilon = f.eps;
  if (*o.sigma0) c.options.scheme.sigma0 = f.sigma0;
  if (*o.beta_minus) c.options.scheme.betas.minus = f.beta_minus;
  if (*o.beta_plus) {
    c.beta_plus = f.beta_plus;
    c.options.scheme.betas.plus = f.beta_plus;
  }
  if (*o.tol) c.options.tol = f.tol;
  if (*o.max_iter) c.options.max_iter = f.max_iter;
  if (*o.quadrature) c.options.scheme.quadrature = parse_quadrature_mode(f.quadrature);
  if (*o.cloud) c.interface.cloud = f.cloud;
  apply_output(f, o, c.options);
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Partially penalized immersed finite elements for 3D elliptic interface problems"};
  app.require_subcommand(1);

  Flags ef, rf, sf;
  int example_id = 0;
  std::string config_path, stats_config;
  int stats_example = 0;

  auto* ex = app.add_subcommand("example", "Run a numbered experiment (1 plane, 2 sphere, 3 orthocircle, 4 point cloud)");
  ex->add_option("id", example_id, "Example number")->required()->check(CLI::Range(1, 4));
  const Opts eo = add_common(ex, ef);

  auto* run = app.add_subcommand("run", "Run a problem described by a config file");
  run->add_option("config", config_path, "Config file")->required()->check(CLI::ExistingFile);
  const Opts ro = add_common(run, rf);

  auto* st = app.add_subcommand("stats", "Interface-element statistics only (no solve)");
  auto* st_ex = st->add_option("--example", stats_example, "Example number")->check(CLI::Range(1, 4));
  auto* st_cfg = st->add_option("--config", stats_config, "Config file")->check(CLI::ExistingFile);
  st_ex->excludes(st_cfg);
  const Opts so = add_common(st, sf);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*ex) {
      RunOptions base;
      apply_output(ef, eo, base);
      if (!*eo.out) base.out_dir = fmt::format("out/example{}", example_id);
      const ExampleOverrides ov = overrides(ef, eo);
      const Problem p = example_problem(example_id, ov);
      run_problem(p, example_options(example_id, ov, base));
    } else if (*run) {
      const RunConfig c = config_with_flags(config_path, rf, ro);
      validate(c);
      run_problem(make_problem(c), c.options);
    } else if (*st) {
      if (!*st_ex && !*st_cfg) throw std::invalid_argument("stats needs --example <id> or --config <file>");
      if (*st_ex) {
        RunOptions base;
        apply_output(sf, so, base);
        if (!*so.out) base.out_dir = fmt::format("out/stats{}", stats_example);
        const ExampleOverrides ov = overrides(sf, so);
        run_stats(example_problem(stats_example, ov), example_options(stats_example, ov, base));
      } else {
        const RunConfig c = config_with_flags(stats_config, sf, so);
        validate(c);
        run_stats(make_problem(c), c.options);
      }
    }
  } catch (const ConfigError& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return 1;
  }
  return 0;
}
