#include "runner.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <memory>
#include <numbers>
#include <set>

#include <CLI11.hpp>
#include <fmt/format.h>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace ppife::runner {

ConfigError::ConfigError(std::string key, const std::string& message)
    : std::runtime_error(fmt::format("{}: {}", key, message)), key_(std::move(key)) {}

namespace {

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys = {
      "name",
      "domain.lo",
      "domain.hi",
      "mesh.n",
      "interface.type",
      "interface.center",
      "interface.radius",
      "interface.normal",
      "interface.offset",
      "interface.cloud",
      "coefficients.beta_minus",
      "coefficients.beta_plus",
      "scheme.epsilon",
      "scheme.sigma0",
      "scheme.quadrature",
      "solution.exact",
      "solution.boundary",
      "solution.source",
      "solver.tol",
      "solver.max_iter",
      "output.dir",
      "output.timing",
      "output.seed",
      "output.fields",
      "output.dump_level_set",
      "output.probes",
      "run.threads",
  };
  return keys;
}

const std::string& single(const std::string& key, const std::vector<std::string>& in) {
  if (in.size() != 1) throw ConfigError(key, fmt::format("expected one value, got {}", in.size()));
  return in.front();
}

double to_double(const std::string& key, const std::string& s) {
  double v = 0.0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size() || !std::isfinite(v)) {
    throw ConfigError(key, fmt::format("'{}' is not a finite number", s));
  }
  return v;
}

long long to_integer(const std::string& key, const std::string& s) {
  long long v = 0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) {
    throw ConfigError(key, fmt::format("'{}' is not an integer", s));
  }
  return v;
}

bool to_bool(const std::string& key, const std::string& s) {
  if (s == "true") return true;
  if (s == "false") return false;
  throw ConfigError(key, fmt::format("'{}' is not true or false", s));
}

Vec3 to_vec3(const std::string& key, const std::vector<std::string>& in) {
  if (in.size() != 3) throw ConfigError(key, fmt::format("expected 3 numbers, got {}", in.size()));
  return Vec3(to_double(key, in[0]), to_double(key, in[1]), to_double(key, in[2]));
}

void require_one_of(const std::string& key, const std::string& value,
                    std::initializer_list<const char*> allowed) {
  for (const char* a : allowed) {
    if (value == a) return;
  }
  std::string list;
  for (const char* a : allowed) list += (list.empty() ? "" : ", ") + std::string(a);
  throw ConfigError(key, fmt::format("'{}' is not one of {}", value, list));
}

struct Gamma {
  ScalarFn value;
  VectorFn grad;
  ScalarFn laplacian;
};

std::optional<Gamma> analytic_gamma(const InterfaceSpec& s) {
  if (s.type == "plane") {
    const Vec3 n = s.normal.normalized();
    const double c = s.offset / s.normal.norm();
    return Gamma{[n, c](const Vec3& x) { return n.dot(x) - c; }, [n](const Vec3&) { return n; },
                 [](const Vec3&) { return 0.0; }};
  }
  if (s.type == "sphere") {
    const Vec3 c = s.center;
    const double r2 = s.radius * s.radius;
    return Gamma{[c, r2](const Vec3& x) { return (x - c).squaredNorm() - r2; },
                 [c](const Vec3& x) { return Vec3(2.0 * (x - c)); },
                 [](const Vec3&) { return 6.0; }};
  }
  if (s.type == "orthocircle") {
    return Gamma{orthocircle_value, orthocircle_gradient, orthocircle_laplacian};
  }
  return std::nullopt;
}

LevelSetField analytic_level_set(const InterfaceSpec& s) {
  if (s.type == "plane") return plane_level_set(s.normal, s.offset);
  if (s.type == "sphere") return sphere_level_set(s.center, s.radius);
  return orthocircle_level_set();
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

struct Level {
  int n = 0;
  std::unique_ptr<Discretization> disc;
  std::unique_ptr<LevelSetField> ls;
  Eigen::VectorXd u;
  double assembly_s = 0.0;
  double solve_s = 0.0;
  InterfaceStats stats;
};

Level solve_level(const Problem& problem, const RunOptions& opt, int n) {
  Level lv;
  lv.n = n;
  const Mesh mesh = build_mesh(problem.domain, {n, n, n});
  lv.ls = std::make_unique<LevelSetField>(problem.interface(mesh));

  SchemeParams params = opt.scheme;
  params.betas = problem.betas;
  const auto t0 = std::chrono::steady_clock::now();
  lv.disc = std::make_unique<Discretization>(
      build_discretization(mesh, *lv.ls, problem.betas, ViolationPolicy::Tolerate));
  const LinearSystem system = assemble(*lv.disc, *lv.ls, params, problem.f, problem.g);
  const ReducedSystem reduced = apply_dirichlet(system);
  lv.assembly_s = seconds_since(t0);

  const auto t1 = std::chrono::steady_clock::now();
  SolveStats ss;
  const Eigen::VectorXd x = solve(reduced, params.epsilon, opt.tol, opt.max_iter, &ss);
  lv.u = expand_solution(reduced, x);
  lv.solve_s = seconds_since(t1);
  lv.stats = interface_stats(mesh, lv.disc->classification());
  if (!opt.quiet) {
    fmt::print("N={:<4} interface elements {} ({:.2f}%), {} iterations, residual {:.2e}", n,
               lv.stats.interface_elements, 100.0 * lv.stats.fraction(), ss.iterations,
               ss.relative_residual);
    if (lv.stats.violations) fmt::print(", {} hypothesis violations tolerated", lv.stats.violations);
    fmt::print("\n");
  }
  return lv;
}

std::vector<Index> probe_elements(const Discretization& disc) {
  std::vector<Index> all;
  for (const auto& cut : disc.classification().interface_cuts) all.push_back(cut.element);
  constexpr std::size_t cap = 200;
  if (all.size() <= cap) return all;
  std::vector<Index> out;
  for (std::size_t i = 0; i < cap; ++i) out.push_back(all[i * all.size() / cap]);
  return out;
}

void write_exports(const Problem& problem, const RunOptions& opt, const Level& lv) {
  const Mesh& mesh = lv.disc->mesh();
  write_obj(opt.out_dir / "tau.obj", tau_triangles(lv.disc->classification()));

  Eigen::VectorXd phi(mesh.num_nodes());
  for (Index i = 0; i < mesh.num_nodes(); ++i) phi[i] = (*lv.ls)(mesh.node_point(i));
  if (opt.fields) {
    std::vector<std::pair<std::string, Eigen::VectorXd>> fields{{"u_h", lv.u}, {"level_set", phi}};
    if (problem.exact) {
      Eigen::VectorXd err(mesh.num_nodes());
      const auto& sides = lv.disc->classification().node_sides;
      for (Index i = 0; i < mesh.num_nodes(); ++i) {
        err[i] = std::abs(lv.u[i] - problem.exact->u(mesh.node_point(i), sides[i]));
      }
      fields.emplace_back("error", err);
    }
    write_vtk(opt.out_dir / "solution.vtk", mesh, fields);
  }
  if (opt.dump_level_set) {
    write_nodal_csv(opt.out_dir / "level_set.csv", mesh,
                    std::vector<double>(phi.data(), phi.data() + phi.size()));
  }
}

std::string format_rates(const ConvergenceRates& r) {
  std::string s = "norm,slope\n";
  s += fmt::format("e_inf,{:.6f}\ne_0,{:.6f}\ne_1,{:.6f}\n", r.e_inf, r.e_0, r.e_1);
  if (r.e_energy) s += fmt::format("e_energy,{:.6f}\n", *r.e_energy);
  return s;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error(fmt::format("cannot write '{}'", path.string()));
  out << text;
}

}  // namespace

RunConfig parse_config(std::istream& in) {
  CLI::ConfigTOML reader;
  std::vector<CLI::ConfigItem> items;
  try {
    items = reader.from_config(in);
  } catch (const CLI::Error& e) {
    throw ConfigError("<file>", e.what());
  }

  RunConfig c;
  RunOptions& o = c.options;
  bool have_n = false;
  std::set<std::string> seen;
  for (const auto& item : items) {
    if (item.name == "++" || item.name == "--") continue;
    const std::string key = item.fullname();
    if (!known_keys().contains(key)) throw ConfigError(key, "unknown key");
    if (!seen.insert(key).second) throw ConfigError(key, "given twice");
    const auto& v = item.inputs;

    if (key == "name") c.name = single(key, v);
    else if (key == "domain.lo") c.lo = to_vec3(key, v);
    else if (key == "domain.hi") c.hi = to_vec3(key, v);
    else if (key == "mesh.n") {
      o.n.clear();
      for (const auto& s : v) o.n.push_back(int(to_integer(key, s)));
      have_n = true;
    }
    else if (key == "interface.type") c.interface.type = single(key, v);
    else if (key == "interface.center") c.interface.center = to_vec3(key, v);
    else if (key == "interface.radius") c.interface.radius = to_double(key, single(key, v));
    else if (key == "interface.normal") c.interface.normal = to_vec3(key, v);
    else if (key == "interface.offset") c.interface.offset = to_double(key, single(key, v));
    else if (key == "interface.cloud") c.interface.cloud = single(key, v);
    else if (key == "coefficients.beta_minus") o.scheme.betas.minus = to_double(key, single(key, v));
    else if (key == "coefficients.beta_plus") c.beta_plus = to_double(key, single(key, v));
    else if (key == "scheme.epsilon") o.scheme.epsilon = int(to_integer(key, single(key, v)));
    else if (key == "scheme.sigma0") o.scheme.sigma0 = to_double(key, single(key, v));
    else if (key == "scheme.quadrature") {
      try {
        o.scheme.quadrature = parse_quadrature_mode(single(key, v));
      } catch (const std::invalid_argument& e) {
        throw ConfigError(key, e.what());
      }
    }
    else if (key == "solution.exact") c.exact = single(key, v);
    else if (key == "solution.boundary") c.boundary = single(key, v);
    else if (key == "solution.source") c.source = single(key, v);
    else if (key == "solver.tol") o.tol = to_double(key, single(key, v));
    else if (key == "solver.max_iter") o.max_iter = int(to_integer(key, single(key, v)));
    else if (key == "output.dir") o.out_dir = single(key, v);
    else if (key == "output.timing") o.timing = to_bool(key, single(key, v));
    else if (key == "output.seed") {
      const long long s = to_integer(key, single(key, v));
      if (s < 0) throw ConfigError(key, "must be non-negative");
      o.seed = std::uint64_t(s);
    }
    else if (key == "output.fields") o.fields = to_bool(key, single(key, v));
    else if (key == "output.dump_level_set") o.dump_level_set = to_bool(key, single(key, v));
    else if (key == "output.probes") o.probes = to_bool(key, single(key, v));
    else if (key == "run.threads") o.threads = int(to_integer(key, single(key, v)));
  }
  if (!have_n) throw ConfigError("mesh.n", "required");
  c.options.scheme.betas.plus = c.beta_plus.value_or(c.options.scheme.betas.minus);
  validate(c);
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(fmt::format("cannot open config '{}'", path.string()));
  RunConfig c = parse_config(in);
  if (!c.interface.cloud.empty() && c.interface.cloud.is_relative()) {
    c.interface.cloud = path.parent_path() / c.interface.cloud;
  }
  return c;
}

void validate_options(const RunOptions& o) {
  if (o.n.empty()) throw ConfigError("mesh.n", "at least one mesh size is required");
  for (std::size_t i = 0; i < o.n.size(); ++i) {
    if (o.n[i] < 1) throw ConfigError("mesh.n", fmt::format("N = {} must be >= 1", o.n[i]));
    if (i > 0 && o.n[i] <= o.n[i - 1]) throw ConfigError("mesh.n", "must be strictly increasing");
  }
  const auto& s = o.scheme;
  if (s.epsilon != -1 && s.epsilon != 0 && s.epsilon != 1) {
    throw ConfigError("scheme.epsilon", fmt::format("must be -1, 0 or 1, got {}", s.epsilon));
  }
  if (!(s.sigma0 > 0.0)) throw ConfigError("scheme.sigma0", "must be positive");
  if (!(s.betas.minus > 0.0)) throw ConfigError("coefficients.beta_minus", "must be positive");
  if (!(s.betas.plus > 0.0)) throw ConfigError("coefficients.beta_plus", "must be positive");
  if (!(o.tol > 0.0 && o.tol < 1.0)) throw ConfigError("solver.tol", "must lie in (0, 1)");
  if (o.max_iter < 1) throw ConfigError("solver.max_iter", "must be >= 1");
  if (o.threads < 0) throw ConfigError("run.threads", "must be >= 0");
}

void validate(const RunConfig& c) {
  validate_options(c.options);
  for (int a = 0; a < 3; ++a) {
    if (!(c.lo[a] < c.hi[a])) throw ConfigError("domain.hi", "must exceed domain.lo in every axis");
  }
  const auto& s = c.interface;
  require_one_of("interface.type", s.type, {"plane", "sphere", "orthocircle", "cloud"});
  if (s.type == "sphere" && !(s.radius > 0.0)) throw ConfigError("interface.radius", "must be positive");
  if (s.type == "plane" && !(s.normal.norm() > 0.0)) throw ConfigError("interface.normal", "must be nonzero");
  if (s.type == "cloud" && s.cloud.empty()) throw ConfigError("interface.cloud", "required for type 'cloud'");
  require_one_of("solution.exact", c.exact, {"gamma-over-beta", "sphere-cosine", "none"});
  require_one_of("solution.boundary", c.boundary, {"exact", "zero", "sin3pi"});
  require_one_of("solution.source", c.source, {"exact", "zero"});
  if (c.exact == "gamma-over-beta" && s.type == "cloud") {
    throw ConfigError("solution.exact", "gamma-over-beta needs an analytic interface");
  }
  if (c.exact == "sphere-cosine") {
    if (s.type != "sphere") throw ConfigError("solution.exact", "sphere-cosine needs interface.type = sphere");
    const double bp = c.options.scheme.betas.minus * sphere_beta_ratio(s.radius);
    if (c.beta_plus && std::abs(*c.beta_plus - bp) > 1e-12 * bp) {
      throw ConfigError("coefficients.beta_plus",
                        fmt::format("sphere-cosine fixes beta_plus = {:.15g}", bp));
    }
  }
  if (c.exact == "none") {
    if (c.boundary == "exact") throw ConfigError("solution.boundary", "'exact' needs an exact solution");
    if (c.source == "exact") throw ConfigError("solution.source", "'exact' needs an exact solution");
  }
}

Problem make_problem(const RunConfig& c) {
  validate(c);
  const BoxDomain domain(c.lo, c.hi);
  const auto& s = c.interface;
  Betas betas = c.options.scheme.betas;

  Problem p;
  if (c.exact == "sphere-cosine") {
    p = sphere_problem(betas.minus, s.radius, s.center);
  } else {
    p.betas = betas;
    if (s.type == "cloud") {
      PointCloud cloud = load_cloud(s.cloud);
      check_cloud_inside(cloud, domain);
      auto shared = std::make_shared<const PointCloud>(std::move(cloud));
      p.interface = [shared](const Mesh& m) { return signed_distance(*shared, m).field(); };
    } else {
      const LevelSetField ls = analytic_level_set(s);
      p.interface = [ls](const Mesh&) { return ls; };
    }
    if (c.exact == "gamma-over-beta") {
      const Gamma g = *analytic_gamma(s);
      const GammaOverBeta e = gamma_over_beta(g.value, g.grad, g.laplacian, betas);
      p.exact = e.exact;
      p.f = e.f;
      p.g = e.g;
    }
  }
  p.name = c.name;
  p.domain = domain;
  if (c.source == "zero") p.f = [](const Vec3&, Side) { return 0.0; };
  if (c.boundary == "zero") {
    p.g = [](const Vec3&) { return 0.0; };
  } else if (c.boundary == "sin3pi") {
    p.g = [](const Vec3& x) {
      const double k = 3.0 * std::numbers::pi;
      return std::sin(k * x.x()) * std::sin(k * x.y()) * std::sin(k * x.z());
    };
  }
  return p;
}

void set_threads(int threads) {
#ifdef _OPENMP
  if (threads > 0) omp_set_num_threads(threads);
#else
  (void)threads;
#endif
}

RunResult run_problem(const Problem& problem, const RunOptions& opt) {
  validate_options(opt);
  set_threads(opt.threads);
  std::filesystem::create_directories(opt.out_dir);

  RunResult result;
  result.reference_mode = !problem.exact.has_value();
  if (result.reference_mode && opt.n.size() < 2) {
    throw ConfigError("mesh.n", "reference mode (no exact solution) needs at least two mesh sizes");
  }
  if (!opt.quiet) {
    fmt::print("{}: beta- = {:g}, beta+ = {:g}, epsilon = {}, sigma0 = {:g}, quadrature = {}{}\n",
               problem.name, problem.betas.minus, problem.betas.plus, opt.scheme.epsilon,
               opt.scheme.sigma0, to_string(opt.scheme.quadrature),
               result.reference_mode ? ", reference mode" : "");
  }

  SchemeParams params = opt.scheme;
  params.betas = problem.betas;
  std::string probes = "N,h,kind,max_ratio\n";
  std::vector<Level> levels;
  for (int n : opt.n) {
    Level lv = solve_level(problem, opt, n);
    result.stats.push_back(lv.stats);
    if (opt.probes) {
      const auto elems = probe_elements(*lv.disc);
      for (ProbeKind k : {ProbeKind::Trace, ProbeKind::Inverse, ProbeKind::InterfaceJump}) {
        const double r = elems.empty() ? 0.0 : inequality_probe(*lv.disc, *lv.ls, elems, k, 100, opt.seed);
        probes += fmt::format("{},{:.17g},{},{:.17g}\n", n, lv.disc->mesh().h(), to_string(k), r);
      }
    }
    if (problem.exact) {
      ErrorReport r = norm_errors(DiscreteFunction(*lv.disc, lv.u), *problem.exact, *lv.ls, params);
      r.assembly_s = lv.assembly_s;
      r.solve_s = lv.solve_s;
      result.reports.push_back(r);
      if (!opt.quiet) {
        fmt::print("        h={:.5f} e_inf={:.4e} e_0={:.4e} e_1={:.4e}\n", r.h, r.e_inf, r.e_0, r.e_1);
      }
      levels.clear();
    }
    levels.push_back(std::move(lv));
  }

  if (result.reference_mode) {
    const Level& fine = levels.back();
    const DiscreteFunction fine_fn(*fine.disc, fine.u);
    const ExactSolution ref = reference_solution(fine_fn);
    for (std::size_t i = 0; i + 1 < levels.size(); ++i) {
      const Level& lv = levels[i];
      ErrorReport r = norm_errors(DiscreteFunction(*lv.disc, lv.u), ref, *lv.ls, params);
      r.assembly_s = lv.assembly_s;
      r.solve_s = lv.solve_s;
      result.reports.push_back(r);
      if (!opt.quiet) {
        fmt::print("N={:<4} vs N={}: e_inf={:.4e} e_0={:.4e} e_1={:.4e}\n", lv.n, fine.n, r.e_inf,
                   r.e_0, r.e_1);
      }
    }
  }

  write_errors_csv(opt.out_dir / "errors.csv", result.reports, opt.timing);
  write_stats_csv(opt.out_dir / "stats.csv", result.stats);
  if (opt.probes) write_file(opt.out_dir / "probes.csv", probes);
  write_exports(problem, opt, levels.back());

  if (result.reports.size() >= 2) {
    result.rates = convergence_rates(result.reports);
    write_file(opt.out_dir / "rates.csv", format_rates(*result.rates));
    if (!opt.quiet) {
      fmt::print("slopes: L_inf {:.3f}, L2 {:.3f}, H1 {:.3f}", result.rates->e_inf,
                 result.rates->e_0, result.rates->e_1);
      if (result.rates->e_energy) fmt::print(", energy {:.3f}", *result.rates->e_energy);
      fmt::print("\n");
    }
  }
  if (!opt.quiet) fmt::print("wrote {}\n", opt.out_dir.string());
  return result;
}

std::vector<InterfaceStats> run_stats(const Problem& problem, const RunOptions& opt) {
  validate_options(opt);
  set_threads(opt.threads);
  std::filesystem::create_directories(opt.out_dir);
  std::vector<InterfaceStats> out;
  std::vector<Triangle> finest;
  for (int n : opt.n) {
    const Mesh mesh = build_mesh(problem.domain, {n, n, n});
    const LevelSetField ls = problem.interface(mesh);
    const MeshClassification cls = classify_mesh(ls, mesh, ViolationPolicy::Tolerate);
    out.push_back(interface_stats(mesh, cls));
    finest = tau_triangles(cls);
    if (!opt.quiet) {
      const auto& s = out.back();
      fmt::print("N={:<4} {} of {} elements cut ({:.3f}%), types I-V: {} {} {} {} {}, violations {}\n",
                 n, s.interface_elements, s.elements, 100.0 * s.fraction(), s.per_type[0],
                 s.per_type[1], s.per_type[2], s.per_type[3], s.per_type[4], s.violations);
    }
  }
  write_stats_csv(opt.out_dir / "stats.csv", out);
  write_obj(opt.out_dir / "tau.obj", finest);
  return out;
}

std::vector<int> example_default_n(int id) {
  switch (id) {
    case 1: return {10, 20};
    case 2: return {10, 20, 40};
    case 3: return {20, 40, 60};
    case 4: return {16, 32, 64};
    default: throw std::invalid_argument(fmt::format("unknown example {} (expected 1-4)", id));
  }
}

Problem example_problem(int id, const ExampleOverrides& ov) {
  example_default_n(id);
  auto betas = [&ov](Betas b) {
    if (ov.beta_minus) b.minus = *ov.beta_minus;
    if (ov.beta_plus) b.plus = *ov.beta_plus;
    if (!(b.minus > 0.0 && b.plus > 0.0)) throw std::invalid_argument("betas must be positive");
    return b;
  };
  if (id != 4 && (ov.cloud || ov.synthetic_sphere)) {
    throw std::invalid_argument("--cloud and --synthetic-sphere apply to example 4 only");
  }
  switch (id) {
    case 1: return plane_problem(betas({1.0, 10.0}));
    case 2:
      if (ov.beta_plus) {
        throw std::invalid_argument(
            "example 2 derives beta+ from beta- and the radius; drop --beta-plus");
      }
      return sphere_problem(ov.beta_minus.value_or(1.0));
    case 3: return orthocircle_problem(betas({1.0, 100.0}));
    default: break;
  }
  if (ov.cloud && ov.synthetic_sphere) {
    throw std::invalid_argument("give either --cloud or --synthetic-sphere, not both");
  }
  if (!ov.cloud && !ov.synthetic_sphere) {
    throw std::invalid_argument(
        "example 4 needs interface points: pass --cloud <file.xyz> or --synthetic-sphere");
  }
  PointCloud cloud = ov.cloud ? load_cloud(*ov.cloud) : reference_sphere_cloud();
  return cloud_reference_problem(std::move(cloud), betas({1.0, 10.0}));
}

RunOptions example_options(int id, const ExampleOverrides& ov, RunOptions o) {
  o.n = ov.n.value_or(example_default_n(id));
  // The plane solution lies in the discrete space; only the solver limits the error.
  if (id == 1) o.tol = 1e-13;
  // At beta+/beta- = 100 the default sigma0 gives sigma = 1e5 and the penalty
  // pins the thin minus tubes to the plus trace; sigma0 = 0.01 means sigma = 100.
  if (id == 3) o.scheme.sigma0 = 0.01;
  if (ov.epsilon) o.scheme.epsilon = *ov.epsilon;
  if (ov.sigma0) o.scheme.sigma0 = *ov.sigma0;
  if (ov.tol) o.tol = *ov.tol;
  if (ov.max_iter) o.max_iter = *ov.max_iter;
  if (ov.quadrature) o.scheme.quadrature = parse_quadrature_mode(*ov.quadrature);
  return o;
}

}  // namespace ppife::runner
