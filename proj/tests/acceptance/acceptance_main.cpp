// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <set>
#include <string>

#include <fmt/format.h>

#include "ppife/ppife.hpp"
#include "runner.hpp"

using namespace ppife;

namespace {

const std::filesystem::path kOut = PPIFE_TEST_TMP;

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void report(const std::string& name, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, fmt::format("exception: {}", e.what())};
  }
  const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (!o.pass) ++failures;
  fmt::print("{} {}: {} [{:.1f} s]\n", o.pass ? "PASS" : "FAIL", name, o.detail, s);
  std::fflush(stdout);
}

void note(const std::string& text) {
  fmt::print("     note: {}\n", text);
  std::fflush(stdout);
}

runner::RunResult run_example(int id, const runner::ExampleOverrides& ov, const std::string& dir) {
  runner::RunOptions base;
  base.out_dir = kOut / dir;
  base.quiet = true;
  base.fields = false;
  return runner::run_problem(runner::example_problem(id, ov),
                             runner::example_options(id, ov, base));
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::vector<ElementCut> clean_cuts(const LevelSetField& ls, const Mesh& m) {
  auto cls = classify_mesh(ls, m, ViolationPolicy::Tolerate);
  std::vector<ElementCut> out;
  for (auto& c : cls.interface_cuts) {
    if (!c.hypothesis_violated) out.push_back(std::move(c));
  }
  return out;
}

Mesh cube_mesh(double a, int n) { return build_mesh(BoxDomain(Vec3::Constant(-a), Vec3::Constant(a)), {n, n, n}); }

Outcome exact_recovery() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto r = run_example(1, {}, "ex1");
  double worst = 0.0;
  for (const auto& e : r.reports) worst = std::max({worst, e.e_inf, e.e_0, e.e_1});
  const double s = seconds_since(t0);
  return {worst <= 1e-10 && s < 60.0,
          fmt::format("N=10,20 max(e_inf,e_0,e_1) = {:.2e} (<= 1e-10), runtime {:.1f} s (< 60)",
                      worst, s)};
}

Outcome sphere_convergence() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto r = run_example(2, {}, "ex2");
  const auto& k = *r.rates;
  const double s = seconds_since(t0);
  const bool ok = k.e_0 >= 1.75 && k.e_0 <= 2.3 && k.e_1 >= 0.85 && k.e_1 <= 1.15 &&
                  k.e_inf >= 1.6 && k.e_inf <= 2.4 && s < 600.0;
  return {ok, fmt::format("N=10,20,40 slopes L2 {:.3f} [1.75,2.3], H1 {:.3f} [0.85,1.15], "
                          "Linf {:.3f} [1.6,2.4], runtime {:.0f} s",
                          k.e_0, k.e_1, k.e_inf, s)};
}

Outcome orthocircle_convergence() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto r = run_example(3, {}, "ex3");
  const double s = seconds_since(t0);
  const auto& k = *r.rates;
  const auto& fine = r.reports.back();
  return {k.e_0 >= 1.6 && k.e_1 >= 0.9 && s < 1200.0,
          fmt::format("N=20,40,60 sigma0=0.01 slopes L2 {:.3f} (>= 1.6), H1 {:.3f} (>= 0.9); "
                      "N=60 e_0 {:.3e} e_1 {:.3e}; runtime {:.0f} s",
                      k.e_0, k.e_1, fine.e_0, fine.e_1, s)};
}

void orthocircle_default_penalty() {
  runner::ExampleOverrides ov;
  ov.sigma0 = 10.0;
  const auto r = run_example(3, ov, "ex3_sigma10");
  note(fmt::format("orthocircle with sigma0=10 (sigma = 1e5): slopes L2 {:.3f}, H1 {:.3f}; "
                   "N=60 e_0 {:.3e}. The penalty pins the thin minus tubes to the plus trace.",
                   r.rates->e_0, r.rates->e_1, r.reports.back().e_0));
}

Outcome construction_invariants() {
  std::vector<ElementCut> cuts;
  for (auto&& c : clean_cuts(plane_level_set(Vec3(1, 0, 1), std::numbers::pi / 10), cube_mesh(1, 10)))
    cuts.push_back(std::move(c));
  for (auto&& c : clean_cuts(sphere_level_set(Vec3::Zero(), std::numbers::pi / 4), cube_mesh(1, 12)))
    cuts.push_back(std::move(c));
  for (auto&& c : clean_cuts(orthocircle_level_set(), cube_mesh(1.2, 20))) cuts.push_back(std::move(c));

  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double kron = 0, unity = 0, flux = 0, trace = 0;
  bool d_equal = true;
  for (double ratio : {1.0, 10.0, 100.0, 1000.0}) {
    const Betas betas{1.0, ratio};
    for (const auto& cut : cuts) {
      const IFEBasis b = build_ife_basis(cut, betas);
      const auto& lp = b.local_plane;
      for (int i = 0; i < 8; ++i) {
        for (int j = 0; j < 8; ++j) {
          const Vec3 xi(j & 1, (j >> 1) & 1, (j >> 2) & 1);
          kron = std::max(kron, std::abs(b.side(cut.vertex_sides[j])[i].eval(xi) - (i == j)));
        }
        const Vec3 gm = b.frame.grad_to_global(b.minus[i].grad(lp.centroid));
        const Vec3 gp = b.frame.grad_to_global(b.plus[i].grad(lp.centroid));
        const double fm = betas.minus * gm.dot(b.plane.normal);
        const double fp = betas.plus * gp.dot(b.plane.normal);
        // relative to beta_max |grad phi|, the size of the terms that round; the
        // normal flux itself can vanish
        const double scale = betas.max() * std::max(gm.norm(), gp.norm());
        flux = std::max(flux, std::abs(fm - fp) / scale);
        d_equal = d_equal && b.minus[i].d() == b.plus[i].d();
      }
      for (int t = 0; t < 4; ++t) {
        const Vec3 xi(u(rng), u(rng), u(rng));
        const Side s = lp.side_of(xi);
        double sum = 0.0;
        for (int i = 0; i < 8; ++i) sum += b.side(s)[i].eval(xi);
        unity = std::max(unity, std::abs(sum - 1.0));
        double a = u(rng), c = u(rng);
        if (a + c > 1) {
          a = 1 - a;
          c = 1 - c;
        }
        const auto& tri = cut.plane->triangle;
        const Vec3 p = b.frame.to_local(tri[0] + a * (tri[1] - tri[0]) + c * (tri[2] - tri[0]));
        for (int i = 0; i < 8; ++i) trace = std::max(trace, std::abs(b.minus[i].eval(p) - b.plus[i].eval(p)));
      }
    }
  }
  const bool ok = cuts.size() >= 500 && kron <= 1e-11 && unity <= 1e-12 && flux <= 1e-12 &&
                  d_equal && trace <= 1e-11;
  return {ok, fmt::format("{} elements x 4 ratios: Kronecker {:.1e} (1e-11), unity {:.1e} (1e-12), "
                          "flux {:.1e} rel (1e-12), d-vector {}, trace {:.1e} (1e-11)",
                          cuts.size(), kron, unity, flux, d_equal ? "exact" : "MISMATCH", trace)};
}

Outcome geometry_invariants() {
  double additivity = 0.0;
  double max_angle = 0.0;
  Index skipped = 0, checked = 0;
  auto scan = [&](const LevelSetField& ls, const Mesh& m) {
    const auto cls = classify_mesh(ls, m, ViolationPolicy::Tolerate);
    std::set<Index> bad;
    for (const auto& v : cls.violations) bad.insert(v.element);
    for (const auto& cut : cls.interface_cuts) {
      if (bad.count(cut.element) || cut.hypothesis_violated) {
        ++skipped;
        continue;
      }
      ++checked;
      max_angle = std::max(max_angle, cut.plane->max_angle_deg);
      const auto t = tessellate_cut(cut);
      const double box = m.element_volume();
      additivity = std::max(additivity, std::abs(t.volume(Side::Minus) + t.volume(Side::Plus) - box) / box);
    }
  };
  scan(sphere_level_set(Vec3::Zero(), std::numbers::pi / 4), cube_mesh(1, 20));
  scan(orthocircle_level_set(), cube_mesh(1.2, 20));
  scan(orthocircle_level_set(), cube_mesh(1.2, 40));

  const double r = std::numbers::pi / 4;
  const double kappa = 1.0 / r;
  const auto ls = sphere_level_set(Vec3::Zero(), r);
  double dist_ratio = 0.0, normal_ratio = 0.0;
  for (int n : {20, 40}) {
    const Mesh m = cube_mesh(1, n);
    const double h = m.h();
    const auto cls = classify_mesh(ls, m);
    for (const auto& cut : cls.interface_cuts) {
      const auto d = geometric_diagnostics(cut, ls);
      dist_ratio = std::max(dist_ratio, d.max_dist / (12.0927 * kappa * h * h));
      normal_ratio = std::max(normal_ratio, (1.0 - d.min_normal_dot) / (26.6121 * kappa * kappa * h * h));
    }
  }
  const bool ok = additivity <= 1e-12 && max_angle <= 135.0 && dist_ratio <= 1.0 && normal_ratio <= 1.0;
  return {ok, fmt::format("additivity {:.1e} rel (1e-12); max angle {:.2f} deg over {} elements "
                          "({} with unresolved configurations skipped); sphere N=20,40 dist/bound "
                          "{:.3f}, (1-n.nbar)/bound {:.3f}",
                          additivity, max_angle, checked, skipped, dist_ratio, normal_ratio)};
}

Outcome scheme_invariants() {
  const Problem p = sphere_problem();
  const Mesh m = build_mesh(p.domain, {10, 10, 10});
  const auto ls = p.interface(m);
  const auto disc = build_discretization(m, ls, p.betas);
  SchemeParams sp;
  sp.betas = p.betas;
  sp.sigma0 = 10.0;
  const auto sys = assemble(disc, ls, sp, p.f, p.g);
  const SparseMatrix at = sys.matrix.transpose();
  const double scale = sys.matrix.coeffs().cwiseAbs().maxCoeff();
  const SparseMatrix diff = sys.matrix - at;
  const double sym = diff.coeffs().cwiseAbs().maxCoeff() / scale;

  // no interface element: compare with a closed-form Q1 assembly
  const Mesh mf = build_mesh(p.domain, {8, 8, 8});
  const auto far = plane_level_set(Vec3::UnitX(), 5.0);
  const Betas eq{3.0, 3.0};
  const auto dfar = build_discretization(mf, far, eq);
  SchemeParams se;
  se.betas = eq;
  const auto s2 = assemble(dfar, far, se, [](const Vec3&, Side) { return 0.0; },
                           [](const Vec3&) { return 0.0; });
  Eigen::MatrixXd oracle = Eigen::MatrixXd::Zero(mf.num_nodes(), mf.num_nodes());
  const double h = mf.spacing().x();
  for (Index e = 0; e < mf.num_elements(); ++e) {
    const auto nodes = mf.element_nodes(e);
    for (int i = 0; i < 8; ++i)
      for (int j = 0; j < 8; ++j) {
        const int d = __builtin_popcount(unsigned(i ^ j));
        oracle(nodes[i], nodes[j]) += 3.0 * h * (d == 0 ? 1.0 / 3.0 : d == 1 ? 0.0 : -1.0 / 12.0);
      }
  }
  const double fem = (Eigen::MatrixXd(s2.matrix) - oracle).cwiseAbs().maxCoeff() / oracle.cwiseAbs().maxCoeff();

  const auto red = apply_dirichlet(sys);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  int positive = 0;
  double min_q = 1e300;
  for (int t = 0; t < 100; ++t) {
    Eigen::VectorXd v(red.matrix.rows());
    for (Index i = 0; i < v.size(); ++i) v[i] = u(rng);
    const double q = v.dot(red.matrix * v);
    min_q = std::min(min_q, q);
    positive += q > 0.0;
  }
  const bool ok = sym <= 1e-12 && fem <= 1e-12 && positive == 100;
  return {ok, fmt::format("symmetry {:.1e} rel (1e-12); standard FEM match {:.1e} rel (1e-12); "
                          "a_h(v,v) > 0 for {}/100 (min {:.3e})",
                          sym, fem, positive, min_q)};
}

Outcome inequality_probes() {
  const Problem p = sphere_problem();
  std::string detail;
  bool ok = true;
  std::map<ProbeKind, std::vector<double>> ratios;
  for (int n : {10, 20, 40}) {
    const Mesh m = build_mesh(p.domain, {n, n, n});
    const auto ls = p.interface(m);
    const auto disc = build_discretization(m, ls, p.betas);
    const auto& cuts = disc.classification().interface_cuts;
    std::vector<Index> els;
    const std::size_t stride = std::max<std::size_t>(1, cuts.size() / 200);
    for (std::size_t k = 0; k < cuts.size(); k += stride) els.push_back(cuts[k].element);
    for (ProbeKind k : {ProbeKind::Trace, ProbeKind::Inverse, ProbeKind::InterfaceJump}) {
      ratios[k].push_back(inequality_probe(disc, ls, els, k, 100, 1));
    }
  }
  for (const auto& [k, v] : ratios) {
    const double spread = *std::max_element(v.begin(), v.end()) / *std::min_element(v.begin(), v.end());
    ok = ok && spread <= 2.0;
    detail += fmt::format("{}{} {:.3g}/{:.3g}/{:.3g} (max/min {:.2f})", detail.empty() ? "" : "; ",
                          to_string(k), v[0], v[1], v[2], spread);
  }
  return {ok, "N=10,20,40 " + detail + " (<= 2)"};
}

Outcome point_cloud() {
  const Problem p = sphere_cloud_problem(5000);
  const PointCloud cloud = fibonacci_sphere(5000, Vec3::Constant(0.5), 0.3);
  double worst_ratio = 0.0;
  for (int n : {16, 32, 64}) {
    const Mesh m = build_mesh(p.domain, {n, n, n});
    const auto nls = signed_distance(cloud, m);
    const auto cls = classify_mesh(nls.field(), m, ViolationPolicy::Tolerate);
    double worst = 0.0;
    for (const auto& cut : cls.interface_cuts)
      for (const auto& x : cut.intersections)
        worst = std::max(worst, std::abs((x.point - Vec3::Constant(0.5)).norm() - 0.3));
    worst_ratio = std::max(worst_ratio, worst / std::max(nls.delta, m.h()));
  }
  runner::RunOptions opt;
  opt.n = {16, 32, 64};
  opt.out_dir = kOut / "cloud";
  opt.quiet = true;
  opt.fields = false;
  const auto r = runner::run_problem(p, opt);
  const bool ok = worst_ratio <= 1.0 && r.rates->e_0 >= 1.5;
  return {ok, fmt::format("zero set deviation / max(delta,h) = {:.3f} (<= 1); N=16,32,64 L2 slope "
                          "{:.3f} (>= 1.5), H1 slope {:.3f}",
                          worst_ratio, r.rates->e_0, r.rates->e_1)};
}

Outcome interface_fraction() {
  const auto ls = sphere_level_set(Vec3::Zero(), std::numbers::pi / 4);
  const std::vector<int> ns{20, 40, 80};
  std::vector<double> f;
  for (int n : ns) {
    const Mesh m = cube_mesh(1, n);
    f.push_back(interface_stats(m, classify_mesh(ls, m)).fraction());
  }
  // least-squares c in f = c / N
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < ns.size(); ++i) {
    num += f[i] / ns[i];
    den += 1.0 / (double(ns[i]) * ns[i]);
  }
  const double c = num / den;
  double dev = 0.0;
  for (std::size_t i = 0; i < ns.size(); ++i) dev = std::max(dev, std::abs(f[i] - c / ns[i]) / (c / ns[i]));
  const bool ok = dev <= 0.15 && f.back() < 0.03;
  return {ok, fmt::format("fractions {:.2f}%/{:.2f}%/{:.2f}%; c/N fit c = {:.3f}, max deviation "
                          "{:.1f}% (<= 15%); N=80 {:.2f}% (< 3%)",
                          100 * f[0], 100 * f[1], 100 * f[2], c, 100 * dev, 100 * f[2])};
}

}  // namespace

int main() {
  std::filesystem::create_directories(kOut);
  report("exact recovery (plane)", exact_recovery);
  report("sphere convergence", sphere_convergence);
  report("orthocircle convergence", orthocircle_convergence);
  orthocircle_default_penalty();
  report("construction invariants", construction_invariants);
  report("geometry invariants", geometry_invariants);
  report("scheme invariants", scheme_invariants);
  report("inequality probes", inequality_probes);
  report("point-cloud pipeline", point_cloud);
  report("interface-element fraction", interface_fraction);
  fmt::print("{} of 9 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
