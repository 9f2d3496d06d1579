#include <numbers>

#include <benchmark/benchmark.h>

#include "ppife/ppife.hpp"

namespace {

using namespace ppife;

const BoxDomain kBox(Vec3::Constant(-1.0), Vec3::Constant(1.0));

LevelSetField sphere() { return sphere_level_set(Vec3::Zero(), std::numbers::pi / 4.0); }

void BM_ClassifyMesh(benchmark::State& state) {
  const int n = int(state.range(0));
  const Mesh mesh = build_mesh(kBox, {n, n, n});
  const auto ls = sphere();
  for (auto _ : state) {
    auto cls = classify_mesh(ls, mesh, ViolationPolicy::Tolerate);
    benchmark::DoNotOptimize(cls.interface_cuts.data());
  }
  state.SetItemsProcessed(state.iterations() * mesh.num_elements());
}
BENCHMARK(BM_ClassifyMesh)->Arg(20)->Arg(40)->Unit(benchmark::kMillisecond);

void BM_IFEBasis(benchmark::State& state) {
  const Mesh mesh = build_mesh(kBox, {20, 20, 20});
  const auto cls = classify_mesh(sphere(), mesh, ViolationPolicy::Tolerate);
  const Betas betas{1.0, double(state.range(0))};
  for (auto _ : state) {
    for (const auto& cut : cls.interface_cuts) {
      if (cut.hypothesis_violated) continue;
      auto b = build_ife_basis(cut, betas);
      benchmark::DoNotOptimize(b.rcond);
    }
  }
  state.SetItemsProcessed(state.iterations() * Index(cls.interface_cuts.size()));
}
BENCHMARK(BM_IFEBasis)->Arg(10)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_Assemble(benchmark::State& state) {
  const int n = int(state.range(0));
  const Problem p = sphere_problem();
  const Mesh mesh = build_mesh(p.domain, {n, n, n});
  const auto ls = p.interface(mesh);
  const auto disc = build_discretization(mesh, ls, p.betas);
  SchemeParams params;
  params.betas = p.betas;
  for (auto _ : state) {
    auto sys = assemble(disc, ls, params, p.f, p.g);
    benchmark::DoNotOptimize(sys.rhs.data());
  }
}
BENCHMARK(BM_Assemble)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

void BM_Solve(benchmark::State& state) {
  const int n = int(state.range(0));
  const Problem p = sphere_problem();
  const Mesh mesh = build_mesh(p.domain, {n, n, n});
  const auto ls = p.interface(mesh);
  const auto disc = build_discretization(mesh, ls, p.betas);
  SchemeParams params;
  params.betas = p.betas;
  const auto reduced = apply_dirichlet(assemble(disc, ls, params, p.f, p.g));
  for (auto _ : state) {
    auto x = solve(reduced, params.epsilon);
    benchmark::DoNotOptimize(x.data());
  }
}
BENCHMARK(BM_Solve)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

void BM_SignedDistance(benchmark::State& state) {
  const auto cloud = fibonacci_sphere(std::size_t(state.range(0)), Vec3::Constant(0.5), 0.3);
  const Mesh mesh = build_mesh(BoxDomain(Vec3::Zero(), Vec3::Ones()), {32, 32, 32});
  for (auto _ : state) {
    auto nls = signed_distance(cloud, mesh);
    benchmark::DoNotOptimize(nls.values.data());
  }
}
BENCHMARK(BM_SignedDistance)->Arg(5000)->Arg(50000)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
