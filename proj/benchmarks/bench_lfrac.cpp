#include <benchmark/benchmark.h>

#include "lfrac/attractor.hpp"
#include "lfrac/rb_operator.hpp"
#include "lfrac/seminorms.hpp"

namespace {

using namespace lfrac;

// Halving system with affine displacements; the workhorse 1-D example.
LocalFractalSystem affine_halving(double s) {
  const Box x = Box::interval(0.0, 1.0);
  const Partition part(x, {{x, Similitude(0.5, 1.0, 0.0)},
                           {x, Similitude(0.5, 1.0, 0.5)}});
  return LocalFractalSystem(
      part,
      {FunctionSpec::polynomial(x, std::vector<double>{0.0, 1.0}),
       FunctionSpec::polynomial(x, std::vector<double>{1.0, -1.0})},
      {FunctionSpec::constant(x, s), FunctionSpec::constant(x, s)});
}

SampledFunction solved_fixed_point(int level) {
  return solve_fixed_point(affine_halving(0.5),
                           {.level = level, .tol = 1e-12, .max_iter = 200})
      .f;
}

void BM_RbApply(benchmark::State& state) {
  const LocalFractalSystem sys = affine_halving(0.5);
  SampledFunction f(Box::interval(0.0, 1.0), static_cast<int>(state.range(0)));
  for (std::size_t i = 0; i < f.points_per_axis(); ++i)
    f.at(i) = static_cast<double>(i % 17) / 17.0;
  for (auto _ : state) benchmark::DoNotOptimize(rb_apply(sys, f));
  state.SetItemsProcessed(static_cast<int64_t>(state.iterations()) *
                          static_cast<int64_t>(f.value_count()));
}
BENCHMARK(BM_RbApply)->Arg(8)->Arg(10)->Arg(12)->Arg(14);

void BM_SolveFixedPoint(benchmark::State& state) {
  const LocalFractalSystem sys = affine_halving(0.5);
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve_fixed_point(
        sys,
        {.level = static_cast<int>(state.range(0)), .tol = 1e-12,
         .max_iter = 200}));
  }
}
BENCHMARK(BM_SolveFixedPoint)->Arg(8)->Arg(10)->Arg(12);

void BM_BesovEstimate(benchmark::State& state) {
  const SampledFunction f = solved_fixed_point(static_cast<int>(state.range(0)));
  const SpaceParams sp{1, 2.0, 2.0, 0.4, 1};
  const HGrid hg = HGrid::defaults_for(f);
  for (auto _ : state)
    benchmark::DoNotOptimize(besov_seminorm_estimate(f, sp, hg));
}
BENCHMARK(BM_BesovEstimate)->Arg(8)->Arg(10)->Arg(12);

void BM_TriebelEstimate(benchmark::State& state) {
  const SampledFunction f = solved_fixed_point(static_cast<int>(state.range(0)));
  const SpaceParams sp{1, 2.0, 2.0, 0.4, 1};
  const HGrid hg = HGrid::defaults_for(f);
  for (auto _ : state)
    benchmark::DoNotOptimize(triebel_seminorm_estimate(f, sp, hg));
}
BENCHMARK(BM_TriebelEstimate)->Arg(8)->Arg(10)->Arg(12);

void BM_AttractorIterate(benchmark::State& state) {
  const LocalMapSystem ms = base_map_system(
      Partition(Box::interval(0.0, 1.0),
                {{Box::interval(0.0, 1.0), Similitude(0.5, 1.0, 0.0)},
                 {Box::interval(0.0, 1.0), Similitude(0.5, 1.0, 0.5)}}));
  const PointSet k0 = PointSet::grid_sample(Box::interval(0.0, 1.0), 33);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        iterate_attractor(ms, k0, static_cast<int>(state.range(0))));
  }
}
BENCHMARK(BM_AttractorIterate)->Arg(6)->Arg(10)->Arg(14);

void BM_GraphHausdorff(benchmark::State& state) {
  // 2-D clouds drive the quadratic distance path.
  const SampledFunction f = solved_fixed_point(static_cast<int>(state.range(0)));
  const PointSet graph = sampled_graph(f);
  const LocalMapSystem w =
      wloc_system(affine_halving(0.5), fixed_point_sup_bound(affine_halving(0.5)));
  const PointSet image = floc_apply(w, graph);
  for (auto _ : state)
    benchmark::DoNotOptimize(hausdorff_distance(graph, image));
}
BENCHMARK(BM_GraphHausdorff)->Arg(8)->Arg(10);

}  // namespace

BENCHMARK_MAIN();
