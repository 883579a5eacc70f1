#include <benchmark/benchmark.h>

#include <random>

#include "relief/homography.hpp"
#include "relief/pipeline.hpp"
#include "relief/presets.hpp"
#include "relief/stl.hpp"

using namespace relief;

namespace {

std::vector<CornerPairSet> random_sets(std::size_t n) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> coord(0, 1000);
  std::vector<CornerPairSet> out;
  while (out.size() < n) {
    CornerPairSet p;
    std::array<PixelPoint, 4> s, t;
    for (int i = 0; i < 4; ++i) {
      s[i] = {coord(rng), coord(rng)};
      t[i] = {coord(rng), coord(rng)};
      p[i] = {s[i], t[i]};
    }
    if (min_triangle_area(s) > 1000 && min_triangle_area(t) > 1000) out.push_back(p);
  }
  return out;
}

void BM_Estimate(benchmark::State& state) {
  const auto sets = random_sets(1024);
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(estimate(sets[i++ % sets.size()]));
  }
}
BENCHMARK(BM_Estimate);

void BM_Apply(benchmark::State& state) {
  const Homography h = estimate(random_sets(1)[0]);
  PixelPoint p{123.5, 456.25};
  for (auto _ : state) {
    benchmark::DoNotOptimize(h.apply(p));
    p.u += 1e-3;
  }
}
BENCHMARK(BM_Apply);

void BM_DepthStageCube(benchmark::State& state) {
  const ReliefProject project = synthesize(cube_scene()).project;
  for (auto _ : state) benchmark::DoNotOptimize(compute_depth(project));
}
BENCHMARK(BM_DepthStageCube)->Unit(benchmark::kMillisecond);

void BM_AssembleHandGrid(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const ReliefProject project = synthesize(hand_grid_scene(n, n, 3)).project;
  const DepthStage depth = compute_depth(project);
  for (auto _ : state) benchmark::DoNotOptimize(assemble(depth, project));
}
BENCHMARK(BM_AssembleHandGrid)->Arg(2)->Arg(6)->Unit(benchmark::kMillisecond);

void BM_MeshAndStl(benchmark::State& state) {
  const ReliefMap map = run_pipeline(synthesize(cube_scene()).project).relief.final_map;
  const bool ascii = state.range(0) != 0;
  for (auto _ : state) {
    const SolidMesh mesh = heightfield_to_solid(map);
    benchmark::DoNotOptimize(write_stl(mesh, ascii ? StlFormat::Ascii : StlFormat::Binary));
  }
}
BENCHMARK(BM_MeshAndStl)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_ReadStl(benchmark::State& state) {
  const auto bytes = write_stl(run_pipeline(synthesize(cube_scene()).project).mesh);
  for (auto _ : state) benchmark::DoNotOptimize(read_stl(bytes));
}
BENCHMARK(BM_ReadStl)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
