#include <benchmark/benchmark.h>

#include <hdg/assembly.hpp>
#include <hdg/cases.hpp>
#include <hdg/solver.hpp>

using namespace hdg;

namespace {

Mesh square(int n) { return unit_square_mesh(n); }

void BM_LocalBlocks(benchmark::State& state) {
  const Mesh m = square(4);
  const MethodConfig cfg = MethodConfig::make(Method::HDG, static_cast<int>(state.range(0)));
  int c = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(local_blocks(m, c, cfg, {}));
    c = (c + 1) % m.num_cells();
  }
}
BENCHMARK(BM_LocalBlocks)->Arg(1)->Arg(2);

void BM_Assemble(benchmark::State& state) {
  const Mesh m = square(static_cast<int>(state.range(0)));
  const SpaceSet s = build_spaces(m, MethodConfig::make(Method::EDG_HDG, 1));
  const Eigen::VectorXd bc = case_boundary_data(*case_square_min_reg().exact, m, s);
  for (auto _ : state) benchmark::DoNotOptimize(assemble(m, s, {}, bc));
  state.SetComplexityN(m.num_cells());
}
BENCHMARK(BM_Assemble)->Arg(8)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

void BM_SolveCondensed(benchmark::State& state) {
  const Mesh m = square(static_cast<int>(state.range(0)));
  const auto method = static_cast<Method>(state.range(1));
  const SpaceSet s = build_spaces(m, MethodConfig::make(method, 1));
  const Eigen::VectorXd bc = case_boundary_data(*case_square_min_reg().exact, m, s);
  for (auto _ : state) benchmark::DoNotOptimize(solve_condensed(m, s, {}, bc));
  state.counters["unknowns"] = condensed_unknowns(s);
}
BENCHMARK(BM_SolveCondensed)
    ->Args({16, static_cast<int>(Method::HDG)})
    ->Args({16, static_cast<int>(Method::EDG_HDG)})
    ->Args({32, static_cast<int>(Method::EDG_HDG)})
    ->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
