#include <benchmark/benchmark.h>

#include "maxreg/counterexample.hpp"
#include "maxreg/evolution.hpp"
#include "maxreg/weighted_spaces.hpp"

namespace {

using namespace maxreg;

void BM_AssembleGramV(benchmark::State& state) {
  const MeshPtr mesh = build_mesh(1e-4, static_cast<int>(state.range(0)), 2.0);
  for (auto _ : state) benchmark::DoNotOptimize(assemble_gram(*mesh, {1.5}));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_AssembleGramV)->RangeMultiplier(4)->Range(256, 16384)->Complexity(benchmark::oN);

void BM_AssembleForm(benchmark::State& state) {
  CounterexampleSpec spec;
  spec.variant = state.range(1) ? Variant::symmetric : Variant::nonsymmetric;
  const CounterexampleFamily fam(spec, make_spaces(build_mesh(1e-4, static_cast<int>(state.range(0)), 2.0), 1.5));
  double t = 0.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(fam.assemble_form(t));
    t = t < 0.99 ? t + 0.01 : 0.0;
  }
}
BENCHMARK(BM_AssembleForm)->ArgsProduct({{512, 2048, 8192}, {0, 1}});

void BM_ThetaSchemeSolve(benchmark::State& state) {
  CounterexampleSpec spec;
  const CounterexampleFamily fam(spec, make_spaces(build_mesh(1e-2, static_cast<int>(state.range(0)), 2.0), 1.5));
  for (auto _ : state) benchmark::DoNotOptimize(solve_cutoff_problem(fam, 200, {}));
  state.SetItemsProcessed(state.iterations() * 200);
}
BENCHMARK(BM_ThetaSchemeSolve)->Arg(128)->Arg(512)->Arg(2048)->Unit(benchmark::kMillisecond);

void BM_OperatorDifferenceNorm(benchmark::State& state) {
  CounterexampleSpec spec;
  const CounterexampleFamily fam(spec, make_spaces(build_mesh(1e-4, 2048, 2.0), 1.5));
  const FormOperator a = fam.assemble_form(0.3);
  const FormOperator b = fam.assemble_form(0.3001);
  for (auto _ : state) benchmark::DoNotOptimize(operator_difference_norm(a, b));
}
BENCHMARK(BM_OperatorDifferenceNorm);

}  // namespace

BENCHMARK_MAIN();
