#include <benchmark/benchmark.h>

#include "liftcomp/acp.hpp"
#include "liftcomp/bench.hpp"
#include "liftcomp/eacp.hpp"

using namespace liftcomp;

namespace {

FactorGraph star(std::size_t k, double eps) {
  GenConfig c;
  c.k = k;
  c.x = 1.0;
  c.eps = eps;
  c.seed = 1;
  c.chain_length = 3;
  c.free = true;
  return perturb(generate_fg(c), c);
}

void BM_Acp(benchmark::State& state) {
  const auto fg = star(static_cast<std::size_t>(state.range(0)), 0.01);
  for (auto _ : state) benchmark::DoNotOptimize(run_acp(fg));
  state.SetComplexityN(state.range(0));
}

void BM_Eacp(benchmark::State& state) {
  const auto fg = star(static_cast<std::size_t>(state.range(0)), 0.01);
  for (auto _ : state) benchmark::DoNotOptimize(run_eacp(fg, Epsilon{0.01}));
  state.SetComplexityN(state.range(0));
}

}  // namespace

BENCHMARK(BM_Acp)->RangeMultiplier(2)->Range(2, 64)->Complexity();
BENCHMARK(BM_Eacp)->RangeMultiplier(2)->Range(2, 64)->Complexity();
