#include <benchmark/benchmark.h>

#include "liftcomp/bench.hpp"
#include "liftcomp/eacp.hpp"
#include "liftcomp/inference.hpp"
#include "liftcomp/pfg.hpp"

using namespace liftcomp;

namespace {

// Identical branches, so ε-compression leaves one branch class.
ParfactorGraph compressed_star(std::size_t k) {
  GenConfig c;
  c.k = k;
  c.x = 1.0;
  c.eps = 0.01;
  c.seed = 2;
  c.guarantee_pairwise = true;
  c.chain_length = 3;
  c.free = true;
  return run_eacp(perturb(generate_fg(c), c), Epsilon{0.01}).pfg;
}

const Query kHub{"H", {}, std::nullopt};

void BM_GroundVe(benchmark::State& state) {
  const auto fg = ground(compressed_star(static_cast<std::size_t>(state.range(0))));
  std::uint64_t work = 0;
  for (auto _ : state) work = query_ve(fg, kHub).work;
  state.counters["work"] = static_cast<double>(work);
  state.SetComplexityN(state.range(0));
}

void BM_LiftedStar(benchmark::State& state) {
  const auto pfg = compressed_star(static_cast<std::size_t>(state.range(0)));
  std::uint64_t work = 0;
  for (auto _ : state) work = query_lifted_star(pfg, "H", kHub).work;
  state.counters["work"] = static_cast<double>(work);
  state.SetComplexityN(state.range(0));
}

}  // namespace

BENCHMARK(BM_GroundVe)->RangeMultiplier(2)->Range(2, 128)->Complexity();
BENCHMARK(BM_LiftedStar)->RangeMultiplier(2)->Range(2, 128)->Complexity();
