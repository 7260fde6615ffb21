#include <benchmark/benchmark.h>

#include "liftcomp/bounds.hpp"
#include "liftcomp/eacp.hpp"

using namespace liftcomp;

namespace {

// Worst-case model with m factors has (2m)^m joint states.
void BM_DistanceExact(benchmark::State& state) {
  const auto m = static_cast<std::size_t>(state.range(0));
  const auto threads = static_cast<unsigned>(state.range(1));
  const Epsilon eps{0.1};
  const auto fg = worst_case_fg(m, eps);
  const auto merged = run_eacp(fg, eps).m_prime;
  for (auto _ : state) benchmark::DoNotOptimize(distance_exact(fg, merged, threads));
}

}  // namespace

BENCHMARK(BM_DistanceExact)->ArgsProduct({{2, 3, 4, 5}, {1, 2}});
