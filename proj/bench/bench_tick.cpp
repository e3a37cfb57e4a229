// Serial versus OpenMP tick kernel on a warmed-up swarm.
#include <benchmark/benchmark.h>

#include <string>

#include "swarmpath/sim.hpp"

using namespace swarmpath;

namespace {

WorldState warmed(int robots, const SimParams& p) {
  const ArenaSpec a = load_arena(std::string(SWARMPATH_DATA_DIR) + "/arenas/env4_obstacle.json");
  WorldState w = make_world(a, robots, 7, p);
  // Past the initial rest so most robots are exploring.
  for (int t = 0; t < 300; ++t) tick(w, p);
  return w;
}

void run(benchmark::State& st, Kernel kernel) {
  SimParams p;
  p.kernel = kernel;
  if (kernel == Kernel::Parallel && st.range(1) > 0) p.threads = static_cast<int>(st.range(1));
  WorldState w = warmed(static_cast<int>(st.range(0)), p);
  for (auto _ : st) {
    tick(w, p);
    benchmark::DoNotOptimize(w.robots.data());
  }
  st.SetItemsProcessed(st.iterations() * st.range(0));
}

void BM_TickSerial(benchmark::State& st) { run(st, Kernel::Serial); }
void BM_TickParallel(benchmark::State& st) { run(st, Kernel::Parallel); }

}  // namespace

BENCHMARK(BM_TickSerial)->ArgsProduct({{60, 100, 400}, {1}})->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_TickParallel)
    ->ArgsProduct({{60, 100, 400}, {0}})  // 0: all available threads
    ->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();
