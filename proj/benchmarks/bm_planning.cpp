#include <benchmark/benchmark.h>

#include <random>

#include "mrnav/frontier.hpp"
#include "mrnav/local_policy.hpp"

using namespace mrnav;

namespace {

std::vector<std::uint8_t> maze_mask(int n, unsigned seed) {
  std::mt19937 rng(seed);
  std::vector<std::uint8_t> free(static_cast<std::size_t>(n) * n, 1);
  std::bernoulli_distribution block(0.25);
  for (auto& v : free)
    if (block(rng)) v = 0;
  free[(n / 2) * n + n / 2] = 1;
  return free;
}

GridMap partial_map(int n, unsigned seed) {
  std::mt19937 rng(seed);
  GridSpec spec;
  spec.side_m = n * 0.05;
  spec.resolution_m = 0.05;
  GridMap map(spec);
  std::uniform_int_distribution<int> pos(0, n - 1);
  for (int d = 0; d < 3; ++d) {
    const int cr = pos(rng), cc = pos(rng), rad = n / 4;
    for (int r = std::max(0, cr - rad); r <= std::min(n - 1, cr + rad); ++r)
      for (int c = std::max(0, cc - rad); c <= std::min(n - 1, cc + rad); ++c)
        if ((r - cr) * (r - cr) + (c - cc) * (c - cc) <= rad * rad)
          map.mark_explored(Cell{r, c});
  }
  for (int w = 0; w < 6; ++w) {
    const int r0 = pos(rng), c0 = pos(rng);
    for (int k = 0; k < n / 3; ++k) {
      const int c = std::min(n - 1, c0 + k);
      if (map.explored[r0 * n + c]) map.mark_obstacle(Cell{r0, c});
    }
  }
  return map;
}

}  // namespace

static void BM_FmmField(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto free = maze_mask(n, 42);
  for (auto _ : state) {
    auto field = local_policy::fmm_field(free, n, n, 0.05, Cell{n / 2, n / 2});
    benchmark::DoNotOptimize(field.time_m.data());
  }
  state.SetItemsProcessed(state.iterations() * n * n);
}
BENCHMARK(BM_FmmField)->Arg(128)->Arg(256)->Arg(480)->Unit(benchmark::kMillisecond);

static void BM_ExtractPath(benchmark::State& state) {
  const int n = 256;
  const auto free = maze_mask(n, 42);
  const auto field = local_policy::fmm_field(free, n, n, 0.05, Cell{n / 2, n / 2});
  Cell goal{1, 1};
  double best = 0;
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c)
      if (field.reachable(Cell{r, c}) && field.at(Cell{r, c}) > best) {
        best = field.at(Cell{r, c});
        goal = Cell{r, c};
      }
  for (auto _ : state) {
    auto path = local_policy::extract_path(field, goal);
    benchmark::DoNotOptimize(path.data());
  }
}
BENCHMARK(BM_ExtractPath)->Unit(benchmark::kMicrosecond);

static void BM_ExtractFrontiers(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto map = partial_map(n, 7);
  for (auto _ : state) {
    auto clusters = frontier::extract_frontiers(map, {});
    benchmark::DoNotOptimize(clusters.data());
  }
  state.SetItemsProcessed(state.iterations() * n * n);
}
BENCHMARK(BM_ExtractFrontiers)->Arg(256)->Arg(480)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
