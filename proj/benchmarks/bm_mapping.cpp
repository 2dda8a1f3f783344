#include <benchmark/benchmark.h>

#include <random>

#include "mrnav/mapping.hpp"
#include "mrnav/prompt.hpp"
#include "mrnav/sim.hpp"

using namespace mrnav;

namespace {

sim::Scene open_scene(int n) {
  sim::Scene scene;
  scene.id = "bench";
  scene.rows = n;
  scene.cols = n;
  scene.resolution_m = 0.05;
  scene.occupied.assign(static_cast<std::size_t>(n) * n, 0);
  std::mt19937 rng(3);
  std::bernoulli_distribution block(0.08);
  for (auto& v : scene.occupied)
    if (block(rng)) v = 1;
  scene.occupied[(n / 2) * n + n / 2] = 0;
  scene.label.assign(scene.occupied.size(), kNoCategory);
  return scene;
}

SemanticPointCloud noisy_cloud(int points, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> pos(-5.0, 5.0);
  std::bernoulli_distribution tall(0.3);
  SemanticPointCloud cloud;
  cloud.points.reserve(points);
  for (int i = 0; i < points; ++i)
    cloud.points.push_back(CloudPoint{pos(rng), pos(rng), tall(rng) ? 1.0 : 0.0,
                                      kNoCategory, 0});
  return cloud;
}

}  // namespace

static void BM_Sense(benchmark::State& state) {
  const auto scene = open_scene(static_cast<int>(state.range(0)));
  const auto [sx, sy] = scene.cell_center(Cell{scene.rows / 2, scene.cols / 2});
  const Pose pose{sx, sy, 0.4};
  for (auto _ : state) {
    auto frame = sim::sense(scene, pose, sim::SensorParams{});
    benchmark::DoNotOptimize(frame.cells.data());
  }
}
BENCHMARK(BM_Sense)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);

static void BM_DbscanFilter(benchmark::State& state) {
  const auto cloud = noisy_cloud(static_cast<int>(state.range(0)), 11);
  for (auto _ : state) {
    auto filtered = mapping::dbscan_filter(cloud, 0.15, 4);
    benchmark::DoNotOptimize(filtered.points.data());
  }
  state.SetItemsProcessed(state.iterations() * cloud.size());
}
BENCHMARK(BM_DbscanFilter)->Arg(10000)->Arg(40000)->Unit(benchmark::kMillisecond);

static void BM_Project2d(benchmark::State& state) {
  const auto cloud = noisy_cloud(40000, 13);
  GridSpec spec;
  spec.side_m = 24.0;
  spec.resolution_m = 0.05;
  for (auto _ : state) {
    auto map = mapping::project_2d(cloud, spec);
    benchmark::DoNotOptimize(map.explored.data());
  }
}
BENCHMARK(BM_Project2d)->Unit(benchmark::kMillisecond);

static void BM_RenderTopview(benchmark::State& state) {
  const auto cloud = noisy_cloud(20000, 17);
  GridSpec spec;
  spec.side_m = 24.0;
  spec.resolution_m = 0.05;
  const auto map = mapping::project_2d(cloud, spec);
  const std::vector<Pose> poses{Pose{0, 0, 0}, Pose{0.5, 0.5, 2.0}};
  for (auto _ : state) {
    auto img = prompt::render_topview(cloud, map, poses, prompt::PromptMode::Topview);
    benchmark::DoNotOptimize(img.rgb.data());
  }
}
BENCHMARK(BM_RenderTopview)->Unit(benchmark::kMillisecond);

static void BM_EncodePng(benchmark::State& state) {
  const auto cloud = noisy_cloud(20000, 19);
  GridSpec spec;
  spec.side_m = 24.0;
  spec.resolution_m = 0.05;
  const auto map = mapping::project_2d(cloud, spec);
  const auto img = prompt::render_topview(cloud, map, {}, prompt::PromptMode::Topview);
  for (auto _ : state) {
    auto png = prompt::encode_png(img);
    benchmark::DoNotOptimize(png.data());
  }
  state.SetBytesProcessed(state.iterations() * img.rgb.size());
}
BENCHMARK(BM_EncodePng)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
