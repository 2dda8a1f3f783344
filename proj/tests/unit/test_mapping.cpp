#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>
#include <sstream>

#include "mrnav/error.hpp"
#include "mrnav/mapping.hpp"
#include "oracles.hpp"

using namespace mrnav;
using namespace mrnav::mapping;

namespace {

GridSpec small_spec() {
  GridSpec spec;
  spec.side_m = 3.2;  // 64 cells
  spec.resolution_m = 0.05;
  return spec;
}

sim::VisibleCell vcell(const GridSpec& spec, Cell c, bool obstacle,
                       std::int16_t category = kNoCategory) {
  sim::VisibleCell vc;
  vc.cell = c;
  const auto [wx, wy] = grid_to_world(c, spec);
  vc.wx = wx;
  vc.wy = wy;
  vc.is_obstacle = obstacle;
  vc.category = category;
  return vc;
}

sim::SensorFrame frame_of(int robot, const GridSpec& spec,
                          std::vector<sim::VisibleCell> cells) {
  sim::SensorFrame f;
  f.robot_id = robot;
  f.cells = std::move(cells);
  return f;
}

}  // namespace

TEST_CASE("integrate_frame appends one point per visible cell") {
  const auto spec = small_spec();
  LocalMap local(0, spec);
  integrate_frame(local, frame_of(0, spec,
                                  {vcell(spec, {10, 10}, false),
                                   vcell(spec, {10, 11}, false),
                                   vcell(spec, {10, 12}, true)}));
  const auto cloud = local.cloud();
  CHECK(cloud.size() == 3);
  int obstacles = 0;
  for (const auto& p : cloud.points)
    if (p.z > kFloorThresholdM) ++obstacles;
  CHECK(obstacles == 1);
}

TEST_CASE("duplicate frames collapse under voxel dedup") {
  const auto spec = small_spec();
  LocalMap local(0, spec);
  const auto f = frame_of(0, spec, {vcell(spec, {5, 5}, false), vcell(spec, {5, 6}, true)});
  integrate_frame(local, f);
  integrate_frame(local, f);
  CHECK(local.cloud().size() == 2);
  CHECK(local.observation_count(Cell{5, 5}) == 2);
}

TEST_CASE("labeled cells carry their category") {
  const auto spec = small_spec();
  LocalMap local(0, spec);
  integrate_frame(local,
                  frame_of(0, spec, {vcell(spec, {7, 7}, true, *category_id("bed"))}));
  const auto cloud = local.cloud();
  REQUIRE(cloud.size() == 1);
  CHECK(cloud.points[0].category == *category_id("bed"));
}

TEST_CASE("integrating a foreign frame is an ownership error") {
  const auto spec = small_spec();
  LocalMap local(0, spec);
  try {
    integrate_frame(local, frame_of(1, spec, {}));
    FAIL("expected error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Ownership);
  }
}

TEST_CASE("integrate_frame is monotone in the explored set") {
  const auto spec = small_spec();
  std::mt19937 rng(3);
  LocalMap local(2, spec);
  std::set<int> explored;
  for (int i = 0; i < 30; ++i) {
    std::vector<sim::VisibleCell> cells;
    const int count = 1 + static_cast<int>(rng() % 20);
    for (int k = 0; k < count; ++k)
      cells.push_back(vcell(spec, {static_cast<int>(rng() % 64), static_cast<int>(rng() % 64)},
                            rng() % 4 == 0));
    integrate_frame(local, frame_of(2, spec, std::move(cells)));
    std::set<int> now;
    for (const auto& [idx, obs] : local.cells()) now.insert(idx);
    CHECK(std::includes(now.begin(), now.end(), explored.begin(), explored.end()));
    explored = std::move(now);
  }
}

TEST_CASE("merge_global unions disjoint maps and dedups overlap") {
  const auto spec = small_spec();
  LocalMap a(0, spec), b(1, spec);
  integrate_frame(a, frame_of(0, spec, {vcell(spec, {1, 1}, false), vcell(spec, {1, 2}, false)}));
  integrate_frame(b, frame_of(1, spec, {vcell(spec, {9, 9}, true)}));

  SUBCASE("disjoint union") {
    const auto merged = merge_global({a, b});
    CHECK(merged.size() == 3);
  }
  SUBCASE("empty maps merge to empty") {
    LocalMap e0(0, spec), e1(1, spec);
    CHECK(merge_global({e0, e1}).empty());
  }
  SUBCASE("overlap appears once") {
    integrate_frame(b, frame_of(1, spec, {vcell(spec, {1, 1}, false)}));
    const auto merged = merge_global({a, b});
    CHECK(merged.size() == 3);
  }
  SUBCASE("mismatched specs are rejected") {
    GridSpec other = spec;
    other.side_m = 6.4;
    LocalMap c(2, other);
    CHECK_THROWS_AS(merge_global({a, c}), Error);
  }
}

TEST_CASE("merge_global matches a brute-force cell union on a toy scene") {
  // two robots observing overlapping halves of a 16x16 region
  const auto spec = small_spec();
  LocalMap a(0, spec), b(1, spec);
  std::set<std::pair<int, int>> expected;
  std::vector<sim::VisibleCell> ca, cb;
  for (int r = 0; r < 16; ++r) {
    for (int c = 0; c < 16; ++c) {
      const bool obstacle = (r % 5 == 0);
      if (c < 10) ca.push_back(vcell(spec, {r, c}, obstacle));
      if (c >= 6) cb.push_back(vcell(spec, {r, c}, obstacle));
      expected.insert({r, c});
    }
  }
  integrate_frame(a, frame_of(0, spec, ca));
  integrate_frame(b, frame_of(1, spec, cb));
  const auto merged = merge_global({a, b});
  CHECK(merged.size() == expected.size());
  std::set<std::pair<int, int>> got;
  for (const auto& p : merged.points) {
    const Cell c = world_to_grid(p.x, p.y, spec);
    got.insert({c.row, c.col});
  }
  CHECK(got == expected);
}

TEST_CASE("merge_global is order-independent") {
  const auto spec = small_spec();
  std::mt19937 rng(17);
  std::vector<LocalMap> locals;
  for (int robot = 0; robot < 3; ++robot) {
    LocalMap lm(robot, spec);
    std::vector<sim::VisibleCell> cells;
    for (int k = 0; k < 40; ++k) {
      const std::int16_t cat =
          rng() % 3 == 0 ? static_cast<std::int16_t>(rng() % 12) : kNoCategory;
      cells.push_back(vcell(spec, {static_cast<int>(rng() % 64), static_cast<int>(rng() % 64)},
                            rng() % 4 == 0, cat));
    }
    integrate_frame(lm, frame_of(robot, spec, cells));
    locals.push_back(std::move(lm));
  }
  const auto base = merge_global({locals[0], locals[1], locals[2]});
  const auto perm1 = merge_global({locals[2], locals[0], locals[1]});
  const auto perm2 = merge_global({locals[1], locals[2], locals[0]});
  const auto equal = [](const SemanticPointCloud& x, const SemanticPointCloud& y) {
    if (x.size() != y.size()) return false;
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (x.points[i].x != y.points[i].x || x.points[i].y != y.points[i].y ||
          x.points[i].z != y.points[i].z || x.points[i].category != y.points[i].category ||
          x.points[i].robot != y.points[i].robot)
        return false;
    }
    return true;
  };
  CHECK(equal(base, perm1));
  CHECK(equal(base, perm2));
}

TEST_CASE("label conflicts resolve by majority then lowest robot id") {
  const auto spec = small_spec();
  LocalMap a(0, spec), b(1, spec);
  const auto chair = *category_id("chair");
  const auto sofa = *category_id("sofa");
  // robot 1 sees sofa twice, robot 0 sees chair once -> sofa wins by count
  integrate_frame(a, frame_of(0, spec, {vcell(spec, {3, 3}, false, chair)}));
  integrate_frame(b, frame_of(1, spec, {vcell(spec, {3, 3}, false, sofa)}));
  integrate_frame(b, frame_of(1, spec, {vcell(spec, {3, 3}, false, sofa)}));
  auto merged = merge_global({a, b});
  REQUIRE(merged.size() == 1);
  CHECK(merged.points[0].category == sofa);

  // tie at one observation each -> lowest robot id (robot 0, chair) wins
  LocalMap c(0, spec), d(1, spec);
  integrate_frame(c, frame_of(0, spec, {vcell(spec, {4, 4}, false, chair)}));
  integrate_frame(d, frame_of(1, spec, {vcell(spec, {4, 4}, false, sofa)}));
  merged = merge_global({c, d});
  REQUIRE(merged.size() == 1);
  CHECK(merged.points[0].category == chair);
}

TEST_CASE("dbscan_filter") {
  const auto mk = [](std::initializer_list<std::pair<double, double>> pts) {
    SemanticPointCloud cloud;
    for (const auto& [x, y] : pts) cloud.points.push_back(CloudPoint{x, y, 0.0, -1, 0});
    return cloud;
  };

  SUBCASE("a tight group survives") {
    const auto cloud =
        mk({{0.0, 0.0}, {0.05, 0.0}, {0.0, 0.05}, {-0.05, 0.0}, {0.0, -0.05}});
    const auto out = dbscan_filter(cloud, 0.15, 4);
    CHECK(out.size() == 5);
  }
  SUBCASE("an isolated point is removed") {
    auto cloud = mk({{0.0, 0.0}, {0.05, 0.0}, {0.0, 0.05}, {-0.05, 0.0}, {0.0, -0.05}});
    cloud.points.push_back(CloudPoint{1.5, 1.5, 0.0, -1, 0});
    const auto out = dbscan_filter(cloud, 0.15, 4);
    CHECK(out.size() == 5);
    for (const auto& p : out.points) CHECK(p.x < 1.0);
  }
  SUBCASE("empty cloud passes through") {
    CHECK(dbscan_filter(SemanticPointCloud{}, 0.15, 4).empty());
  }
  SUBCASE("bad parameters are rejected") {
    CHECK_THROWS_AS(dbscan_filter(SemanticPointCloud{}, 0.0, 4), Error);
    CHECK_THROWS_AS(dbscan_filter(SemanticPointCloud{}, 0.1, 0), Error);
  }
}

TEST_CASE("dbscan_filter is a subset map and idempotent") {
  std::mt19937 rng(23);
  std::uniform_real_distribution<double> coord(-1.0, 1.0);
  for (int trial = 0; trial < 10; ++trial) {
    SemanticPointCloud cloud;
    for (int i = 0; i < 200; ++i)
      cloud.points.push_back(CloudPoint{coord(rng), coord(rng), 0.0, -1, 0});
    const auto once = dbscan_filter(cloud, 0.15, 4);
    CHECK(once.size() <= cloud.size());
    // subset in order
    std::size_t cursor = 0;
    for (const auto& p : once.points) {
      while (cursor < cloud.size() &&
             (cloud.points[cursor].x != p.x || cloud.points[cursor].y != p.y))
        ++cursor;
      CHECK(cursor < cloud.size());
      ++cursor;
    }
    const auto twice = dbscan_filter(once, 0.15, 4);
    CHECK(twice.size() == once.size());
  }
}

TEST_CASE("project_2d") {
  const auto spec = small_spec();
  SUBCASE("floor points mark explored only") {
    SemanticPointCloud cloud;
    const auto [wx, wy] = grid_to_world(Cell{20, 20}, spec);
    cloud.points.push_back(CloudPoint{wx, wy, 0.0, -1, 0});
    const auto map = project_2d(cloud, spec);
    CHECK(map.is_explored(Cell{20, 20}));
    CHECK(!map.is_obstacle(Cell{20, 20}));
  }
  SUBCASE("a raised point marks obstacle and explored") {
    SemanticPointCloud cloud;
    const auto [wx, wy] = grid_to_world(Cell{10, 10}, spec);
    cloud.points.push_back(CloudPoint{wx, wy, 1.0, -1, 0});
    const auto map = project_2d(cloud, spec);
    CHECK(map.is_obstacle(Cell{10, 10}));
    CHECK(map.is_explored(Cell{10, 10}));
  }
  SUBCASE("out-of-extent points are an extent error") {
    SemanticPointCloud cloud;
    cloud.points.push_back(CloudPoint{100.0, 0.0, 0.0, -1, 0});
    CHECK_THROWS_AS(project_2d(cloud, spec), Error);
  }
}

TEST_CASE("projected obstacle channel equals observed scene walls") {
  // corridor sweep: sense along a corridor, integrate, project, compare
  std::mt19937 rng(4);
  const Cell start{24, 24};
  const auto scene = oracles::random_scene(rng, 48, 48, 0.05, start);
  GridSpec spec;
  spec.side_m = 48 * 0.05;
  spec.resolution_m = 0.05;

  LocalMap local(0, spec);
  std::set<std::pair<int, int>> observed_obstacles, observed;
  const auto [sx, sy] = scene.cell_center(start);
  sim::SensorParams params;
  params.range_m = 1.5;
  for (int k = 0; k < 12; ++k) {
    const Pose pose{sx + 0.003, sy - 0.007, k * kTwoPi / 12};
    const auto frame = sim::sense(scene, pose, params, 0);
    integrate_frame(local, frame);
    for (const auto& vc : frame.cells) {
      const Cell c = world_to_grid(vc.wx, vc.wy, spec);
      observed.insert({c.row, c.col});
      if (vc.is_obstacle) observed_obstacles.insert({c.row, c.col});
    }
  }
  const auto map = project_2d(local.cloud(), spec);
  for (int r = 0; r < map.size(); ++r) {
    for (int c = 0; c < map.size(); ++c) {
      const bool obs = map.is_obstacle(Cell{r, c});
      CHECK(obs == (observed_obstacles.count({r, c}) > 0));
      CHECK(map.is_explored(Cell{r, c}) == (observed.count({r, c}) > 0));
    }
  }
}

TEST_CASE("projection of a merge equals the cellwise OR of projections") {
  const auto spec = small_spec();
  std::mt19937 rng(31);
  for (int trial = 0; trial < 5; ++trial) {
    std::vector<LocalMap> locals;
    for (int robot = 0; robot < 3; ++robot) {
      LocalMap lm(robot, spec);
      std::vector<sim::VisibleCell> cells;
      for (int k = 0; k < 60; ++k)
        cells.push_back(vcell(spec, {static_cast<int>(rng() % 64), static_cast<int>(rng() % 64)},
                              rng() % 5 == 0));
      integrate_frame(lm, frame_of(robot, spec, cells));
      locals.push_back(std::move(lm));
    }
    const auto merged_map = project_2d(merge_global(locals), spec);
    GridMap or_map(spec);
    for (const auto& lm : locals) {
      const auto m = project_2d(lm.cloud(), spec);
      for (std::size_t i = 0; i < or_map.obstacle.size(); ++i) {
        or_map.obstacle[i] |= m.obstacle[i];
        or_map.explored[i] |= m.explored[i];
      }
    }
    CHECK(merged_map.obstacle == or_map.obstacle);
    CHECK(merged_map.explored == or_map.explored);
  }
}

TEST_CASE("cloud dump format") {
  SemanticPointCloud cloud;
  cloud.points.push_back(CloudPoint{0.125, -0.25, 1.0, 3, 1});
  std::ostringstream out;
  dump_cloud(cloud, out);
  CHECK(out.str() == "0.125 -0.25 1 3 1\n");
}
