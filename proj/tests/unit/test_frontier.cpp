#include <doctest.h>

#include <queue>
#include <random>
#include <set>

#include "mrnav/error.hpp"
#include "mrnav/frontier.hpp"
#include "oracles.hpp"

using namespace mrnav;
using namespace mrnav::frontier;

namespace {

GridSpec spec_of(int n) {
  GridSpec spec;
  spec.side_m = n * 0.05;
  spec.resolution_m = 0.05;
  return spec;
}

bool equals_brute(const std::vector<FrontierCluster>& got,
                  const std::vector<oracles::BruteCluster>& expected) {
  if (got.size() != expected.size()) return false;
  for (std::size_t i = 0; i < got.size(); ++i) {
    if (got[i].id != expected[i].id) return false;
    if (got[i].size != expected[i].size) return false;
    if (got[i].cells != expected[i].cells) return false;
    if (!(got[i].representative == expected[i].representative)) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("fully explored map has no frontiers") {
  GridMap map(spec_of(32));
  for (int r = 0; r < 32; ++r)
    for (int c = 0; c < 32; ++c) map.mark_explored(Cell{r, c});
  CHECK(extract_frontiers(map).empty());
}

TEST_CASE("half-explored map yields one boundary cluster") {
  GridMap map(spec_of(20));
  for (int r = 0; r < 20; ++r)
    for (int c = 0; c < 10; ++c) map.mark_explored(Cell{r, c});
  FrontierParams params;
  params.min_cluster_size = 5;
  const auto clusters = extract_frontiers(map, params);
  REQUIRE(clusters.size() == 1);
  CHECK(clusters[0].id == 0);
  CHECK(clusters[0].size == 20);
  for (const Cell& c : clusters[0].cells) CHECK(c.col == 9);
  CHECK(equals_brute(clusters,
                     oracles::brute_frontiers(map, params.dilation_radius_cells,
                                              params.min_cluster_size)));
}

TEST_CASE("a wall along the boundary masks the frontier") {
  GridMap map(spec_of(20));
  for (int r = 0; r < 20; ++r)
    for (int c = 0; c < 10; ++c) map.mark_explored(Cell{r, c});
  for (int r = 0; r < 20; ++r) map.mark_obstacle(Cell{r, 8});
  FrontierParams params;
  params.min_cluster_size = 5;
  const auto clusters = extract_frontiers(map, params);
  const auto brute = oracles::brute_frontiers(map, params.dilation_radius_cells,
                                              params.min_cluster_size);
  CHECK(equals_brute(clusters, brute));
  CHECK(clusters.empty());  // the dilated wall swallows the boundary column
}

TEST_CASE("representative_cell") {
  SUBCASE("single cell") {
    CHECK(representative_cell({Cell{5, 5}}) == Cell{5, 5});
  }
  SUBCASE("straight line picks the middle") {
    std::vector<Cell> line;
    for (int c = 0; c < 5; ++c) line.push_back(Cell{3, c});
    CHECK(representative_cell(line) == Cell{3, 2});
  }
  SUBCASE("L-shape matches exhaustive search") {
    std::vector<Cell> cells;
    for (int r = 0; r < 6; ++r) cells.push_back(Cell{r, 0});
    for (int c = 1; c < 4; ++c) cells.push_back(Cell{5, c});
    const Cell got = representative_cell(cells);
    double cr = 0, cc = 0;
    for (const Cell& c : cells) {
      cr += c.row;
      cc += c.col;
    }
    cr /= cells.size();
    cc /= cells.size();
    double best = 1e18;
    Cell expect{};
    for (const Cell& c : cells) {
      const double d = (c.row - cr) * (c.row - cr) + (c.col - cc) * (c.col - cc);
      if (d < best) {
        best = d;
        expect = c;
      }
    }
    CHECK(got == expect);
  }
  SUBCASE("empty set is rejected") {
    CHECK_THROWS_AS(representative_cell({}), Error);
  }
}

TEST_CASE("frontier invariants on random maps") {
  std::mt19937 rng(42);
  FrontierParams params;
  for (int trial = 0; trial < 15; ++trial) {
    const int n = 40 + static_cast<int>(rng() % 25);
    const GridMap map = oracles::random_partial_map(rng, n);
    const auto clusters = extract_frontiers(map, params);
    const auto dilated = dilate_chebyshev(
        [&] {
          std::vector<std::uint8_t> edge(map.obstacle.size(), 0);
          for (int r = 0; r < n; ++r)
            for (int c = 0; c < n; ++c) {
              if (!map.obstacle[r * n + c]) continue;
              for (int dr = -1; dr <= 1; ++dr)
                for (int dc = -1; dc <= 1; ++dc) {
                  const int rr = r + dr, cc = c + dc;
                  if (rr < 0 || rr >= n || cc < 0 || cc >= n) continue;
                  if (!map.obstacle[rr * n + cc]) edge[r * n + c] = 1;
                }
            }
          return edge;
        }(),
        n, n, params.dilation_radius_cells);

    std::set<Cell> all_cells;
    for (const auto& cluster : clusters) {
      CHECK(cluster.size == static_cast<int>(cluster.cells.size()));
      CHECK(cluster.size >= params.min_cluster_size);
      bool rep_in = false;
      for (const Cell& c : cluster.cells) {
        CHECK(map.is_explored(c));
        CHECK(!map.is_obstacle(c));
        CHECK(!dilated[c.row * n + c.col]);
        bool near_unknown = false;
        for (int dr = -1; dr <= 1; ++dr)
          for (int dc = -1; dc <= 1; ++dc) {
            const int rr = c.row + dr, cc = c.col + dc;
            if (rr < 0 || rr >= n || cc < 0 || cc >= n || (dr == 0 && dc == 0)) continue;
            if (!map.explored[rr * n + cc]) near_unknown = true;
          }
        CHECK(near_unknown);
        CHECK(all_cells.insert(c).second);  // pairwise disjoint
        if (c == cluster.representative) rep_in = true;
      }
      CHECK(rep_in);

      // 8-connectivity by flood fill
      std::set<Cell> members(cluster.cells.begin(), cluster.cells.end());
      std::set<Cell> seen;
      std::queue<Cell> bfs;
      bfs.push(cluster.cells.front());
      seen.insert(cluster.cells.front());
      while (!bfs.empty()) {
        const Cell cur = bfs.front();
        bfs.pop();
        for (int dr = -1; dr <= 1; ++dr)
          for (int dc = -1; dc <= 1; ++dc) {
            const Cell nb{cur.row + dr, cur.col + dc};
            if (members.count(nb) && !seen.count(nb)) {
              seen.insert(nb);
              bfs.push(nb);
            }
          }
      }
      CHECK(seen.size() == members.size());
    }

    // determinism
    const auto again = extract_frontiers(map, params);
    REQUIRE(again.size() == clusters.size());
    for (std::size_t i = 0; i < clusters.size(); ++i) {
      CHECK(again[i].cells == clusters[i].cells);
      CHECK(again[i].representative == clusters[i].representative);
    }
  }
}

TEST_CASE("extract_frontiers equals the definitional scan on random maps") {
  std::mt19937 rng(7);
  FrontierParams params;
  for (int trial = 0; trial < 25; ++trial) {
    const int n = 32 + static_cast<int>(rng() % 33);
    const GridMap map = oracles::random_partial_map(rng, n);
    const auto got = extract_frontiers(map, params);
    const auto expected = oracles::brute_frontiers(map, params.dilation_radius_cells,
                                                   params.min_cluster_size);
    CHECK(equals_brute(got, expected));
  }
}
