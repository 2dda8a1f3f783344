#include "mrnav/frontier.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

#include "mrnav/error.hpp"

namespace mrnav::frontier {

namespace {

constexpr int kDr[8] = {-1, -1, -1, 0, 0, 1, 1, 1};
constexpr int kDc[8] = {-1, 0, 1, -1, 1, -1, 0, 1};

}  // namespace

Cell representative_cell(const std::vector<Cell>& cells) {
  if (cells.empty()) throw Error(ErrorKind::Argument, "empty cluster");
  double cr = 0.0, cc = 0.0;
  for (const Cell& c : cells) {
    cr += c.row;
    cc += c.col;
  }
  cr /= cells.size();
  cc /= cells.size();

  Cell best = cells.front();
  double best_d = std::numeric_limits<double>::infinity();
  for (const Cell& c : cells) {
    const double d = (c.row - cr) * (c.row - cr) + (c.col - cc) * (c.col - cc);
    if (d < best_d - 1e-12 ||
        (std::abs(d - best_d) <= 1e-12 && std::pair{c.row, c.col} < std::pair{best.row, best.col})) {
      best = c;
      best_d = d;
    }
  }
  return best;
}

std::vector<FrontierCluster> extract_frontiers(const GridMap& map,
                                               const FrontierParams& params) {
  map.validate();
  const int n = map.size();
  const auto idx = [n](int r, int c) { return r * n + c; };

  // Explored-area contours: 8-connected components of the explored channel.
  // Components smaller than the cluster threshold cannot produce a surviving
  // cluster and are skipped outright.
  std::vector<int> component(static_cast<std::size_t>(n) * n, -1);
  std::vector<int> component_size;
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) {
      if (!map.explored[idx(r, c)] || component[idx(r, c)] >= 0) continue;
      const int id = static_cast<int>(component_size.size());
      int size = 0;
      std::queue<Cell> bfs;
      bfs.push(Cell{r, c});
      component[idx(r, c)] = id;
      while (!bfs.empty()) {
        const Cell cur = bfs.front();
        bfs.pop();
        ++size;
        for (int k = 0; k < 8; ++k) {
          const int rr = cur.row + kDr[k];
          const int cc = cur.col + kDc[k];
          if (rr < 0 || rr >= n || cc < 0 || cc >= n) continue;
          if (!map.explored[idx(rr, cc)] || component[idx(rr, cc)] >= 0) continue;
          component[idx(rr, cc)] = id;
          bfs.push(Cell{rr, cc});
        }
      }
      component_size.push_back(size);
    }
  }

  const auto dilated_edge = [&] {
    // Obstacle edge: obstacle cells 8-adjacent to a non-obstacle cell.
    std::vector<std::uint8_t> edge(static_cast<std::size_t>(n) * n, 0);
    for (int r = 0; r < n; ++r) {
      for (int c = 0; c < n; ++c) {
        if (!map.obstacle[idx(r, c)]) continue;
        for (int k = 0; k < 8; ++k) {
          const int rr = r + kDr[k];
          const int cc = c + kDc[k];
          if (rr < 0 || rr >= n || cc < 0 || cc >= n) continue;
          if (!map.obstacle[idx(rr, cc)]) {
            edge[idx(r, c)] = 1;
            break;
          }
        }
      }
    }
    return dilate_chebyshev(edge, n, n, params.dilation_radius_cells);
  }();

  // Boundary of the explored area minus the dilated obstacle edge.
  std::vector<std::uint8_t> frontier_mask(static_cast<std::size_t>(n) * n, 0);
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) {
      const int i = idx(r, c);
      if (!map.explored[i] || map.obstacle[i]) continue;
      if (component_size[component[i]] < params.min_cluster_size) continue;
      if (dilated_edge[i]) continue;
      bool adjacent_unknown = false;
      for (int k = 0; k < 8 && !adjacent_unknown; ++k) {
        const int rr = r + kDr[k];
        const int cc = c + kDc[k];
        if (rr < 0 || rr >= n || cc < 0 || cc >= n) continue;  // border is not unknown
        if (!map.explored[idx(rr, cc)]) adjacent_unknown = true;
      }
      if (adjacent_unknown) frontier_mask[i] = 1;
    }
  }

  // 8-connected clusters, size-filtered.
  std::vector<FrontierCluster> clusters;
  std::vector<char> seen(static_cast<std::size_t>(n) * n, 0);
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) {
      if (!frontier_mask[idx(r, c)] || seen[idx(r, c)]) continue;
      FrontierCluster cluster;
      std::queue<Cell> bfs;
      bfs.push(Cell{r, c});
      seen[idx(r, c)] = 1;
      while (!bfs.empty()) {
        const Cell cur = bfs.front();
        bfs.pop();
        cluster.cells.push_back(cur);
        for (int k = 0; k < 8; ++k) {
          const int rr = cur.row + kDr[k];
          const int cc = cur.col + kDc[k];
          if (rr < 0 || rr >= n || cc < 0 || cc >= n) continue;
          if (!frontier_mask[idx(rr, cc)] || seen[idx(rr, cc)]) continue;
          seen[idx(rr, cc)] = 1;
          bfs.push(Cell{rr, cc});
        }
      }
      if (static_cast<int>(cluster.cells.size()) < params.min_cluster_size) continue;
      std::sort(cluster.cells.begin(), cluster.cells.end());
      cluster.size = static_cast<int>(cluster.cells.size());
      cluster.representative = representative_cell(cluster.cells);
      clusters.push_back(std::move(cluster));
    }
  }

  std::sort(clusters.begin(), clusters.end(),
            [](const FrontierCluster& a, const FrontierCluster& b) {
              if (a.size != b.size) return a.size > b.size;
              return a.cells.front() < b.cells.front();
            });
  for (std::size_t i = 0; i < clusters.size(); ++i)
    clusters[i].id = static_cast<int>(i);
  return clusters;
}

}  // namespace mrnav::frontier
