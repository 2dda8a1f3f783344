#pragma once

#include <random>
#include <set>
#include <vector>

#include "mrnav/frontier.hpp"
#include "mrnav/grid.hpp"
#include "mrnav/sim.hpp"
#include "mrnav/types.hpp"

// Independent reference implementations used to check the library. These are
// deliberately naive; keep them free of library code paths.
namespace oracles {

using mrnav::Cell;
using mrnav::GridMap;
using mrnav::Pose;

/// Dijkstra over the free mask with unrestricted 8-connected moves, axis cost
/// h and diagonal cost sqrt(2)*h. Unreachable cells hold infinity.
std::vector<double> dijkstra8(const std::vector<std::uint8_t>& free, int rows,
                              int cols, double h, Cell source);

/// Same with 4-connected moves only (Manhattan geodesic).
std::vector<double> dijkstra4(const std::vector<std::uint8_t>& free, int rows,
                              int cols, double h, Cell source);

/// Re-applies the solver's published update rule to a finished field:
/// min(two-axis quadratic, diagonal + sqrt(2)*h), all from final values.
double eikonal_update(const std::vector<double>& time_m,
                      const std::vector<std::uint8_t>& free, int rows, int cols,
                      int r, int c, double h);

/// Per-cell line-of-sight visibility: a cell is visible when its centre is
/// within range and fov and the open segment from the pose to the centre
/// crosses the open square of no obstacle cell. The crossing test is an
/// exact slab (Liang-Barsky style) clip, not a traversal.
std::set<Cell> visible_cells(const mrnav::sim::Scene& scene, const Pose& pose,
                             double range_m, double fov_rad);

struct BruteCluster {
  int id = 0;
  std::vector<Cell> cells;
  int size = 0;
  Cell representative;
};

/// Definitional frontier scan: explored ∧ free ∧ 8-adjacent-to-unknown ∧
/// Chebyshev distance to every obstacle cell > dilation radius, clustered by
/// union-find, size-filtered, ordered and given representatives by the same
/// published rules as the library (independent code).
std::vector<BruteCluster> brute_frontiers(const GridMap& map, int dilation_radius,
                                          int min_cluster_size);

/// Random scene: border walls plus random rectangles; guarantees the given
/// start cell stays free.
mrnav::sim::Scene random_scene(std::mt19937& rng, int rows, int cols,
                               double resolution_m, Cell keep_free);

/// Random traversability mask with the source kept free.
std::vector<std::uint8_t> random_mask(std::mt19937& rng, int rows, int cols,
                                      double obstacle_density, Cell keep_free);

/// Random partially explored map with consistent channels (obstacle ⊆
/// explored): a few explored disks and rectangles, walls inside them.
GridMap random_partial_map(std::mt19937& rng, int n);

}  // namespace oracles
