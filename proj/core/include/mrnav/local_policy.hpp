#pragma once

#include <limits>
#include <optional>
#include <vector>

#include "mrnav/grid.hpp"
#include "mrnav/types.hpp"

namespace mrnav::local_policy {

inline constexpr double kUnreachable = std::numeric_limits<double>::infinity();

/// Arrival-time field of the unit-speed eikonal equation over a traversable
/// mask. Values are meters; unreachable cells hold infinity.
struct DistanceField {
  int rows = 0;
  int cols = 0;
  double cell_size_m = 0.0;
  std::vector<Cell> sources;
  std::vector<double> time_m;

  int index(Cell c) const { return c.row * cols + c.col; }
  bool in_bounds(Cell c) const {
    return c.row >= 0 && c.row < rows && c.col >= 0 && c.col < cols;
  }
  double at(Cell c) const { return time_m[index(c)]; }
  bool reachable(Cell c) const { return in_bounds(c) && at(c) < kUnreachable; }
};

/// Solves |∇T| = 1 on the traversable cells with a min-heap narrow band.
/// The update at a cell is the minimum of the two-axis upwind quadratic and
/// the four diagonal one-point relaxations T_d + √2·h, so arrival times never
/// exceed the 8-connected shortest-path length. Throws Error{InvalidSource}
/// when the source is blocked or out of bounds.
DistanceField fmm_field(const std::vector<std::uint8_t>& traversable, int rows,
                        int cols, double cell_size_m, Cell source);

/// Multi-source variant: every source starts at time zero.
DistanceField fmm_field_multi(const std::vector<std::uint8_t>& traversable,
                              int rows, int cols, double cell_size_m,
                              const std::vector<Cell>& sources);

/// Steepest-descent walk from goal to the nearest source, reversed so the
/// result runs source → goal. Field values strictly decrease toward the
/// source. Throws Error{Unreachable} when the goal has no finite time.
std::vector<Cell> extract_path(const DistanceField& field, Cell goal);

/// Farthest path cell within `lookahead_m` of the path start (arc length over
/// cell centres); the final cell when the path is shorter. Lookahead 0 gives
/// the first cell beyond the start. Throws Error{Argument} on empty paths.
Cell select_local_goal(const std::vector<Cell>& path, double lookahead_m,
                       double cell_size_m);

inline constexpr double kHeadingToleranceRad = 15.0 * kPi / 180.0;

/// One discrete action toward a local goal: stop when the target is already
/// within the success radius, otherwise turn until the heading error drops
/// below the tolerance, then move forward.
Action select_action(const Pose& pose, double goal_x, double goal_y,
                     bool target_within_radius,
                     double heading_tolerance_rad = kHeadingToleranceRad);

/// Nearest traversable cell within a Chebyshev search radius (BFS order,
/// deterministic tie-break by scan order). nullopt when none exists.
std::optional<Cell> nearest_traversable(const std::vector<std::uint8_t>& traversable,
                                        int rows, int cols, Cell from,
                                        int max_radius_cells);

}  // namespace mrnav::local_policy
