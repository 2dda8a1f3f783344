#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "mrnav/scene.hpp"
#include "mrnav/types.hpp"

namespace mrnav::sim {

struct SensorParams {
  double range_m = 5.0;
  double fov_rad = kPi / 2.0;
  int ray_count = 240;
  // Ground-truth label corruption knobs; both default off.
  double label_dropout = 0.0;
  double false_label_rate = 0.0;
};

struct VisibleCell {
  Cell cell;        // scene grid coordinates
  double wx = 0.0;  // world coordinates of the cell centre
  double wy = 0.0;
  bool is_obstacle = false;
  std::int16_t category = kNoCategory;
};

struct SensorFrame {
  int robot_id = 0;
  Pose pose;
  std::vector<VisibleCell> cells;
};

/// Ground-truth visibility sweep. A cell is visible when its centre lies
/// within range and field of view of the pose and the straight segment from
/// the pose to the centre crosses no obstacle cell before it; obstacle cells
/// themselves are visible and flagged. When the angular gap between the
/// ray_count rays exceeds one cell at max range, candidates are restricted to
/// cells swept by the ray fan; with the defaults the fan covers every cell
/// and the result equals pure per-cell line of sight.
/// Throws Error{InvalidPose} when the pose is off the map or on an obstacle.
SensorFrame sense(const Scene& scene, const Pose& pose, const SensorParams& params,
                  int robot_id = 0, std::mt19937_64* rng = nullptr);

/// Discrete dynamics. move_forward advances 0.25 m along the heading unless
/// any swept cell (or the destination) is occupied or off the map, in which
/// case the pose is unchanged; turns rotate ±30°; look_up/look_down/stop are
/// pose no-ops. Collisions are silent no-ops, not errors.
Pose step(const Scene& scene, const Pose& pose, Action action);

/// Length in meters of the shortest obstacle-free path between two world
/// points, computed on the ground-truth grid; infinity when disconnected.
/// Throws Error{InvalidPoint} when either point is off the map or occupied.
double geodesic_distance(const Scene& scene, double ax, double ay, double bx,
                         double by);

/// Cells of the grid-aligned segment from (x0,y0) to (x1,y1), start and end
/// cells included. Exact corner crossings step diagonally, so grazing a cell
/// only at its corner does not visit it.
std::vector<Cell> segment_cells(double x0, double y0, double x1, double y1,
                                double resolution_m, int rows, int cols);

}  // namespace mrnav::sim
