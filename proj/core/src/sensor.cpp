#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "mrnav/error.hpp"
#include "mrnav/sim.hpp"

namespace mrnav::sim {

namespace {

// Traversal in grid coordinates (u = x/res + cols/2). Ties on the axis
// crossings step diagonally so a segment through an exact corner does not
// visit the two side cells.
void trace(double u0, double v0, double u1, double v1, int max_cells,
           std::vector<Cell>& out) {
  int col = static_cast<int>(std::floor(u0));
  int row = static_cast<int>(std::floor(v0));
  const int end_col = static_cast<int>(std::floor(u1));
  const int end_row = static_cast<int>(std::floor(v1));
  out.push_back(Cell{row, col});

  const double du = u1 - u0;
  const double dv = v1 - v0;
  const int step_col = du > 0 ? 1 : (du < 0 ? -1 : 0);
  const int step_row = dv > 0 ? 1 : (dv < 0 ? -1 : 0);
  const double inf = std::numeric_limits<double>::infinity();
  const double t_delta_u = step_col ? std::abs(1.0 / du) : inf;
  const double t_delta_v = step_row ? std::abs(1.0 / dv) : inf;
  double t_max_u = inf;
  double t_max_v = inf;
  if (step_col)
    t_max_u = ((step_col > 0 ? std::floor(u0) + 1.0 : std::floor(u0)) - u0) / du;
  if (step_row)
    t_max_v = ((step_row > 0 ? std::floor(v0) + 1.0 : std::floor(v0)) - v0) / dv;

  int guard = max_cells;
  while ((row != end_row || col != end_col) && guard-- > 0) {
    if (std::abs(t_max_u - t_max_v) < 1e-12) {
      col += step_col;
      row += step_row;
      t_max_u += t_delta_u;
      t_max_v += t_delta_v;
    } else if (t_max_u < t_max_v) {
      col += step_col;
      t_max_u += t_delta_u;
    } else {
      row += step_row;
      t_max_v += t_delta_v;
    }
    out.push_back(Cell{row, col});
  }
}

}  // namespace

std::vector<Cell> segment_cells(double x0, double y0, double x1, double y1,
                                double resolution_m, int rows, int cols) {
  std::vector<Cell> cells;
  const double u0 = x0 / resolution_m + cols / 2;
  const double v0 = y0 / resolution_m + rows / 2;
  const double u1 = x1 / resolution_m + cols / 2;
  const double v1 = y1 / resolution_m + rows / 2;
  const int budget = 4 * (static_cast<int>(std::abs(u1 - u0) + std::abs(v1 - v0)) + 2);
  trace(u0, v0, u1, v1, budget, cells);
  return cells;
}

namespace {

// Straight segment from the pose to the cell centre, blocked by any occupied
// cell strictly before the destination.
bool line_of_sight(const Scene& scene, const Pose& pose, Cell target) {
  const auto [cx, cy] = scene.cell_center(target);
  const auto cells =
      segment_cells(pose.x, pose.y, cx, cy, scene.resolution_m, scene.rows, scene.cols);
  for (std::size_t i = 0; i + 1 < cells.size(); ++i) {
    if (!scene.in_bounds(cells[i])) return false;
    if (scene.is_occupied(cells[i])) return false;
  }
  return true;
}

}  // namespace

SensorFrame sense(const Scene& scene, const Pose& pose, const SensorParams& params,
                  int robot_id, std::mt19937_64* rng) {
  if (!pose.finite() || !scene.contains(pose.x, pose.y))
    throw Error(ErrorKind::InvalidPose, "pose outside scene");
  const Cell pose_cell = scene.cell_at(pose.x, pose.y);
  if (scene.is_occupied(pose_cell))
    throw Error(ErrorKind::InvalidPose, "pose on an obstacle cell");

  SensorFrame frame;
  frame.robot_id = robot_id;
  frame.pose = pose.normalized();

  // When the fan is too sparse to touch every cell at max range, visibility
  // is limited to cells actually swept by the rays.
  const int rays = std::max(params.ray_count, 1);
  const double gap = params.range_m * params.fov_rad / std::max(rays - 1, 1);
  std::unordered_set<long long> swept;
  const bool use_fan = gap > scene.resolution_m;
  if (use_fan) {
    for (int k = 0; k < rays; ++k) {
      const double ang = frame.pose.theta - params.fov_rad / 2.0 +
                         (rays == 1 ? params.fov_rad / 2.0
                                    : params.fov_rad * k / (rays - 1));
      const double ex = pose.x + params.range_m * std::cos(ang);
      const double ey = pose.y + params.range_m * std::sin(ang);
      const auto cells = segment_cells(pose.x, pose.y, ex, ey, scene.resolution_m,
                                       scene.rows, scene.cols);
      for (const Cell& c : cells) {
        if (!scene.in_bounds(c)) break;
        swept.insert(static_cast<long long>(c.row) * scene.cols + c.col);
        if (scene.is_occupied(c)) break;
      }
    }
  }

  const int reach = static_cast<int>(std::ceil(params.range_m / scene.resolution_m)) + 1;
  const int r_lo = std::max(0, pose_cell.row - reach);
  const int r_hi = std::min(scene.rows - 1, pose_cell.row + reach);
  const int c_lo = std::max(0, pose_cell.col - reach);
  const int c_hi = std::min(scene.cols - 1, pose_cell.col + reach);

  for (int r = r_lo; r <= r_hi; ++r) {
    for (int c = c_lo; c <= c_hi; ++c) {
      const Cell cell{r, c};
      if (cell != pose_cell) {
        const auto [cx, cy] = scene.cell_center(cell);
        const double dx = cx - pose.x;
        const double dy = cy - pose.y;
        if (std::hypot(dx, dy) > params.range_m + 1e-9) continue;
        const double off = std::abs(wrap_to_pi(std::atan2(dy, dx) - frame.pose.theta));
        if (off > params.fov_rad / 2.0 + 1e-9) continue;
        if (use_fan &&
            !swept.count(static_cast<long long>(r) * scene.cols + c))
          continue;
        if (!line_of_sight(scene, frame.pose, cell)) continue;
      }
      VisibleCell vc;
      vc.cell = cell;
      const auto [wx, wy] = scene.cell_center(cell);
      vc.wx = wx;
      vc.wy = wy;
      vc.is_obstacle = scene.is_occupied(cell);
      vc.category = scene.label_at(cell);
      if (rng && vc.category != kNoCategory && params.label_dropout > 0.0) {
        if (std::uniform_real_distribution<double>(0.0, 1.0)(*rng) < params.label_dropout)
          vc.category = kNoCategory;
      }
      if (rng && params.false_label_rate > 0.0) {
        if (std::uniform_real_distribution<double>(0.0, 1.0)(*rng) < params.false_label_rate)
          vc.category = static_cast<std::int16_t>(
              std::uniform_int_distribution<int>(0, category_count() - 1)(*rng));
      }
      frame.cells.push_back(vc);
    }
  }
  return frame;
}

}  // namespace mrnav::sim
