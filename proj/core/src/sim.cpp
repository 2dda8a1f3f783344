#include <cmath>

#include "mrnav/error.hpp"
#include "mrnav/local_policy.hpp"
#include "mrnav/sim.hpp"

namespace mrnav::sim {

Pose step(const Scene& scene, const Pose& pose, Action action) {
  Pose next = pose.normalized();
  switch (action) {
    case Action::TurnLeft:
      next.theta = normalize_angle(next.theta + kTurnStepRadians);
      return next;
    case Action::TurnRight:
      next.theta = normalize_angle(next.theta - kTurnStepRadians);
      return next;
    case Action::LookUp:
    case Action::LookDown:
    case Action::Stop:
      return next;
    case Action::MoveForward:
      break;
  }

  const double dx = kForwardStepMeters * std::cos(next.theta);
  const double dy = kForwardStepMeters * std::sin(next.theta);
  const double tx = next.x + dx;
  const double ty = next.y + dy;
  if (!scene.contains(tx, ty)) return next;  // map edge blocks like a wall

  const auto swept = segment_cells(next.x, next.y, tx, ty, scene.resolution_m,
                                   scene.rows, scene.cols);
  for (const Cell& c : swept) {
    if (!scene.in_bounds(c) || scene.is_occupied(c)) return next;
  }
  next.x = tx;
  next.y = ty;
  return next;
}

double geodesic_distance(const Scene& scene, double ax, double ay, double bx,
                         double by) {
  if (!scene.contains(ax, ay) || !scene.contains(bx, by))
    throw Error(ErrorKind::InvalidPoint, "point outside scene");
  const Cell a = scene.cell_at(ax, ay);
  const Cell b = scene.cell_at(bx, by);
  if (scene.is_occupied(a) || scene.is_occupied(b))
    throw Error(ErrorKind::InvalidPoint, "point on an obstacle cell");
  if (a == b) return 0.0;
  const auto field = local_policy::fmm_field(scene.free_mask(), scene.rows,
                                             scene.cols, scene.resolution_m, a);
  return field.at(b);
}

}  // namespace mrnav::sim
