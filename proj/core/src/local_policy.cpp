#include "mrnav/local_policy.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <string>

#include "mrnav/error.hpp"

namespace mrnav::local_policy {

namespace {

const double kSqrt2 = std::sqrt(2.0);

constexpr int kAxisDr[4] = {-1, 1, 0, 0};
constexpr int kAxisDc[4] = {0, 0, -1, 1};
constexpr int kDiagDr[4] = {-1, -1, 1, 1};
constexpr int kDiagDc[4] = {-1, 1, -1, 1};

struct Band {
  double t;
  int idx;
  bool operator>(const Band& o) const { return t > o.t; }
};

// Solver update: min of the two-axis quadratic and the diagonal relaxations,
// evaluated over frozen neighbors only.
double update_cell(const std::vector<double>& t, const std::vector<char>& frozen,
                   const std::vector<std::uint8_t>& traversable, int rows,
                   int cols, int r, int c, double h) {
  auto value = [&](int rr, int cc) -> double {
    if (rr < 0 || rr >= rows || cc < 0 || cc >= cols) return kUnreachable;
    const int i = rr * cols + cc;
    if (!traversable[i] || !frozen[i]) return kUnreachable;
    return t[i];
  };

  const double a = std::min(value(r, c - 1), value(r, c + 1));
  const double b = std::min(value(r - 1, c), value(r + 1, c));

  double best = kUnreachable;
  if (a < kUnreachable || b < kUnreachable) {
    if (a == kUnreachable || b == kUnreachable || std::abs(a - b) >= h) {
      best = std::min(a, b) + h;
    } else {
      const double d = a - b;
      best = 0.5 * (a + b + std::sqrt(2.0 * h * h - d * d));
    }
  }
  for (int k = 0; k < 4; ++k) {
    const double v = value(r + kDiagDr[k], c + kDiagDc[k]);
    if (v < kUnreachable) best = std::min(best, v + kSqrt2 * h);
  }
  return best;
}

}  // namespace

DistanceField fmm_field_multi(const std::vector<std::uint8_t>& traversable,
                              int rows, int cols, double cell_size_m,
                              const std::vector<Cell>& sources) {
  if (rows <= 0 || cols <= 0 || cell_size_m <= 0.0)
    throw Error(ErrorKind::Argument, "bad field dimensions");
  if (traversable.size() != static_cast<std::size_t>(rows) * cols)
    throw Error(ErrorKind::Argument, "mask size disagrees with dimensions");
  if (sources.empty()) throw Error(ErrorKind::InvalidSource, "no sources");

  DistanceField field;
  field.rows = rows;
  field.cols = cols;
  field.cell_size_m = cell_size_m;
  field.sources = sources;
  field.time_m.assign(traversable.size(), kUnreachable);

  std::vector<char> frozen(traversable.size(), 0);
  std::priority_queue<Band, std::vector<Band>, std::greater<Band>> heap;

  for (const Cell& s : sources) {
    if (!field.in_bounds(s) || !traversable[field.index(s)])
      throw Error(ErrorKind::InvalidSource,
                  "source (" + std::to_string(s.row) + ", " + std::to_string(s.col) +
                      ") not traversable");
    field.time_m[field.index(s)] = 0.0;
    heap.push({0.0, field.index(s)});
  }

  const double h = cell_size_m;
  while (!heap.empty()) {
    const Band top = heap.top();
    heap.pop();
    if (frozen[top.idx]) continue;
    frozen[top.idx] = 1;
    const int r = top.idx / cols;
    const int c = top.idx % cols;

    // Relax the full 8-neighborhood: axis neighbors through the quadratic,
    // diagonal neighbors through the one-point term.
    for (int dr = -1; dr <= 1; ++dr) {
      for (int dc = -1; dc <= 1; ++dc) {
        if (dr == 0 && dc == 0) continue;
        const int rr = r + dr;
        const int cc = c + dc;
        if (rr < 0 || rr >= rows || cc < 0 || cc >= cols) continue;
        const int i = rr * cols + cc;
        if (!traversable[i] || frozen[i]) continue;
        const double cand = update_cell(field.time_m, frozen, traversable, rows,
                                        cols, rr, cc, h);
        if (cand < field.time_m[i]) {
          field.time_m[i] = cand;
          heap.push({cand, i});
        }
      }
    }
  }
  return field;
}

DistanceField fmm_field(const std::vector<std::uint8_t>& traversable, int rows,
                        int cols, double cell_size_m, Cell source) {
  return fmm_field_multi(traversable, rows, cols, cell_size_m, {source});
}

std::vector<Cell> extract_path(const DistanceField& field, Cell goal) {
  if (!field.in_bounds(goal)) throw Error(ErrorKind::Index, "goal outside field");
  if (!field.reachable(goal)) throw Error(ErrorKind::Unreachable, "goal has no finite arrival time");

  std::vector<Cell> reversed;
  Cell cur = goal;
  reversed.push_back(cur);
  // Strict decrease holds because every finite cell was relaxed from a
  // strictly smaller neighbor; the walk therefore reaches a zero cell.
  while (field.at(cur) > 0.0) {
    Cell best = cur;
    double best_t = field.at(cur);
    for (int dr = -1; dr <= 1; ++dr) {
      for (int dc = -1; dc <= 1; ++dc) {
        if (dr == 0 && dc == 0) continue;
        const Cell n{cur.row + dr, cur.col + dc};
        if (!field.in_bounds(n)) continue;
        const double t = field.at(n);
        if (t < best_t) {
          best_t = t;
          best = n;
        }
      }
    }
    if (best == cur)
      throw Error(ErrorKind::Data, "descent stalled on a non-source cell");
    cur = best;
    reversed.push_back(cur);
  }
  std::reverse(reversed.begin(), reversed.end());
  return reversed;
}

Cell select_local_goal(const std::vector<Cell>& path, double lookahead_m,
                       double cell_size_m) {
  if (path.empty()) throw Error(ErrorKind::Argument, "empty path");
  if (path.size() == 1) return path.front();

  std::size_t pick = 1;  // never the robot's own cell when the path continues
  double dist = 0.0;
  for (std::size_t i = 1; i < path.size(); ++i) {
    const double dr = path[i].row - path[i - 1].row;
    const double dc = path[i].col - path[i - 1].col;
    dist += std::hypot(dr, dc) * cell_size_m;
    if (dist <= lookahead_m + 1e-12)
      pick = i;
    else
      break;
  }
  return path[pick];
}

Action select_action(const Pose& pose, double goal_x, double goal_y,
                     bool target_within_radius, double heading_tolerance_rad) {
  if (target_within_radius) return Action::Stop;
  const double dx = goal_x - pose.x;
  const double dy = goal_y - pose.y;
  if (std::hypot(dx, dy) < 1e-9) return Action::MoveForward;
  const double err = wrap_to_pi(std::atan2(dy, dx) - pose.theta);
  if (err > heading_tolerance_rad) return Action::TurnLeft;
  if (err < -heading_tolerance_rad) return Action::TurnRight;
  return Action::MoveForward;
}

std::optional<Cell> nearest_traversable(const std::vector<std::uint8_t>& traversable,
                                        int rows, int cols, Cell from,
                                        int max_radius_cells) {
  if (from.row < 0 || from.row >= rows || from.col < 0 || from.col >= cols)
    return std::nullopt;
  if (traversable[from.row * cols + from.col]) return from;
  for (int rad = 1; rad <= max_radius_cells; ++rad) {
    for (int dr = -rad; dr <= rad; ++dr) {
      for (int dc = -rad; dc <= rad; ++dc) {
        if (std::max(std::abs(dr), std::abs(dc)) != rad) continue;
        const int rr = from.row + dr;
        const int cc = from.col + dc;
        if (rr < 0 || rr >= rows || cc < 0 || cc >= cols) continue;
        if (traversable[rr * cols + cc]) return Cell{rr, cc};
      }
    }
  }
  return std::nullopt;
}

}  // namespace mrnav::local_policy
