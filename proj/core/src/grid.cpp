#include "mrnav/grid.hpp"

#include <cmath>
#include <string>

#include "mrnav/error.hpp"

namespace mrnav {

int GridSpec::cells_per_side() const {
  return static_cast<int>(std::lround(side_m / resolution_m));
}

void GridSpec::validate() const {
  if (!(resolution_m > 0.0)) throw Error(ErrorKind::Validation, "resolution must be > 0");
  if (!(side_m > 0.0)) throw Error(ErrorKind::Validation, "side must be > 0");
  const double ratio = side_m / resolution_m;
  const double rounded = std::lround(ratio);
  if (rounded < 1.0 || std::abs(ratio - rounded) > 1e-9 * ratio)
    throw Error(ErrorKind::Validation,
                "side/resolution must be a positive integer cell count");
}

namespace {
// The tiny bias keeps points computed to sit exactly on a cell boundary from
// flipping between the two cells under floating-point noise.
inline int axis_cell(double w, double origin, double res, int n) {
  return static_cast<int>(std::floor((w - origin) / res + 1e-9)) + n / 2;
}
}  // namespace

bool in_extent(double wx, double wy, const GridSpec& spec) {
  const int n = spec.cells_per_side();
  const int col = axis_cell(wx, spec.origin_x, spec.resolution_m, n);
  const int row = axis_cell(wy, spec.origin_y, spec.resolution_m, n);
  return row >= 0 && row < n && col >= 0 && col < n;
}

Cell world_to_grid(double wx, double wy, const GridSpec& spec) {
  const int n = spec.cells_per_side();
  const int col = axis_cell(wx, spec.origin_x, spec.resolution_m, n);
  const int row = axis_cell(wy, spec.origin_y, spec.resolution_m, n);
  if (row < 0 || row >= n || col < 0 || col >= n)
    throw Error(ErrorKind::Extent, "point (" + std::to_string(wx) + ", " +
                                       std::to_string(wy) + ") outside grid extent");
  return Cell{row, col};
}

std::pair<double, double> grid_to_world(Cell cell, const GridSpec& spec) {
  const int n = spec.cells_per_side();
  if (cell.row < 0 || cell.row >= n || cell.col < 0 || cell.col >= n)
    throw Error(ErrorKind::Index, "cell (" + std::to_string(cell.row) + ", " +
                                      std::to_string(cell.col) + ") outside grid");
  const double res = spec.resolution_m;
  return {spec.origin_x + (cell.col - n / 2 + 0.5) * res,
          spec.origin_y + (cell.row - n / 2 + 0.5) * res};
}

GridMap::GridMap(const GridSpec& s) : spec(s) {
  spec.validate();
  const std::size_t cells = static_cast<std::size_t>(size()) * size();
  obstacle.assign(cells, 0);
  explored.assign(cells, 0);
  semantic.assign(cells, kNoCategory);
}

bool GridMap::in_bounds(Cell c) const {
  const int n = size();
  return c.row >= 0 && c.row < n && c.col >= 0 && c.col < n;
}

void GridMap::mark_explored(Cell c) {
  if (!in_bounds(c)) throw Error(ErrorKind::Index, "cell outside map");
  explored[index(c)] = 1;
}

void GridMap::mark_obstacle(Cell c) {
  if (!in_bounds(c)) throw Error(ErrorKind::Index, "cell outside map");
  obstacle[index(c)] = 1;
  explored[index(c)] = 1;
}

void GridMap::set_semantic(Cell c, std::int16_t category) {
  if (!in_bounds(c)) throw Error(ErrorKind::Index, "cell outside map");
  semantic[index(c)] = category;
  explored[index(c)] = 1;
}

void GridMap::validate() const {
  const std::size_t cells = static_cast<std::size_t>(size()) * size();
  if (obstacle.size() != cells || explored.size() != cells || semantic.size() != cells)
    throw Error(ErrorKind::Validation, "channel dimensions disagree with spec");
  for (std::size_t i = 0; i < cells; ++i) {
    if (obstacle[i] && !explored[i])
      throw Error(ErrorKind::Validation, "obstacle cell not marked explored");
    if (semantic[i] != kNoCategory && !explored[i])
      throw Error(ErrorKind::Validation, "semantic label on unexplored cell");
  }
}

std::vector<std::uint8_t> dilate_chebyshev(const std::vector<std::uint8_t>& in,
                                           int rows, int cols, int radius) {
  std::vector<std::uint8_t> cur = in;
  std::vector<std::uint8_t> next(in.size());
  for (int pass = 0; pass < radius; ++pass) {
    for (int r = 0; r < rows; ++r) {
      for (int c = 0; c < cols; ++c) {
        std::uint8_t v = 0;
        for (int dr = -1; dr <= 1 && !v; ++dr) {
          const int rr = r + dr;
          if (rr < 0 || rr >= rows) continue;
          for (int dc = -1; dc <= 1; ++dc) {
            const int cc = c + dc;
            if (cc < 0 || cc >= cols) continue;
            if (cur[rr * cols + cc]) { v = 1; break; }
          }
        }
        next[r * cols + c] = v;
      }
    }
    cur.swap(next);
  }
  return cur;
}

}  // namespace mrnav
