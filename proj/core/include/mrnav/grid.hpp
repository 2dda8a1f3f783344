#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "mrnav/types.hpp"

namespace mrnav {

struct Cell {
  int row = 0;
  int col = 0;

  friend bool operator==(const Cell&, const Cell&) = default;
  friend auto operator<=>(const Cell&, const Cell&) = default;
};

/// Square metric grid. origin is the world coordinate of the grid centre;
/// row grows with +y, col with +x. Cell (r,c) covers the half-open square
/// [origin + (c - n/2)*res, origin + (c - n/2 + 1)*res) per axis.
struct GridSpec {
  double side_m = 24.0;
  double resolution_m = 0.05;
  double origin_x = 0.0;
  double origin_y = 0.0;

  int cells_per_side() const;
  void validate() const;  // throws Error{Validation}

  friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

bool in_extent(double wx, double wy, const GridSpec& spec);

/// Maps a world point to the cell containing it. Throws Error{Extent}
/// when the point falls outside the grid.
Cell world_to_grid(double wx, double wy, const GridSpec& spec);

/// World coordinates of a cell centre. Throws Error{Index} on bad cells.
std::pair<double, double> grid_to_world(Cell cell, const GridSpec& spec);

/// Two-channel exploration map plus a per-cell semantic label layer.
/// Mutators keep obstacle ⊆ explored and semantic ⊆ explored.
struct GridMap {
  GridSpec spec;
  std::vector<std::uint8_t> obstacle;
  std::vector<std::uint8_t> explored;
  std::vector<std::int16_t> semantic;

  explicit GridMap(const GridSpec& s);

  int size() const { return spec.cells_per_side(); }
  int index(Cell c) const { return c.row * size() + c.col; }
  bool in_bounds(Cell c) const;

  bool is_obstacle(Cell c) const { return obstacle[index(c)] != 0; }
  bool is_explored(Cell c) const { return explored[index(c)] != 0; }
  std::int16_t semantic_at(Cell c) const { return semantic[index(c)]; }

  void mark_explored(Cell c);
  void mark_obstacle(Cell c);                       // implies explored
  void set_semantic(Cell c, std::int16_t category); // implies explored

  void validate() const;  // throws Error{Validation} when the invariants fail
};

/// Chebyshev (square structuring element) binary dilation by `radius` cells.
std::vector<std::uint8_t> dilate_chebyshev(const std::vector<std::uint8_t>& in,
                                           int rows, int cols, int radius);

}  // namespace mrnav
