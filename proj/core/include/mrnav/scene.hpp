#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "mrnav/grid.hpp"
#include "mrnav/types.hpp"

namespace mrnav::sim {

struct SceneObject {
  std::int16_t category = kNoCategory;
  std::vector<Cell> cells;
};

/// Static grid world. The scene grid is centred on the world origin: cell
/// (r,c) covers [ (c - cols/2)*res, (c - cols/2 + 1)*res ) × same for rows,
/// row growing with +y. Immutable after load.
struct Scene {
  std::string id;
  int rows = 0;
  int cols = 0;
  double resolution_m = 0.05;
  std::vector<std::uint8_t> occupied;
  std::vector<SceneObject> objects;
  std::vector<std::int16_t> label;  // per-cell category, kNoCategory when none

  int index(Cell c) const { return c.row * cols + c.col; }
  bool in_bounds(Cell c) const {
    return c.row >= 0 && c.row < rows && c.col >= 0 && c.col < cols;
  }
  bool is_occupied(Cell c) const { return occupied[index(c)] != 0; }
  std::int16_t label_at(Cell c) const { return label[index(c)]; }

  bool contains(double wx, double wy) const;
  /// Cell containing a world point; throws Error{Extent} outside the grid.
  Cell cell_at(double wx, double wy) const;
  std::pair<double, double> cell_center(Cell c) const;

  /// Free (traversable) mask: 1 where not occupied.
  std::vector<std::uint8_t> free_mask() const;

  void validate() const;  // throws Error{Validation}
};

/// Parses the scene text format: a JSON object
///   {"id": str, "resolution": number,
///    "grid": ["#..#", ...],            '#' obstacle, '.' free
///    "objects": [{"category": str, "cells": [[r,c], ...]}, ...]}
/// Rows must all have equal length; categories must come from the fixed
/// registry; at least one free cell must exist.
/// Throws Error{Parse} on grammar violations, Error{Validation} on semantic
/// ones.
Scene load_scene(const std::string& text);
Scene load_scene_file(const std::string& path);  // throws Error{Io} too

std::string scene_to_json(const Scene& scene);

}  // namespace mrnav::sim
