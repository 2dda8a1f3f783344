#pragma once

#include <vector>

#include "mrnav/grid.hpp"

namespace mrnav::frontier {

struct FrontierParams {
  int dilation_radius_cells = 3;
  int min_cluster_size = 10;
};

struct FrontierCluster {
  int id = 0;
  std::vector<Cell> cells;  // 8-connected, sorted by cell index
  int size = 0;             // |cells|
  Cell representative;      // member nearest the centroid
};

/// Frontier cells are explored free cells 8-adjacent to an unexplored cell
/// and outside the obstacle edge dilated by the Chebyshev radius; cells
/// beyond the map border do not count as unexplored. Cells are grouped into
/// 8-connected clusters, clusters below the minimum size are dropped, and
/// ids run 0..k-1 in decreasing size order (ties by lowest member index).
/// A fully explored map yields an empty list.
std::vector<FrontierCluster> extract_frontiers(const GridMap& map,
                                               const FrontierParams& params = {});

/// Member cell nearest the cluster centroid (Euclidean over grid
/// coordinates), ties by smallest (row, col). Throws Error{Argument} when
/// the set is empty.
Cell representative_cell(const std::vector<Cell>& cells);

}  // namespace mrnav::frontier
