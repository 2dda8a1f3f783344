#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <unordered_map>
#include <vector>

#include "mrnav/grid.hpp"
#include "mrnav/sim.hpp"
#include "mrnav/types.hpp"

namespace mrnav::mapping {

/// Height assigned to obstacle points in the synthetic back-projection.
inline constexpr double kObstaclePointHeight = 1.0;
/// Points above this height land on the obstacle channel.
inline constexpr double kFloorThresholdM = 0.2;

inline constexpr double kDefaultDbscanEpsM = 0.15;
inline constexpr int kDefaultDbscanMinPts = 4;

/// Per-robot accumulated map. Points are voxel-deduplicated at one point per
/// grid cell per height band; label observations are counted per cell so the
/// exported cloud carries each cell's majority label.
class LocalMap {
 public:
  LocalMap(int robot_id, const GridSpec& spec);

  int robot_id() const { return robot_id_; }
  const GridSpec& spec() const { return spec_; }

  std::uint32_t observation_count(Cell c) const;
  std::size_t observed_cells() const { return cells_.size(); }

  /// Deduplicated point cloud in deterministic (cell-index) order.
  SemanticPointCloud cloud() const;

  struct CellObs {
    bool obstacle = false;
    std::uint32_t count = 0;
    std::map<std::int16_t, std::uint32_t> label_counts;
  };
  const std::unordered_map<int, CellObs>& cells() const { return cells_; }

 private:
  friend void integrate_frame(LocalMap&, const sim::SensorFrame&);
  int robot_id_;
  GridSpec spec_;
  std::unordered_map<int, CellObs> cells_;
};

/// Folds one sensor frame into the owner's map: one point per visible cell at
/// the cell centre (z = 0 floor, z = 1 obstacle), labels counted, observation
/// counts incremented. Throws Error{Ownership} when the frame belongs to a
/// different robot, Error{Extent} when a visible cell falls off the map grid.
void integrate_frame(LocalMap& local, const sim::SensorFrame& frame);

/// Union of all local maps in one global frame, voxel-deduplicated. Label
/// conflicts resolve by highest total observation count, ties by the lowest
/// robot id claiming the label, then by lowest label id; the merged point
/// carries the lowest robot id that observed the cell. Order-independent.
/// Throws Error{FrameMismatch} when the specs disagree.
SemanticPointCloud merge_global(const std::vector<LocalMap>& locals);

/// Standard DBSCAN noise removal: points in no cluster (by the usual
/// core/border definitions, 3D Euclidean metric) are dropped, clusters pass
/// through intact and in input order. Throws Error{Argument} on bad params.
SemanticPointCloud dbscan_filter(const SemanticPointCloud& cloud, double eps_m,
                                 int min_pts);

/// Top-down projection: every point marks its cell explored, points above
/// the floor threshold mark it obstacle, labeled points write the semantic
/// layer (highest point wins, later points win ties). Throws Error{Extent}
/// for points outside the grid.
GridMap project_2d(const SemanticPointCloud& cloud, const GridSpec& spec);

/// Debug dump, one `x y z category robot_id` line per point.
void dump_cloud(const SemanticPointCloud& cloud, std::ostream& out);

}  // namespace mrnav::mapping
