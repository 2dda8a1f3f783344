#include "mrnav/mapping.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <queue>
#include <string>

#include "mrnav/error.hpp"

namespace mrnav::mapping {

LocalMap::LocalMap(int robot_id, const GridSpec& spec) : robot_id_(robot_id), spec_(spec) {
  spec_.validate();
}

std::uint32_t LocalMap::observation_count(Cell c) const {
  const auto it = cells_.find(c.row * spec_.cells_per_side() + c.col);
  return it == cells_.end() ? 0 : it->second.count;
}

namespace {

std::int16_t majority_label(const std::map<std::int16_t, std::uint32_t>& counts) {
  std::int16_t best = kNoCategory;
  std::uint32_t best_count = 0;
  for (const auto& [label, count] : counts) {
    if (count > best_count) {  // map order makes ties pick the lowest label id
      best = label;
      best_count = count;
    }
  }
  return best;
}

}  // namespace

SemanticPointCloud LocalMap::cloud() const {
  std::vector<std::pair<int, const CellObs*>> ordered;
  ordered.reserve(cells_.size());
  for (const auto& [idx, obs] : cells_) ordered.emplace_back(idx, &obs);
  std::sort(ordered.begin(), ordered.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });

  const int n = spec_.cells_per_side();
  SemanticPointCloud cloud;
  cloud.points.reserve(ordered.size());
  for (const auto& [idx, obs] : ordered) {
    const auto [wx, wy] = grid_to_world(Cell{idx / n, idx % n}, spec_);
    CloudPoint p;
    p.x = wx;
    p.y = wy;
    p.z = obs->obstacle ? kObstaclePointHeight : 0.0;
    p.category = majority_label(obs->label_counts);
    p.robot = static_cast<std::int16_t>(robot_id_);
    cloud.points.push_back(p);
  }
  return cloud;
}

void integrate_frame(LocalMap& local, const sim::SensorFrame& frame) {
  if (frame.robot_id != local.robot_id_)
    throw Error(ErrorKind::Ownership,
                "frame from robot " + std::to_string(frame.robot_id) +
                    " integrated into map of robot " + std::to_string(local.robot_id_));
  const int n = local.spec_.cells_per_side();
  for (const auto& vc : frame.cells) {
    // Visible cells beyond the map extent cannot be stored and are dropped.
    if (!in_extent(vc.wx, vc.wy, local.spec_)) continue;
    const Cell c = world_to_grid(vc.wx, vc.wy, local.spec_);
    LocalMap::CellObs& obs = local.cells_[c.row * n + c.col];
    obs.obstacle = obs.obstacle || vc.is_obstacle;
    obs.count += 1;
    if (vc.category != kNoCategory) obs.label_counts[vc.category] += 1;
  }
}

SemanticPointCloud merge_global(const std::vector<LocalMap>& locals) {
  SemanticPointCloud out;
  if (locals.empty()) return out;
  const GridSpec& spec = locals.front().spec();
  for (const auto& lm : locals)
    if (!(lm.spec() == spec))
      throw Error(ErrorKind::FrameMismatch, "local maps disagree on grid spec");

  struct Merged {
    bool obstacle = false;
    int min_robot = std::numeric_limits<int>::max();
    // label -> (total count, lowest robot id claiming it)
    std::map<std::int16_t, std::pair<std::uint32_t, int>> labels;
  };
  std::map<int, Merged> merged;
  for (const auto& lm : locals) {
    for (const auto& [idx, obs] : lm.cells()) {
      Merged& m = merged[idx];
      m.obstacle = m.obstacle || obs.obstacle;
      m.min_robot = std::min(m.min_robot, lm.robot_id());
      for (const auto& [label, count] : obs.label_counts) {
        auto& slot = m.labels[label];
        if (slot.first == 0) slot.second = lm.robot_id();
        slot.first += count;
        slot.second = std::min(slot.second, lm.robot_id());
      }
    }
  }

  const int n = spec.cells_per_side();
  out.points.reserve(merged.size());
  for (const auto& [idx, m] : merged) {
    std::int16_t best = kNoCategory;
    std::uint32_t best_count = 0;
    int best_robot = std::numeric_limits<int>::max();
    for (const auto& [label, slot] : m.labels) {
      const auto [count, robot] = slot;
      if (count > best_count || (count == best_count && robot < best_robot)) {
        best = label;
        best_count = count;
        best_robot = robot;
      }
    }
    const auto [wx, wy] = grid_to_world(Cell{idx / n, idx % n}, spec);
    CloudPoint p;
    p.x = wx;
    p.y = wy;
    p.z = m.obstacle ? kObstaclePointHeight : 0.0;
    p.category = best;
    p.robot = static_cast<std::int16_t>(m.min_robot);
    out.points.push_back(p);
  }
  return out;
}

SemanticPointCloud dbscan_filter(const SemanticPointCloud& cloud, double eps_m,
                                 int min_pts) {
  if (!(eps_m > 0.0)) throw Error(ErrorKind::Argument, "eps must be > 0");
  if (min_pts < 1) throw Error(ErrorKind::Argument, "min_pts must be >= 1");
  const std::size_t n = cloud.points.size();
  if (n == 0) return cloud;

  // Bucket grid of side eps: neighbors live in the 27 surrounding buckets.
  auto bucket_key = [&](const CloudPoint& p) {
    const long long bx = static_cast<long long>(std::floor(p.x / eps_m));
    const long long by = static_cast<long long>(std::floor(p.y / eps_m));
    const long long bz = static_cast<long long>(std::floor(p.z / eps_m));
    return (bx * 73856093LL) ^ (by * 19349663LL) ^ (bz * 83492791LL);
  };
  std::unordered_map<long long, std::vector<int>> buckets;
  for (std::size_t i = 0; i < n; ++i)
    buckets[bucket_key(cloud.points[i])].push_back(static_cast<int>(i));

  const double eps2 = eps_m * eps_m;
  auto neighbors = [&](int i) {
    std::vector<int> out;
    const CloudPoint& p = cloud.points[i];
    for (int dx = -1; dx <= 1; ++dx) {
      for (int dy = -1; dy <= 1; ++dy) {
        for (int dz = -1; dz <= 1; ++dz) {
          CloudPoint probe = p;
          probe.x += dx * eps_m;
          probe.y += dy * eps_m;
          probe.z += dz * eps_m;
          const auto it = buckets.find(bucket_key(probe));
          if (it == buckets.end()) continue;
          for (int j : it->second) {
            const CloudPoint& q = cloud.points[j];
            const double d2 = (p.x - q.x) * (p.x - q.x) + (p.y - q.y) * (p.y - q.y) +
                              (p.z - q.z) * (p.z - q.z);
            if (d2 <= eps2) out.push_back(j);
          }
        }
      }
    }
    return out;
  };

  // Core points have >= min_pts neighbors (self included); clustered points
  // are cores plus anything within eps of a core.
  std::vector<char> core(n, 0);
  for (std::size_t i = 0; i < n; ++i)
    if (static_cast<int>(neighbors(static_cast<int>(i)).size()) >= min_pts) core[i] = 1;

  std::vector<char> keep(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    if (core[i]) {
      keep[i] = 1;
      for (int j : neighbors(static_cast<int>(i))) keep[j] = 1;
    }
  }

  SemanticPointCloud out;
  for (std::size_t i = 0; i < n; ++i)
    if (keep[i]) out.points.push_back(cloud.points[i]);
  return out;
}

GridMap project_2d(const SemanticPointCloud& cloud, const GridSpec& spec) {
  GridMap map(spec);
  const int n = map.size();
  std::vector<double> label_height(static_cast<std::size_t>(n) * n,
                                   -std::numeric_limits<double>::infinity());
  for (const CloudPoint& p : cloud.points) {
    const Cell c = world_to_grid(p.x, p.y, spec);  // throws Extent when outside
    map.mark_explored(c);
    if (p.z > kFloorThresholdM) map.mark_obstacle(c);
    if (p.category != kNoCategory && p.z >= label_height[map.index(c)]) {
      label_height[map.index(c)] = p.z;
      map.set_semantic(c, p.category);
    }
  }
  return map;
}

void dump_cloud(const SemanticPointCloud& cloud, std::ostream& out) {
  for (const CloudPoint& p : cloud.points) {
    out << p.x << ' ' << p.y << ' ' << p.z << ' ' << p.category << ' ' << p.robot
        << '\n';
  }
}

}  // namespace mrnav::mapping
