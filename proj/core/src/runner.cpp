#include "mrnav/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <future>
#include <sstream>

#include <json.hpp>

#include "mrnav/error.hpp"
#include "mrnav/local_policy.hpp"
#include "mrnav/mapping.hpp"

namespace mrnav::runner {

using nlohmann::json;

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

void apply_frame(GridMap& map, const sim::SensorFrame& frame,
                 std::int16_t target_id, std::vector<Cell>& target_cells) {
  for (const auto& vc : frame.cells) {
    if (!in_extent(vc.wx, vc.wy, map.spec)) continue;
    const Cell c = world_to_grid(vc.wx, vc.wy, map.spec);
    if (vc.is_obstacle)
      map.mark_obstacle(c);
    else
      map.mark_explored(c);
    if (vc.category != kNoCategory) {
      map.set_semantic(c, vc.category);
      if (vc.category == target_id) target_cells.push_back(c);
    }
  }
}

std::vector<Cell> collect_target_cells(const GridMap& map, std::int16_t target_id) {
  std::vector<Cell> cells;
  const int n = map.size();
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c)
      if (map.semantic[r * n + c] == target_id) cells.push_back(Cell{r, c});
  return cells;
}

struct RobotState {
  Pose pose;
  mapping::LocalMap local;
  GridMap working;
  std::vector<Cell> target_cells;  // target-labeled cells of the working map
  bool frozen = false;
  double traj_len = 0.0;
  std::mt19937_64 noise_rng;
};

// Distance from the pose to the nearest known target cell centre, plus that
// cell; infinity when no target has been mapped yet.
std::pair<double, const Cell*> nearest_target(const RobotState& robot,
                                              const GridSpec& spec) {
  double best = std::numeric_limits<double>::infinity();
  const Cell* best_cell = nullptr;
  for (const Cell& c : robot.target_cells) {
    const auto [wx, wy] = grid_to_world(c, spec);
    const double d = std::hypot(wx - robot.pose.x, wy - robot.pose.y);
    if (d < best) {
      best = d;
      best_cell = &c;
    }
  }
  return {best, best_cell};
}

}  // namespace

EpisodeRecord run_episode(const sim::Scene& scene, const EpisodeConfig& config,
                          const EpisodeOptions& options, std::uint64_t seed) {
  const auto started = std::chrono::steady_clock::now();
  config.validate();
  if (options.planner == planners::PolicyTag::Vlm && !options.vlm_client)
    throw Error(ErrorKind::Validation, "vlm planner requires a client");

  EpisodeRecord record;
  record.config = config;
  record.planner = std::string(planners::to_string(options.planner));
  record.seed = seed;
  record.config_fingerprint = fingerprint_options(options);

  const std::int16_t target_id = *category_id(config.target_category);
  GridSpec spec;
  spec.side_m = config.map_side_m;
  spec.resolution_m = scene.resolution_m;
  // Anchor the map at the start position, snapped to the scene lattice so
  // scene cell centres land mid-cell on the map grid.
  spec.origin_x = std::round(config.start_x / spec.resolution_m) * spec.resolution_m;
  spec.origin_y = std::round(config.start_y / spec.resolution_m) * spec.resolution_m;
  spec.validate();

  const int n_robots = config.robot_count;
  std::vector<RobotState> robots;
  robots.reserve(n_robots);
  for (int i = 0; i < n_robots; ++i) {
    RobotState rs{Pose{config.start_x, config.start_y,
                       normalize_angle(i * kTwoPi / n_robots)},
                  mapping::LocalMap(i, spec), GridMap(spec), {}, false, 0.0,
                  std::mt19937_64(splitmix64(seed ^ (0xA11CE + i)))};
    robots.push_back(std::move(rs));
  }
  record.trajectories.assign(n_robots, {});
  record.actions.assign(n_robots, {});
  for (int i = 0; i < n_robots; ++i) record.trajectories[i].push_back(robots[i].pose);

  // Ground-truth target instances for stop validation.
  std::vector<const sim::SceneObject*> instances;
  for (const auto& obj : scene.objects)
    if (obj.category == target_id) instances.push_back(&obj);
  record.target_absent = instances.empty();

  auto true_target_distance = [&](const Pose& pose) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto* obj : instances) {
      for (const Cell& c : obj->cells) {
        const auto [wx, wy] = scene.cell_center(c);
        best = std::min(best, std::hypot(wx - pose.x, wy - pose.y));
      }
    }
    return best;
  };

  SemanticPointCloud merged;
  GridMap global_map(spec);
  std::vector<planners::RobotGoal> goals(n_robots);
  bool have_goals = false;

  const int snap_cells = static_cast<int>(
      std::ceil(options.local.goal_snap_radius_m / spec.resolution_m));
  const double heading_tol = options.local.heading_tolerance_deg * kPi / 180.0;

  bool done = false;
  int steps_taken = 0;
  for (int t = 0; t < config.max_steps && !done; ++t) {
    if (options.wall_budget_ms > 0.0) {
      const double elapsed = std::chrono::duration<double, std::milli>(
                                 std::chrono::steady_clock::now() - started)
                                 .count();
      if (elapsed > options.wall_budget_ms) {
        record.termination = "wall_budget";
        break;
      }
    }
    steps_taken = t + 1;

    // Sense and integrate for every active robot.
    std::vector<std::optional<sim::SensorFrame>> frames(n_robots);
    for (int i = 0; i < n_robots; ++i) {
      if (robots[i].frozen) continue;
      frames[i] = sim::sense(scene, robots[i].pose, options.sensor, i,
                             &robots[i].noise_rng);
      mapping::integrate_frame(robots[i].local, *frames[i]);
    }

    if (t % config.global_period == 0) {
      std::vector<mapping::LocalMap> locals;
      locals.reserve(n_robots);
      for (const auto& rs : robots) locals.push_back(rs.local);
      merged = mapping::dbscan_filter(mapping::merge_global(locals),
                                      options.dbscan_eps_m, options.dbscan_min_pts);
      global_map = mapping::project_2d(merged, spec);
      const auto frontiers = frontier::extract_frontiers(global_map, options.frontier);

      planners::PlannerInput input;
      input.map = &global_map;
      input.cloud = &merged;
      for (const auto& rs : robots) input.robot_poses.push_back(rs.pose);
      input.frontiers = frontiers;
      input.target_category = config.target_category;
      input.step_index = t;
      input.fallback_seed = splitmix64(seed ^ (0xF00DULL + t));
      input.plan_dilation_cells = options.local.plan_dilation_cells;

      planners::Assignment assignment;
      switch (options.planner) {
        case planners::PolicyTag::Greedy:
          assignment = planners::assign_greedy(input);
          break;
        case planners::PolicyTag::CostUtility:
          assignment = planners::assign_cost_utility(input, options.lambda_cu);
          break;
        case planners::PolicyTag::Random:
          assignment = planners::assign_random(
              input, splitmix64(seed ^ (0x5EEDULL + 31 * t)));
          break;
        case planners::PolicyTag::Vlm:
          assignment = planners::assign_vlm(input, *options.vlm_client, options.vlm);
          break;
      }
      goals = assignment.goals;
      have_goals = true;

      GoalProvenance prov;
      prov.step = t;
      prov.policy = assignment.policy;
      prov.fallback = assignment.fallback_used;
      prov.reason = assignment.fallback_reason;
      prov.goals = assignment.goals;
      record.provenance.push_back(std::move(prov));

      for (auto& rs : robots) {
        rs.working = global_map;
        rs.target_cells = collect_target_cells(global_map, target_id);
      }
    } else {
      for (int i = 0; i < n_robots; ++i)
        if (frames[i])
          apply_frame(robots[i].working, *frames[i], target_id,
                      robots[i].target_cells);
    }

    // Local policy and dynamics, robots in id order.
    for (int i = 0; i < n_robots && !done; ++i) {
      RobotState& rs = robots[i];
      if (rs.frozen) continue;

      const auto [target_dist, target_cell] = nearest_target(rs, spec);
      const bool stop_now = target_dist <= config.success_radius_m;

      Action action = Action::LookUp;  // idle fallback: a pose no-op
      if (stop_now) {
        action = Action::Stop;
      } else {
        // Mapped targets override the assigned goal; otherwise head for the
        // frontier or fallback cell from the last global step.
        std::optional<Cell> goal;
        if (target_cell)
          goal = *target_cell;
        else if (have_goals)
          goal = goals[i].cell;

        if (goal) {
          const int n = rs.working.size();
          const auto blocked = dilate_chebyshev(rs.working.obstacle, n, n,
                                                options.local.plan_dilation_cells);
          std::vector<std::uint8_t> traversable(blocked.size(), 0);
          for (std::size_t k = 0; k < blocked.size(); ++k)
            traversable[k] = (rs.working.explored[k] && !blocked[k]) ? 1 : 0;

          const Cell pose_cell = world_to_grid(rs.pose.x, rs.pose.y, spec);
          const auto source = local_policy::nearest_traversable(
              traversable, n, n, pose_cell, snap_cells);
          const auto snapped_goal = local_policy::nearest_traversable(
              traversable, n, n, *goal, snap_cells);
          if (source && snapped_goal) {
            const auto field = local_policy::fmm_field(traversable, n, n,
                                                       spec.resolution_m, *source);
            if (field.reachable(*snapped_goal)) {
              const auto path = local_policy::extract_path(field, *snapped_goal);
              const Cell local_goal = local_policy::select_local_goal(
                  path, options.local.lookahead_m, spec.resolution_m);
              const auto [gx, gy] = grid_to_world(local_goal, spec);
              action = local_policy::select_action(rs.pose, gx, gy, false, heading_tol);
            }
          }
        }
      }

      rs.pose = sim::step(scene, rs.pose, action);
      if (action == Action::MoveForward &&
          !record.trajectories[i].empty()) {
        const Pose& prev = record.trajectories[i].back();
        if (std::hypot(rs.pose.x - prev.x, rs.pose.y - prev.y) > 1e-12)
          rs.traj_len += kForwardStepMeters;
      }
      record.actions[i].push_back(action);
      record.trajectories[i].push_back(rs.pose);

      if (action == Action::Stop) {
        if (true_target_distance(rs.pose) <= config.success_radius_m) {
          record.success = true;
          record.success_robot = i;
          record.termination = "stop";
          done = true;
        } else {
          rs.frozen = true;
          bool all_frozen = true;
          for (const auto& other : robots) all_frozen = all_frozen && other.frozen;
          if (all_frozen) {
            record.termination = "all_stopped";
            done = true;
          }
        }
      }
    }
  }
  record.steps = steps_taken;
  if (record.termination.empty()) record.termination = "timeout";

  record.traj_len_m.resize(n_robots);
  for (int i = 0; i < n_robots; ++i) record.traj_len_m[i] = robots[i].traj_len;
  record.min_robot_path_m =
      *std::min_element(record.traj_len_m.begin(), record.traj_len_m.end());
  if (record.success) record.path_of_success_robot_m = record.traj_len_m[record.success_robot];

  std::vector<Pose> final_poses;
  for (const auto& rs : robots) final_poses.push_back(rs.pose);
  record.dtg_m = compute_dtg(scene, config, final_poses, record.success);

  if (record.success) {
    // l: ground-truth shortest path from the start to a valid success
    // position of the found instance (free cells within the success radius).
    const Pose& stopper = robots[record.success_robot].pose;
    const sim::SceneObject* found = nullptr;
    double best = std::numeric_limits<double>::infinity();
    for (const auto* obj : instances) {
      for (const Cell& c : obj->cells) {
        const auto [wx, wy] = scene.cell_center(c);
        const double d = std::hypot(wx - stopper.x, wy - stopper.y);
        if (d < best) {
          best = d;
          found = obj;
        }
      }
    }
    if (found) {
      const auto free = scene.free_mask();
      const Cell start_cell = scene.cell_at(config.start_x, config.start_y);
      const auto field = local_policy::fmm_field(free, scene.rows, scene.cols,
                                                 scene.resolution_m, start_cell);
      double l = std::numeric_limits<double>::infinity();
      const int reach =
          static_cast<int>(std::ceil(config.success_radius_m / scene.resolution_m)) + 1;
      for (const Cell& c : found->cells) {
        const auto [wx, wy] = scene.cell_center(c);
        for (int dr = -reach; dr <= reach; ++dr) {
          for (int dc = -reach; dc <= reach; ++dc) {
            const Cell s{c.row + dr, c.col + dc};
            if (!scene.in_bounds(s) || scene.is_occupied(s)) continue;
            const auto [sx, sy] = scene.cell_center(s);
            if (std::hypot(sx - wx, sy - wy) > config.success_radius_m + 1e-9) continue;
            if (field.reachable(s)) l = std::min(l, field.at(s));
          }
        }
      }
      record.shortest_path_m = l;
    }
  }

  if (options.render_trajectory && !options.render_dir.empty()) {
    std::filesystem::create_directories(options.render_dir);
    std::vector<Pose> poses;
    for (const auto& rs : robots) poses.push_back(rs.pose);
    prompt::Image img =
        prompt::render_topview(merged, global_map, poses, prompt::PromptMode::Topview);
    const int n = global_map.size();
    auto to_px = [&](const Pose& p) {
      const Cell c = world_to_grid(p.x, p.y, spec);
      return std::pair<int, int>{c.col * prompt::kRenderScale,
                                 (n - 1 - c.row) * prompt::kRenderScale};
    };
    for (int i = 0; i < n_robots; ++i) {
      const auto color = prompt::robot_color(i);
      for (std::size_t k = 1; k < record.trajectories[i].size(); ++k) {
        const auto [x0, y0] = to_px(record.trajectories[i][k - 1]);
        const auto [x1, y1] = to_px(record.trajectories[i][k]);
        prompt::draw_line(img, x0, y0, x1, y1, color);
      }
    }
    for (const auto& prov : record.provenance) {
      for (std::size_t i = 0; i < prov.goals.size(); ++i) {
        const auto [gx, gy] = grid_to_world(prov.goals[i].cell, spec);
        const Cell c = world_to_grid(gx, gy, spec);
        prompt::draw_disk(img, c.col * prompt::kRenderScale,
                          (n - 1 - c.row) * prompt::kRenderScale, 2,
                          prompt::robot_color(static_cast<int>(i)));
      }
    }
    prompt::write_png(img, options.render_dir + "/" + config.episode_id + ".png");
    if (options.dump_cloud) {
      std::ofstream out(options.render_dir + "/" + config.episode_id + ".cloud.txt");
      mapping::dump_cloud(merged, out);
    }
  }

  record.wall_ms = std::chrono::duration<double, std::milli>(
                       std::chrono::steady_clock::now() - started)
                       .count();
  return record;
}

}  // namespace mrnav::runner
