#include "mrnav/planners.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "mrnav/error.hpp"
#include "mrnav/local_policy.hpp"

namespace mrnav::planners {

void PlannerInput::validate() const {
  if (!map) throw Error(ErrorKind::Validation, "planner input without map");
  if (robot_poses.empty()) throw Error(ErrorKind::Validation, "no robots");
  for (std::size_t i = 0; i < frontiers.size(); ++i)
    if (frontiers[i].id != static_cast<int>(i))
      throw Error(ErrorKind::Validation, "frontier ids must be contiguous from 0");
}

std::string_view to_string(PolicyTag tag) {
  switch (tag) {
    case PolicyTag::Greedy: return "greedy";
    case PolicyTag::CostUtility: return "costutil";
    case PolicyTag::Random: return "random";
    case PolicyTag::Vlm: return "vlm";
  }
  return "unknown";
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::vector<std::uint8_t> planning_mask(const GridMap& map, int dilation_cells) {
  const int n = map.size();
  const auto blocked = dilate_chebyshev(map.obstacle, n, n, dilation_cells);
  std::vector<std::uint8_t> mask(static_cast<std::size_t>(n) * n, 0);
  for (std::size_t i = 0; i < mask.size(); ++i)
    mask[i] = (map.explored[i] && !blocked[i]) ? 1 : 0;
  return mask;
}

std::vector<int> explored_free_cells(const GridMap& map) {
  std::vector<int> cells;
  for (std::size_t i = 0; i < map.explored.size(); ++i)
    if (map.explored[i] && !map.obstacle[i]) cells.push_back(static_cast<int>(i));
  return cells;
}

Cell sample_explored_cell(const GridMap& map, std::mt19937_64& rng) {
  const auto cells = explored_free_cells(map);
  if (cells.empty()) throw Error(ErrorKind::NoSpace, "no explored free cells");
  const int pick = cells[std::uniform_int_distribution<std::size_t>(0, cells.size() - 1)(rng)];
  return Cell{pick / map.size(), pick % map.size()};
}

std::vector<double> distances_over_mask(const PlannerInput& input,
                                        const std::vector<std::uint8_t>& mask,
                                        int robot_id) {
  const GridMap& map = *input.map;
  const int n = map.size();
  std::vector<double> out(input.frontiers.size(), local_policy::kUnreachable);

  const Pose& pose = input.robot_poses[robot_id];
  if (!in_extent(pose.x, pose.y, map.spec)) return out;
  const Cell raw = world_to_grid(pose.x, pose.y, map.spec);
  const int snap_cells =
      static_cast<int>(std::ceil(kSnapRadiusM / map.spec.resolution_m));
  const auto source = local_policy::nearest_traversable(mask, n, n, raw, snap_cells);
  if (!source) return out;

  const auto field =
      local_policy::fmm_field(mask, n, n, map.spec.resolution_m, *source);
  for (std::size_t f = 0; f < input.frontiers.size(); ++f) {
    const Cell rep = input.frontiers[f].representative;
    if (field.in_bounds(rep)) out[f] = field.at(rep);
  }
  return out;
}

Cell fallback_cell(const PlannerInput& input, int robot_id) {
  std::mt19937_64 rng(splitmix64(input.fallback_seed ^
                                 (0x5bd1e995ULL * (input.step_index + 1)) ^
                                 static_cast<std::uint64_t>(robot_id) << 32));
  return sample_explored_cell(*input.map, rng);
}

// Sequential id-order assignment over per-robot frontier scores; larger is
// better. Robots with no finite-scored unassigned frontier left fall back to
// random explored cells.
Assignment assign_sequential(const PlannerInput& input, PolicyTag tag,
                             const std::vector<std::vector<double>>& scores) {
  Assignment assignment;
  assignment.policy = tag;
  std::vector<char> taken(input.frontiers.size(), 0);
  for (int robot = 0; robot < input.robot_count(); ++robot) {
    int best = -1;
    double best_score = -std::numeric_limits<double>::infinity();
    for (std::size_t f = 0; f < input.frontiers.size(); ++f) {
      if (taken[f]) continue;
      const double s = scores[robot][f];
      if (!std::isfinite(s)) continue;  // unreachable frontiers are skipped
      if (s > best_score) {
        best_score = s;
        best = static_cast<int>(f);
      }
    }
    RobotGoal goal;
    if (best >= 0) {
      taken[best] = 1;
      goal.kind = GoalKind::Frontier;
      goal.frontier_id = best;
      goal.cell = input.frontiers[best].representative;
    } else {
      goal.kind = GoalKind::FallbackCell;
      goal.cell = fallback_cell(input, robot);
      assignment.fallback_used = true;
      if (assignment.fallback_reason.empty())
        assignment.fallback_reason = "frontiers exhausted";
    }
    assignment.goals.push_back(goal);
  }
  return assignment;
}

}  // namespace

std::vector<double> frontier_distances(const PlannerInput& input, int robot_id) {
  input.validate();
  return distances_over_mask(input, planning_mask(*input.map, input.plan_dilation_cells),
                             robot_id);
}

Assignment assign_greedy(const PlannerInput& input) {
  input.validate();
  const auto mask = planning_mask(*input.map, input.plan_dilation_cells);
  std::vector<std::vector<double>> scores(input.robot_count());
  for (int robot = 0; robot < input.robot_count(); ++robot) {
    auto d = distances_over_mask(input, mask, robot);
    scores[robot].resize(d.size());
    for (std::size_t f = 0; f < d.size(); ++f)
      scores[robot][f] = std::isfinite(d[f])
                             ? -d[f]  // nearest first
                             : -std::numeric_limits<double>::infinity();
  }
  return assign_sequential(input, PolicyTag::Greedy, scores);
}

double cost_utility_score(const frontier::FrontierCluster& cluster,
                          const Pose& robot_pose, const GridMap& map, double lambda,
                          int plan_dilation_cells) {
  if (lambda < 0.0) throw Error(ErrorKind::Argument, "lambda must be >= 0");
  PlannerInput probe;
  probe.map = &map;
  probe.robot_poses = {robot_pose};
  probe.frontiers = {cluster};
  probe.frontiers[0].id = 0;
  probe.plan_dilation_cells = plan_dilation_cells;
  const double dist = frontier_distances(probe, 0)[0];
  if (!std::isfinite(dist)) return -std::numeric_limits<double>::infinity();
  return static_cast<double>(cluster.size) - lambda * dist;
}

Assignment assign_cost_utility(const PlannerInput& input, double lambda) {
  if (lambda < 0.0) throw Error(ErrorKind::Argument, "lambda must be >= 0");
  input.validate();
  const auto mask = planning_mask(*input.map, input.plan_dilation_cells);
  std::vector<std::vector<double>> scores(input.robot_count());
  for (int robot = 0; robot < input.robot_count(); ++robot) {
    auto d = distances_over_mask(input, mask, robot);
    scores[robot].resize(d.size());
    for (std::size_t f = 0; f < d.size(); ++f)
      scores[robot][f] = std::isfinite(d[f])
                             ? input.frontiers[f].size - lambda * d[f]
                             : -std::numeric_limits<double>::infinity();
  }
  return assign_sequential(input, PolicyTag::CostUtility, scores);
}

Assignment assign_random(const PlannerInput& input, std::uint64_t seed) {
  input.validate();
  Assignment assignment;
  assignment.policy = PolicyTag::Random;
  std::mt19937_64 rng(splitmix64(seed));
  for (int robot = 0; robot < input.robot_count(); ++robot) {
    RobotGoal goal;
    goal.kind = GoalKind::FallbackCell;
    goal.frontier_id = -1;
    goal.cell = sample_explored_cell(*input.map, rng);
    assignment.goals.push_back(goal);
  }
  return assignment;
}

prompt::VlmResult MockGreedyClient::complete(const prompt::VlmRequest&) {
  prompt::VlmResult result;
  if (!input_) {
    result.error = prompt::VlmErrorKind::Transport;
    result.detail = "mock client has no bound input";
    return result;
  }
  const Assignment greedy = assign_greedy(*input_);
  std::map<int, int> ids;
  for (std::size_t robot = 0; robot < greedy.goals.size(); ++robot)
    if (greedy.goals[robot].kind == GoalKind::Frontier)
      ids[static_cast<int>(robot)] = greedy.goals[robot].frontier_id;
  prompt::VlmReply reply;
  reply.content = prompt::serialize_assignment(ids);
  result.reply = std::move(reply);
  return result;
}

Assignment assign_vlm(const PlannerInput& input, prompt::VlmClient& client,
                      const VlmPlannerOptions& options) {
  input.validate();

  // No viable frontiers: random points within the explored space.
  if (input.frontiers.empty()) {
    Assignment assignment =
        assign_random(input, splitmix64(input.fallback_seed ^ 0x7f4a7c15ULL ^
                                        static_cast<std::uint64_t>(input.step_index)));
    assignment.policy = PolicyTag::Vlm;
    assignment.fallback_used = true;
    assignment.fallback_reason = "no frontiers: random explored cells";
    return assignment;
  }

  if (auto* aware = dynamic_cast<InputAwareClient*>(&client)) aware->bind_input(input);

  std::vector<std::string> extra_context;
  if (options.include_distance_hints) {
    for (const auto& cluster : input.frontiers) {
      std::string line = "Frontier " + std::to_string(cluster.id) + ": size " +
                         std::to_string(cluster.size) + " cells";
      for (int robot = 0; robot < input.robot_count(); ++robot) {
        const auto d = frontier_distances(input, robot)[cluster.id];
        line += ", distance to robot " + std::to_string(robot) + " " +
                (std::isfinite(d) ? std::to_string(d) + " m" : "unreachable");
      }
      extra_context.push_back(line);
    }
  }

  prompt::VlmRequest request;
  request.system_text =
      "You are the global planner of a cooperative multi-robot exploration "
      "system. Reply with a single JSON object and nothing else.";
  request.user_text = prompt::build_text_prompt(input.target_category,
                                                input.robot_count(), extra_context);
  request.model = options.model;
  request.temperature = options.temperature;
  const prompt::Image base = prompt::render_topview(
      input.cloud ? *input.cloud : SemanticPointCloud{}, *input.map,
      input.robot_poses, options.mode);
  const auto visual = prompt::render_candidates(base, input.frontiers);
  for (const prompt::Image& img : visual.images)
    request.images_png.push_back(prompt::encode_png(img));

  const auto outcome = client.complete(request);
  std::string failure;
  if (outcome.ok()) {
    const auto parsed = prompt::parse_reply(outcome.reply->content, input.robot_count(),
                                            static_cast<int>(input.frontiers.size()));
    if (parsed.ok()) {
      Assignment assignment;
      assignment.policy = PolicyTag::Vlm;
      for (int robot = 0; robot < input.robot_count(); ++robot) {
        RobotGoal goal;
        goal.kind = GoalKind::Frontier;
        goal.frontier_id = parsed.assignment.at(robot);
        goal.cell = input.frontiers[goal.frontier_id].representative;
        assignment.goals.push_back(goal);
      }
      return assignment;
    }
    failure = std::string("parse ") + std::string(prompt::to_string(parsed.error)) +
              ": " + parsed.detail;
  } else {
    failure = std::string("client ") + std::string(prompt::to_string(outcome.error)) +
              ": " + outcome.detail;
  }

  Assignment assignment = assign_cost_utility(input);
  assignment.policy = PolicyTag::Vlm;
  assignment.fallback_used = true;
  assignment.fallback_reason = failure + " -> cost-utility";
  return assignment;
}

}  // namespace mrnav::planners
