#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mrnav/frontier.hpp"
#include "mrnav/grid.hpp"
#include "mrnav/prompt.hpp"
#include "mrnav/types.hpp"

namespace mrnav::planners {

inline constexpr double kDefaultLambdaCu = 1.0;
inline constexpr int kDefaultPlanDilationCells = 2;
inline constexpr double kSnapRadiusM = 0.5;

struct PlannerInput {
  const GridMap* map = nullptr;
  const SemanticPointCloud* cloud = nullptr;
  std::vector<Pose> robot_poses;  // index = robot id
  std::vector<frontier::FrontierCluster> frontiers;
  std::string target_category;
  int step_index = 0;
  std::uint64_t fallback_seed = 0;  // part of the input: keeps policies pure
  int plan_dilation_cells = kDefaultPlanDilationCells;

  int robot_count() const { return static_cast<int>(robot_poses.size()); }
  void validate() const;  // throws Error{Validation}
};

enum class GoalKind { Frontier, FallbackCell };

struct RobotGoal {
  GoalKind kind = GoalKind::Frontier;
  int frontier_id = -1;  // valid when kind == Frontier
  Cell cell;             // frontier representative or the fallback cell
};

enum class PolicyTag { Greedy, CostUtility, Random, Vlm };
std::string_view to_string(PolicyTag tag);

struct Assignment {
  std::vector<RobotGoal> goals;  // index = robot id
  PolicyTag policy = PolicyTag::Greedy;
  bool fallback_used = false;    // true when any robot did not get a frontier
                                 // from the nominal policy path
  std::string fallback_reason;   // empty when no fallback fired
};

/// Geodesic distance (meters) from one robot to every frontier representative
/// over the currently known map: traversable = explored ∧ ¬dilate(obstacle).
/// The robot cell snaps to the nearest traversable cell within 0.5 m.
/// Unreachable frontiers come back infinite.
std::vector<double> frontier_distances(const PlannerInput& input, int robot_id);

/// Robots in id order each take the nearest unassigned reachable frontier;
/// when frontiers run out the remaining robots get fallback cells sampled
/// from explored free space (seeded from the input).
Assignment assign_greedy(const PlannerInput& input);

/// Cost-utility score U(f) − λ·C(f) with U the cluster size in cells and C
/// the geodesic distance in meters; -inf when the frontier is unreachable.
/// Throws Error{Argument} for λ < 0.
double cost_utility_score(const frontier::FrontierCluster& cluster,
                          const Pose& robot_pose, const GridMap& map, double lambda,
                          int plan_dilation_cells = kDefaultPlanDilationCells);

/// Robots in id order each take their highest-scoring unassigned frontier.
Assignment assign_cost_utility(const PlannerInput& input,
                               double lambda = kDefaultLambdaCu);

/// Uniform sample over explored, non-obstacle cells per robot; deterministic
/// under a fixed seed. Throws Error{NoSpace} when nothing is explored.
Assignment assign_random(const PlannerInput& input, std::uint64_t seed);

/// Clients that can be handed the domain input ahead of the wire call (used
/// by mock clients that compute a reference assignment).
struct InputAwareClient {
  virtual ~InputAwareClient() = default;
  virtual void bind_input(const PlannerInput& input) = 0;
};

/// Mock that answers with the greedy assignment of the bound input,
/// serialized the way a cooperative model would reply.
class MockGreedyClient : public prompt::VlmClient, public InputAwareClient {
 public:
  void bind_input(const PlannerInput& input) override { input_ = &input; }
  prompt::VlmResult complete(const prompt::VlmRequest& request) override;

 private:
  const PlannerInput* input_ = nullptr;
};

struct VlmPlannerOptions {
  prompt::PromptMode mode = prompt::PromptMode::Topview;
  bool include_distance_hints = false;  // off by default
  std::string model;
  double temperature = 0.0;
};

/// Builds the multi-modal prompt, invokes the client and parses the reply.
/// Fallback chain: any parse/transport failure → cost-utility assignment;
/// empty frontier list → random explored cells (no client call). Throws
/// Error{NoSpace} only when there is no explored space at all.
Assignment assign_vlm(const PlannerInput& input, prompt::VlmClient& client,
                      const VlmPlannerOptions& options = {});

}  // namespace mrnav::planners
