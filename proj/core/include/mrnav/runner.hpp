#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "mrnav/frontier.hpp"
#include "mrnav/planners.hpp"
#include "mrnav/prompt.hpp"
#include "mrnav/scene.hpp"
#include "mrnav/sim.hpp"
#include "mrnav/types.hpp"

namespace mrnav::runner {

struct LocalPolicySettings {
  double lookahead_m = 0.5;
  double heading_tolerance_deg = 15.0;
  int plan_dilation_cells = 2;
  double goal_snap_radius_m = 0.5;
};

struct EpisodeOptions {
  planners::PolicyTag planner = planners::PolicyTag::Greedy;
  prompt::VlmClient* vlm_client = nullptr;  // required for PolicyTag::Vlm
  planners::VlmPlannerOptions vlm;
  double lambda_cu = planners::kDefaultLambdaCu;
  sim::SensorParams sensor;
  frontier::FrontierParams frontier;
  LocalPolicySettings local;
  double dbscan_eps_m = 0.15;
  int dbscan_min_pts = 4;
  bool render_trajectory = false;
  bool dump_cloud = false;
  std::string render_dir;
  double wall_budget_ms = 0.0;  // 0 = unlimited; batches with a live model
                                // client default to 5 minutes per episode
};

struct GoalProvenance {
  int step = 0;
  planners::PolicyTag policy = planners::PolicyTag::Greedy;
  bool fallback = false;
  std::string reason;
  std::vector<planners::RobotGoal> goals;
};

struct EpisodeRecord {
  // configuration echo
  EpisodeConfig config;
  std::string planner;
  std::uint64_t seed = 0;

  // outcome
  bool success = false;
  int success_robot = -1;
  std::string termination;  // "stop" | "timeout" | "all_stopped" | "error"
  int steps = 0;
  std::string error;  // non-empty only for aborted episodes

  // metric inputs; infinities signal "not defined" (target absent / failure)
  double shortest_path_m = std::numeric_limits<double>::infinity();  // l_i
  double path_of_success_robot_m = 0.0;                              // p_i
  double min_robot_path_m = 0.0;
  double dtg_m = std::numeric_limits<double>::infinity();
  bool target_absent = false;

  std::vector<double> traj_len_m;                 // per robot
  std::vector<std::vector<Pose>> trajectories;    // per robot, pose after each step
  std::vector<std::vector<Action>> actions;       // per robot
  std::vector<GoalProvenance> provenance;

  std::uint64_t config_fingerprint = 0;
  double wall_ms = 0.0;  // in-memory only; not part of the persisted schema
};

/// Runs one episode: robots start at the configured position with evenly
/// spaced headings; maps merge and the global planner fires at local steps
/// 0, P, 2P, ...; each local step every active robot senses, integrates,
/// replans locally and acts in id order. A valid stop (within the success
/// radius of a true target instance) ends the episode; an invalid stop
/// freezes that robot only. Deterministic given (scene, config, seed) and a
/// scripted/mock client.
EpisodeRecord run_episode(const sim::Scene& scene, const EpisodeConfig& config,
                          const EpisodeOptions& options, std::uint64_t seed);

/// SR = mean of S_i. Throws Error{Argument} on an empty batch.
double compute_sr(const std::vector<EpisodeRecord>& records);

/// SPL = (1/N) Σ S_i · l_i / max(l_i, p_i) with p the trajectory of the robot
/// that triggered the stop. Throws Error{Data} when a successful record has
/// a nonpositive l or p.
double compute_spl(const std::vector<EpisodeRecord>& records);

/// Ground-truth distance between a robot's final position and the nearest
/// cell of the nearest target instance; 0 on success, infinity when the
/// target is absent from the scene.
double compute_dtg(const sim::Scene& scene, const EpisodeConfig& config,
                   const std::vector<Pose>& final_poses, bool success);

struct DtgAggregate {
  double mean_all = 0.0;       // over episodes with a defined DTG
  double mean_failures = 0.0;  // failed episodes only
  int excluded_absent = 0;     // episodes dropped for lack of a target instance
};
DtgAggregate aggregate_dtg(const std::vector<EpisodeRecord>& records);

struct BatchReport {
  std::vector<EpisodeRecord> records;
  double sr = 0.0;
  double spl = 0.0;
  DtgAggregate dtg;
  double mean_steps = 0.0;
  std::uint64_t config_fingerprint = 0;
  double wall_ms = 0.0;
};

enum class VlmClientChoice { None, Live, MockGreedy, Scripted };

struct BatchOptions {
  EpisodeOptions episode;
  VlmClientChoice vlm_choice = VlmClientChoice::None;
  std::string scripted_path;
  prompt::EndpointConfig endpoint;
  std::uint64_t seed = 0;
  int robots_override = 0;  // 0 keeps per-episode robot counts
  int jobs = 1;
};

/// Episode list format: {"episodes": [{"id", "scene", "target",
/// "start": [x, y], "robots"?, "max_steps"?, "success_radius_m"?,
/// "global_period"?, "map_side_m"?, "seed"?}, ...]}. Scenes resolve to
/// <scenes_dir>/<scene>.json and are loaded once. Episode errors are
/// recorded and the batch continues.
BatchReport run_batch(const std::string& scenes_dir, const std::string& episodes_file,
                      const BatchOptions& options);

/// One deterministic JSON line per record (schema v1, no volatile fields).
std::string record_to_jsonl(const EpisodeRecord& record);
EpisodeRecord record_from_jsonl(const std::string& line);

/// Writes <out_dir>/results.jsonl and <out_dir>/summary.json.
void write_batch(const BatchReport& report, const std::string& out_dir);

std::uint64_t fingerprint_options(const EpisodeOptions& options);

}  // namespace mrnav::runner
