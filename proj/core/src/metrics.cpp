#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <future>
#include <map>
#include <sstream>

#include <json.hpp>

#include "mrnav/error.hpp"
#include "mrnav/local_policy.hpp"
#include "mrnav/runner.hpp"

namespace mrnav::runner {

using nlohmann::json;

double compute_sr(const std::vector<EpisodeRecord>& records) {
  if (records.empty()) throw Error(ErrorKind::Argument, "empty batch");
  double sum = 0.0;
  for (const auto& r : records) sum += r.success ? 1.0 : 0.0;
  return sum / records.size();
}

double compute_spl(const std::vector<EpisodeRecord>& records) {
  if (records.empty()) throw Error(ErrorKind::Argument, "empty batch");
  double sum = 0.0;
  for (const auto& r : records) {
    if (!r.success) continue;
    const double l = r.shortest_path_m;
    const double p = r.path_of_success_robot_m;
    if (!(l > 0.0) || !(p > 0.0) || !std::isfinite(l) || !std::isfinite(p))
      throw Error(ErrorKind::Data, "successful episode " + r.config.episode_id +
                                       " has nonpositive path lengths");
    sum += l / std::max(l, p);
  }
  return sum / records.size();
}

double compute_dtg(const sim::Scene& scene, const EpisodeConfig& config,
                   const std::vector<Pose>& final_poses, bool success) {
  if (success) return 0.0;
  const auto target = category_id(config.target_category);
  if (!target) return std::numeric_limits<double>::infinity();

  // Seed the field at every free target cell plus the free neighbors of
  // occupied target cells, so distances measure travel to the instance.
  std::vector<Cell> seeds;
  for (const auto& obj : scene.objects) {
    if (obj.category != *target) continue;
    for (const Cell& c : obj.cells) {
      if (!scene.is_occupied(c)) {
        seeds.push_back(c);
        continue;
      }
      for (int dr = -1; dr <= 1; ++dr) {
        for (int dc = -1; dc <= 1; ++dc) {
          const Cell s{c.row + dr, c.col + dc};
          if (s == c || !scene.in_bounds(s) || scene.is_occupied(s)) continue;
          seeds.push_back(s);
        }
      }
    }
  }
  std::sort(seeds.begin(), seeds.end());
  seeds.erase(std::unique(seeds.begin(), seeds.end()), seeds.end());
  if (seeds.empty()) return std::numeric_limits<double>::infinity();

  const auto field = local_policy::fmm_field_multi(scene.free_mask(), scene.rows,
                                                   scene.cols, scene.resolution_m,
                                                   seeds);
  double best = std::numeric_limits<double>::infinity();
  for (const Pose& pose : final_poses) {
    if (!scene.contains(pose.x, pose.y)) continue;
    const Cell c = scene.cell_at(pose.x, pose.y);
    if (field.in_bounds(c)) best = std::min(best, field.at(c));
  }
  return best;
}

DtgAggregate aggregate_dtg(const std::vector<EpisodeRecord>& records) {
  DtgAggregate agg;
  double sum_all = 0.0;
  int n_all = 0;
  double sum_fail = 0.0;
  int n_fail = 0;
  for (const auto& r : records) {
    if (!std::isfinite(r.dtg_m)) {
      ++agg.excluded_absent;
      continue;
    }
    sum_all += r.dtg_m;
    ++n_all;
    if (!r.success) {
      sum_fail += r.dtg_m;
      ++n_fail;
    }
  }
  agg.mean_all = n_all ? sum_all / n_all : 0.0;
  agg.mean_failures = n_fail ? sum_fail / n_fail : 0.0;
  return agg;
}

namespace {

std::uint64_t fnv1a(const std::string& text) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  return h;
}

json number_or_null(double v) {
  if (!std::isfinite(v)) return nullptr;
  return v;
}

double number_from(const json& j, double fallback_infinity) {
  if (j.is_null()) return fallback_infinity;
  return j.get<double>();
}

}  // namespace

std::uint64_t fingerprint_options(const EpisodeOptions& options) {
  std::ostringstream s;
  s << to_string(options.planner) << '|' << options.lambda_cu << '|'
    << options.sensor.range_m << '|' << options.sensor.fov_rad << '|'
    << options.sensor.ray_count << '|' << options.sensor.label_dropout << '|'
    << options.sensor.false_label_rate << '|'
    << options.frontier.dilation_radius_cells << '|'
    << options.frontier.min_cluster_size << '|' << options.local.lookahead_m << '|'
    << options.local.heading_tolerance_deg << '|'
    << options.local.plan_dilation_cells << '|' << options.local.goal_snap_radius_m
    << '|' << options.dbscan_eps_m << '|' << options.dbscan_min_pts << '|'
    << (options.vlm.mode == prompt::PromptMode::Topview ? "topview" : "obstacle_only")
    << '|' << options.vlm.include_distance_hints;
  return fnv1a(s.str());
}

std::string record_to_jsonl(const EpisodeRecord& r) {
  json j;
  j["schema_version"] = 1;
  j["episode_id"] = r.config.episode_id;
  j["scene_id"] = r.config.scene_id;
  j["target"] = r.config.target_category;
  j["planner"] = r.planner;
  j["seed"] = r.seed;
  j["robots"] = r.config.robot_count;
  j["max_steps"] = r.config.max_steps;
  j["success_radius_m"] = r.config.success_radius_m;
  j["global_period"] = r.config.global_period;
  j["map_side_m"] = r.config.map_side_m;
  j["start"] = {r.config.start_x, r.config.start_y};
  j["success"] = r.success ? 1 : 0;
  j["success_robot"] = r.success_robot;
  j["termination"] = r.termination;
  j["steps"] = r.steps;
  j["error"] = r.error;
  j["l_m"] = number_or_null(r.shortest_path_m);
  j["p_success_m"] = r.success ? json(r.path_of_success_robot_m) : json(nullptr);
  j["p_min_m"] = r.min_robot_path_m;
  j["dtg_m"] = number_or_null(r.dtg_m);
  j["target_absent"] = r.target_absent;
  j["traj_len_m"] = r.traj_len_m;

  json trajs = json::array();
  for (const auto& traj : r.trajectories) {
    json one = json::array();
    for (const Pose& p : traj) one.push_back({p.x, p.y, p.theta});
    trajs.push_back(std::move(one));
  }
  j["trajectories"] = std::move(trajs);

  json acts = json::array();
  for (const auto& log : r.actions) {
    json one = json::array();
    for (Action a : log) one.push_back(std::string(to_string(a)));
    acts.push_back(std::move(one));
  }
  j["actions"] = std::move(acts);

  json prov = json::array();
  for (const auto& g : r.provenance) {
    json e;
    e["step"] = g.step;
    e["policy"] = std::string(planners::to_string(g.policy));
    e["fallback"] = g.fallback;
    e["reason"] = g.reason;
    json goals = json::array();
    for (std::size_t i = 0; i < g.goals.size(); ++i) {
      json one;
      one["robot"] = i;
      one["kind"] =
          g.goals[i].kind == planners::GoalKind::Frontier ? "frontier" : "cell";
      one["frontier_id"] = g.goals[i].frontier_id;
      one["cell"] = {g.goals[i].cell.row, g.goals[i].cell.col};
      goals.push_back(std::move(one));
    }
    e["goals"] = std::move(goals);
    prov.push_back(std::move(e));
  }
  j["provenance"] = std::move(prov);
  j["config_fingerprint"] = r.config_fingerprint;
  return j.dump();
}

EpisodeRecord record_from_jsonl(const std::string& line) {
  json j = json::parse(line, nullptr, false);
  if (j.is_discarded()) throw Error(ErrorKind::Parse, "bad record line");
  if (j.value("schema_version", 0) != 1)
    throw Error(ErrorKind::Parse, "unsupported record schema");
  EpisodeRecord r;
  r.config.episode_id = j.at("episode_id").get<std::string>();
  r.config.scene_id = j.at("scene_id").get<std::string>();
  r.config.target_category = j.at("target").get<std::string>();
  r.planner = j.at("planner").get<std::string>();
  r.seed = j.at("seed").get<std::uint64_t>();
  r.config.robot_count = j.at("robots").get<int>();
  r.config.max_steps = j.at("max_steps").get<int>();
  r.config.success_radius_m = j.at("success_radius_m").get<double>();
  r.config.global_period = j.at("global_period").get<int>();
  r.config.map_side_m = j.at("map_side_m").get<double>();
  r.config.start_x = j.at("start")[0].get<double>();
  r.config.start_y = j.at("start")[1].get<double>();
  r.success = j.at("success").get<int>() != 0;
  r.success_robot = j.at("success_robot").get<int>();
  r.termination = j.at("termination").get<std::string>();
  r.steps = j.at("steps").get<int>();
  r.error = j.value("error", "");
  r.shortest_path_m =
      number_from(j.at("l_m"), std::numeric_limits<double>::infinity());
  r.path_of_success_robot_m = number_from(j.at("p_success_m"), 0.0);
  r.min_robot_path_m = j.at("p_min_m").get<double>();
  r.dtg_m = number_from(j.at("dtg_m"), std::numeric_limits<double>::infinity());
  r.target_absent = j.at("target_absent").get<bool>();
  r.traj_len_m = j.at("traj_len_m").get<std::vector<double>>();
  for (const auto& traj : j.at("trajectories")) {
    std::vector<Pose> one;
    for (const auto& p : traj)
      one.push_back(Pose{p[0].get<double>(), p[1].get<double>(), p[2].get<double>()});
    r.trajectories.push_back(std::move(one));
  }
  for (const auto& log : j.at("actions")) {
    std::vector<Action> one;
    for (const auto& a : log) {
      const auto act = action_from_string(a.get<std::string>());
      if (!act) throw Error(ErrorKind::Parse, "unknown action in record");
      one.push_back(*act);
    }
    r.actions.push_back(std::move(one));
  }
  r.config_fingerprint = j.at("config_fingerprint").get<std::uint64_t>();
  return r;
}

namespace {

struct EpisodeSpec {
  EpisodeConfig config;
  std::uint64_t seed = 0;
  bool seed_given = false;
};

std::vector<EpisodeSpec> load_episode_list(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open episode list " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Parse, std::string("episode list: ") + e.what());
  }
  if (!j.is_object() || !j.contains("episodes") || !j["episodes"].is_array())
    throw Error(ErrorKind::Parse, "episode list must contain an 'episodes' array");
  std::vector<EpisodeSpec> specs;
  for (const auto& e : j["episodes"]) {
    EpisodeSpec spec;
    spec.config.episode_id = e.at("id").get<std::string>();
    spec.config.scene_id = e.at("scene").get<std::string>();
    spec.config.target_category = e.at("target").get<std::string>();
    spec.config.start_x = e.at("start")[0].get<double>();
    spec.config.start_y = e.at("start")[1].get<double>();
    spec.config.robot_count = e.value("robots", 2);
    spec.config.max_steps = e.value("max_steps", 500);
    spec.config.success_radius_m = e.value("success_radius_m", 0.1);
    spec.config.global_period = e.value("global_period", 25);
    spec.config.map_side_m = e.value("map_side_m", 24.0);
    if (e.contains("seed")) {
      spec.seed = e["seed"].get<std::uint64_t>();
      spec.seed_given = true;
    }
    specs.push_back(std::move(spec));
  }
  return specs;
}

std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
  std::uint64_t x = a ^ (b + 0x9e3779b97f4a7c15ULL + (a << 6) + (a >> 2));
  x ^= x >> 33;
  x *= 0xff51afd7ed558ccdULL;
  x ^= x >> 33;
  return x;
}

}  // namespace

BatchReport run_batch(const std::string& scenes_dir, const std::string& episodes_file,
                      const BatchOptions& options) {
  const auto started = std::chrono::steady_clock::now();
  auto specs = load_episode_list(episodes_file);

  std::map<std::string, sim::Scene> scenes;
  for (auto& spec : specs) {
    if (options.robots_override > 0) spec.config.robot_count = options.robots_override;
    if (!spec.seed_given)
      spec.seed = mix(options.seed, fnv1a(spec.config.episode_id));
    if (!scenes.count(spec.config.scene_id))
      scenes.emplace(spec.config.scene_id,
                     sim::load_scene_file(scenes_dir + "/" + spec.config.scene_id +
                                          ".json"));
  }

  // A scripted client is a single ordered stream, so it serializes the batch.
  std::unique_ptr<prompt::ScriptedVlmClient> scripted;
  int jobs = std::max(options.jobs, 1);
  if (options.vlm_choice == VlmClientChoice::Scripted) {
    scripted = std::make_unique<prompt::ScriptedVlmClient>(options.scripted_path);
    jobs = 1;
  }
  std::unique_ptr<prompt::HttpVlmClient> live;
  double wall_budget_ms = options.episode.wall_budget_ms;
  if (options.vlm_choice == VlmClientChoice::Live) {
    live = std::make_unique<prompt::HttpVlmClient>(options.endpoint);
    if (wall_budget_ms <= 0.0) wall_budget_ms = 5.0 * 60.0 * 1000.0;
  }

  auto run_one = [&](const EpisodeSpec& spec,
                     prompt::VlmClient* client) -> EpisodeRecord {
    EpisodeOptions ep = options.episode;
    ep.vlm_client = client;
    ep.wall_budget_ms = wall_budget_ms;
    try {
      return run_episode(scenes.at(spec.config.scene_id), spec.config, ep, spec.seed);
    } catch (const Error& err) {
      EpisodeRecord record;
      record.config = spec.config;
      record.planner = std::string(planners::to_string(ep.planner));
      record.seed = spec.seed;
      record.termination = "error";
      record.error = err.what();
      return record;
    }
  };

  BatchReport report;
  report.records.resize(specs.size());
  report.config_fingerprint = fingerprint_options(options.episode);

  auto client_for_episode = [&](std::unique_ptr<planners::MockGreedyClient>& mock)
      -> prompt::VlmClient* {
    switch (options.vlm_choice) {
      case VlmClientChoice::MockGreedy:
        mock = std::make_unique<planners::MockGreedyClient>();
        return mock.get();
      case VlmClientChoice::Scripted:
        return scripted.get();
      case VlmClientChoice::Live:
        return live.get();
      case VlmClientChoice::None:
        return nullptr;
    }
    return nullptr;
  };

  if (jobs <= 1) {
    for (std::size_t i = 0; i < specs.size(); ++i) {
      std::unique_ptr<planners::MockGreedyClient> mock;
      report.records[i] = run_one(specs[i], client_for_episode(mock));
    }
  } else {
    for (std::size_t base = 0; base < specs.size(); base += jobs) {
      std::vector<std::future<EpisodeRecord>> wave;
      const std::size_t end = std::min(base + jobs, specs.size());
      for (std::size_t i = base; i < end; ++i) {
        wave.push_back(std::async(std::launch::async, [&, i] {
          std::unique_ptr<planners::MockGreedyClient> mock;
          return run_one(specs[i], client_for_episode(mock));
        }));
      }
      for (std::size_t i = base; i < end; ++i)
        report.records[i] = wave[i - base].get();
    }
  }

  report.sr = compute_sr(report.records);
  report.spl = compute_spl(report.records);
  report.dtg = aggregate_dtg(report.records);
  double steps = 0.0;
  for (const auto& r : report.records) steps += r.steps;
  report.mean_steps = report.records.empty() ? 0.0 : steps / report.records.size();
  report.wall_ms = std::chrono::duration<double, std::milli>(
                       std::chrono::steady_clock::now() - started)
                       .count();
  return report;
}

void write_batch(const BatchReport& report, const std::string& out_dir) {
  std::filesystem::create_directories(out_dir);
  {
    std::ofstream out(out_dir + "/results.jsonl", std::ios::binary);
    if (!out) throw Error(ErrorKind::Io, "cannot write results.jsonl");
    for (const auto& r : report.records) out << record_to_jsonl(r) << '\n';
  }
  json summary;
  summary["episodes"] = report.records.size();
  summary["sr"] = report.sr;
  summary["spl"] = report.spl;
  summary["dtg_mean_all"] = report.dtg.mean_all;
  summary["dtg_mean_failures"] = report.dtg.mean_failures;
  summary["dtg_excluded"] = report.dtg.excluded_absent;
  summary["mean_steps"] = report.mean_steps;
  summary["config_fingerprint"] = report.config_fingerprint;
  summary["wall_ms"] = report.wall_ms;
  std::ofstream out(out_dir + "/summary.json", std::ios::binary);
  if (!out) throw Error(ErrorKind::Io, "cannot write summary.json");
  out << summary.dump(2) << '\n';
}

}  // namespace mrnav::runner
