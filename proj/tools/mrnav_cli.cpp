#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>

#include <CLI11.hpp>
#include <json.hpp>

#include "mrnav/config.hpp"
#include "mrnav/error.hpp"
#include "mrnav/local_policy.hpp"
#include "mrnav/runner.hpp"

using namespace mrnav;
using nlohmann::json;

namespace {

// ---------------------------------------------------------------------------
// Corpus generation: small multi-room scenes with furniture and a
// free-standing goal object per scene. Fully deterministic for a given seed.
// ---------------------------------------------------------------------------

struct CorpusScene {
  sim::Scene scene;
  Cell start;
  std::string target;
};

constexpr const char* kGoalCategories[] = {"chair", "sofa", "plant",
                                           "bed",   "toilet", "tv"};

void carve_door(std::vector<std::uint8_t>& grid, int n, bool vertical_wall,
                int wall_pos, int door_center, int door_half) {
  for (int k = -door_half; k <= door_half; ++k) {
    const int r = vertical_wall ? door_center + k : wall_pos;
    const int c = vertical_wall ? wall_pos : door_center + k;
    if (r > 0 && r < n - 1 && c > 0 && c < n - 1) grid[r * n + c] = 0;
  }
}

CorpusScene make_apartment(std::uint64_t seed, int index) {
  std::mt19937 rng(static_cast<unsigned>(seed * 1009 + index));
  const int n = 112 + 8 * static_cast<int>(rng() % 5);  // 112..144 cells

  CorpusScene out;
  sim::Scene& scene = out.scene;
  scene.id = std::string("apartment_") + static_cast<char>('a' + index);
  scene.rows = n;
  scene.cols = n;
  scene.resolution_m = 0.05;
  scene.occupied.assign(static_cast<std::size_t>(n) * n, 0);
  auto& grid = scene.occupied;
  for (int r = 0; r < n; ++r) {
    grid[r * n] = grid[r * n + n - 1] = 1;
  }
  for (int c = 0; c < n; ++c) {
    grid[c] = grid[(n - 1) * n + c] = 1;
  }

  // Two dividing walls make four rooms; doors are wide enough for the
  // planner's 2-cell obstacle dilation.
  std::uniform_int_distribution<int> jitter(-n / 10, n / 10);
  const int wall_c = n / 2 + jitter(rng);
  const int wall_r = n / 2 + jitter(rng);
  for (int r = 1; r < n - 1; ++r) grid[r * n + wall_c] = 1;
  for (int c = 1; c < n - 1; ++c) grid[wall_r * n + c] = 1;

  const int door_half = 5 + static_cast<int>(rng() % 3);  // 11..15 cells wide
  std::uniform_int_distribution<int> upper(door_half + 2, wall_r - door_half - 2);
  std::uniform_int_distribution<int> lower(wall_r + door_half + 2, n - door_half - 3);
  std::uniform_int_distribution<int> left(door_half + 2, wall_c - door_half - 2);
  std::uniform_int_distribution<int> right(wall_c + door_half + 2, n - door_half - 3);
  carve_door(grid, n, true, wall_c, upper(rng), door_half);
  carve_door(grid, n, true, wall_c, lower(rng), door_half);
  carve_door(grid, n, false, wall_r, left(rng), door_half);
  carve_door(grid, n, false, wall_r, right(rng), door_half);

  // Room bounding boxes (r0, r1, c0, c1), interiors only.
  const int room_box[4][4] = {
      {1, wall_r - 1, 1, wall_c - 1},
      {1, wall_r - 1, wall_c + 1, n - 2},
      {wall_r + 1, n - 2, 1, wall_c - 1},
      {wall_r + 1, n - 2, wall_c + 1, n - 2},
  };

  out.start = Cell{(1 + wall_r - 1) / 2, (1 + wall_c - 1) / 2};  // room 0 centre
  for (int dr = -3; dr <= 3; ++dr)
    for (int dc = -3; dc <= 3; ++dc)
      grid[(out.start.row + dr) * n + out.start.col + dc] = 0;

  out.target = kGoalCategories[(index + static_cast<int>(rng() % 3)) % 6];
  const int target_room = 1 + static_cast<int>(rng() % 3);  // never the start room

  const auto place_block = [&](int room, int h, int w, int clearance,
                               bool occupied_cells) -> std::vector<Cell> {
    std::uniform_int_distribution<int> rr(room_box[room][0] + clearance,
                                          room_box[room][1] - clearance - h);
    std::uniform_int_distribution<int> cc(room_box[room][2] + clearance,
                                          room_box[room][3] - clearance - w);
    for (int attempt = 0; attempt < 60; ++attempt) {
      const int r0 = rr(rng), c0 = cc(rng);
      bool clash = false;
      for (int r = r0 - clearance; r <= r0 + h + clearance && !clash; ++r)
        for (int c = c0 - clearance; c <= c0 + w + clearance; ++c)
          if (grid[r * n + c] ||
              (std::abs(r - out.start.row) < 8 && std::abs(c - out.start.col) < 8)) {
            clash = true;
            break;
          }
      if (clash) continue;
      std::vector<Cell> cells;
      for (int r = r0; r < r0 + h; ++r)
        for (int c = c0; c < c0 + w; ++c) {
          if (occupied_cells) grid[r * n + c] = 1;
          cells.push_back(Cell{r, c});
        }
      return cells;
    }
    return {};
  };

  // Furniture: occupied blocks with non-target labels.
  for (int room = 0; room < 4; ++room) {
    const int pieces = 1 + static_cast<int>(rng() % 2);
    for (int p = 0; p < pieces; ++p) {
      const int h = 4 + static_cast<int>(rng() % 5);
      const int w = 4 + static_cast<int>(rng() % 7);
      const auto cells = place_block(room, h, w, 6, true);
      if (cells.empty()) continue;
      std::string category;
      do {
        category = kGoalCategories[rng() % 6];
      } while (category == out.target);
      sim::SceneObject obj;
      obj.category = *category_id(category);
      obj.cells = cells;
      scene.objects.push_back(std::move(obj));
    }
  }

  // The goal object: a free-standing 2x2 block the robots can walk onto.
  std::vector<Cell> target_cells;
  for (int attempt = 0; attempt < 40 && target_cells.empty(); ++attempt)
    target_cells = place_block(target_room, 2, 2, 7, false);
  if (target_cells.empty())
    throw Error(ErrorKind::Validation, "corpus generator failed to place a target");
  sim::SceneObject target_obj;
  target_obj.category = *category_id(out.target);
  target_obj.cells = target_cells;
  scene.objects.push_back(std::move(target_obj));

  scene.label.assign(grid.size(), kNoCategory);
  for (const auto& obj : scene.objects)
    for (const Cell& c : obj.cells) scene.label[scene.index(c)] = obj.category;
  scene.validate();

  // The target must stay reachable on the dilated planning mask.
  const auto blocked = dilate_chebyshev(grid, n, n, 2);
  std::vector<std::uint8_t> traversable(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) traversable[i] = blocked[i] ? 0 : 1;
  const auto source =
      local_policy::nearest_traversable(traversable, n, n, out.start, 4);
  if (!source) throw Error(ErrorKind::Validation, "corpus start is blocked");
  const auto field =
      local_policy::fmm_field(traversable, n, n, scene.resolution_m, *source);
  double dist = std::numeric_limits<double>::infinity();
  for (const Cell& c : target_cells)
    if (field.reachable(c)) dist = std::min(dist, field.at(c));
  if (!std::isfinite(dist) || dist < 1.5)
    throw Error(ErrorKind::Validation,
                "corpus target unreachable or too close in " + scene.id);
  return out;
}

int gen_corpus(const std::string& out_dir, std::uint64_t seed) {
  std::filesystem::create_directories(out_dir);
  json eps_closed = {{"episodes", json::array()}};
  json eps_ordering = {{"episodes", json::array()}};

  for (int index = 0; index < 10; ++index) {
    CorpusScene cs;
    // Re-roll layouts that fail the reachability screen.
    std::uint64_t salt = 0;
    while (true) {
      try {
        cs = make_apartment(seed + salt, index);
        break;
      } catch (const Error&) {
        ++salt;
        if (salt > 50) throw;
      }
    }
    std::ofstream scene_out(out_dir + "/" + cs.scene.id + ".json");
    scene_out << sim::scene_to_json(cs.scene) << "\n";

    const auto [sx, sy] = cs.scene.cell_center(cs.start);
    json base = {
        {"scene", cs.scene.id}, {"target", cs.target},
        {"start", {sx, sy}},    {"robots", 2},
        {"max_steps", 500},     {"map_side_m", 16.0},
    };
    json e = base;
    e["id"] = cs.scene.id + "_ep0";
    e["seed"] = 1000 + index;
    eps_closed["episodes"].push_back(e);

    for (int run = 0; run < 5; ++run) {
      json o = base;
      o["id"] = cs.scene.id + "_run" + std::to_string(run);
      o["seed"] = 5000 + 10 * index + run;
      eps_ordering["episodes"].push_back(o);
    }
  }

  std::ofstream closed(out_dir + "/episodes_closed_loop.json");
  closed << eps_closed.dump(2) << "\n";
  std::ofstream ordering(out_dir + "/episodes_ordering.json");
  ordering << eps_ordering.dump(2) << "\n";
  std::cout << "wrote 10 scenes and 2 episode lists to " << out_dir << "\n";
  return 0;
}

// ---------------------------------------------------------------------------

int run_command(const std::string& scenes_dir, const std::string& episodes_file,
                const std::string& planner, const std::string& vlm,
                std::uint64_t seed, const std::string& out_dir, double lambda,
                int robots, const std::string& prompt_mode, bool render_trajectory,
                bool dump_clouds, const std::string& config_file, int jobs) {
  runner::BatchOptions options;
  prompt::EndpointConfig endpoint;
  if (!config_file.empty())
    config::apply_config(config::load_config_file(config_file), options.episode,
                         endpoint);

  if (planner == "greedy") options.episode.planner = planners::PolicyTag::Greedy;
  else if (planner == "costutil") options.episode.planner = planners::PolicyTag::CostUtility;
  else if (planner == "random") options.episode.planner = planners::PolicyTag::Random;
  else if (planner == "vlm") options.episode.planner = planners::PolicyTag::Vlm;
  else throw Error(ErrorKind::Argument, "unknown planner " + planner);

  if (options.episode.planner == planners::PolicyTag::Vlm) {
    if (vlm == "live") options.vlm_choice = runner::VlmClientChoice::Live;
    else if (vlm == "mock-greedy") options.vlm_choice = runner::VlmClientChoice::MockGreedy;
    else if (vlm.rfind("scripted:", 0) == 0) {
      options.vlm_choice = runner::VlmClientChoice::Scripted;
      options.scripted_path = vlm.substr(9);
    } else {
      throw Error(ErrorKind::Argument,
                  "--vlm must be live, mock-greedy or scripted:<file>");
    }
  }

  options.episode.lambda_cu = lambda;
  options.episode.vlm.mode = prompt_mode == "obstacle_only"
                                 ? prompt::PromptMode::ObstacleOnly
                                 : prompt::PromptMode::Topview;
  options.episode.render_trajectory = render_trajectory;
  options.episode.dump_cloud = dump_clouds;
  if (render_trajectory || dump_clouds) options.episode.render_dir = out_dir + "/plots";
  options.endpoint = endpoint;
  options.seed = seed;
  options.robots_override = robots;
  options.jobs = jobs;

  const auto report = runner::run_batch(scenes_dir, episodes_file, options);
  runner::write_batch(report, out_dir);

  std::cout << "episodes: " << report.records.size() << "\n"
            << "SR:  " << report.sr << "\n"
            << "SPL: " << report.spl << "\n"
            << "DTG: " << report.dtg.mean_all << " (failures only: "
            << report.dtg.mean_failures << ", undefined: " << report.dtg.excluded_absent
            << ")\n"
            << "mean steps: " << report.mean_steps << "\n"
            << "results: " << out_dir << "/results.jsonl\n";
  int errors = 0;
  for (const auto& r : report.records)
    if (!r.error.empty()) ++errors;
  if (errors) std::cout << errors << " episode(s) aborted with errors\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-robot visual target navigation on a 2D grid world"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "Run a batch of episodes");
  std::string scenes_dir, episodes_file, out_dir = "out";
  std::string planner = "greedy", vlm = "mock-greedy", prompt_mode = "topview";
  std::string config_file;
  std::uint64_t seed = 0;
  double lambda = planners::kDefaultLambdaCu;
  int robots = 0, jobs = 1;
  bool render_trajectory = false, dump_clouds = false;
  run->add_option("--scenes", scenes_dir, "Directory with <scene>.json files")->required();
  run->add_option("--episodes", episodes_file, "Episode list JSON file")->required();
  run->add_option("--planner", planner, "greedy|costutil|random|vlm");
  run->add_option("--vlm", vlm, "live|mock-greedy|scripted:<file>");
  run->add_option("--seed", seed, "Batch seed for episodes without one");
  run->add_option("--out", out_dir, "Output directory");
  run->add_option("--lambda", lambda, "Cost-utility trade-off");
  run->add_option("--robots", robots, "Override robot count for every episode");
  run->add_option("--prompt-mode", prompt_mode, "topview|obstacle_only");
  run->add_option("--config", config_file, "Key-value config file");
  run->add_option("--jobs", jobs, "Episodes to run in parallel");
  run->add_flag("--render-trajectory", render_trajectory,
                "Write per-episode trajectory PNGs");
  run->add_flag("--dump-clouds", dump_clouds, "Write per-episode point cloud dumps");

  auto* gen = app.add_subcommand("gen-corpus", "Generate the synthetic scene corpus");
  std::string gen_out = "scenes";
  std::uint64_t gen_seed = 7;
  gen->add_option("--out", gen_out, "Output directory");
  gen->add_option("--seed", gen_seed, "Generator seed");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed())
      return run_command(scenes_dir, episodes_file, planner, vlm, seed, out_dir,
                         lambda, robots, prompt_mode, render_trajectory, dump_clouds,
                         config_file, jobs);
    if (gen->parsed()) return gen_corpus(gen_out, gen_seed);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "unexpected error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
