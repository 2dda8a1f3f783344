// Acceptance suite: every release criterion in one binary, one line each.
// Exit status is the number of failed criteria.

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "mrnav/error.hpp"
#include "mrnav/frontier.hpp"
#include "mrnav/local_policy.hpp"
#include "mrnav/planners.hpp"
#include "mrnav/prompt.hpp"
#include "mrnav/runner.hpp"
#include "oracles.hpp"

using namespace mrnav;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

std::vector<Outcome> g_results;

template <typename Fn>
void criterion(const std::string& name, double budget_s, Fn&& body) {
  Outcome outcome;
  outcome.name = name;
  const auto started = std::chrono::steady_clock::now();
  try {
    outcome.detail = body();
    outcome.pass = true;
  } catch (const std::exception& e) {
    outcome.detail = e.what();
    outcome.pass = false;
  }
  outcome.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  if (budget_s > 0.0 && outcome.seconds > budget_s) {
    outcome.pass = false;
    outcome.detail += " [exceeded " + std::to_string(budget_s) + " s budget]";
  }
  g_results.push_back(outcome);
}

void fail(const std::string& message) { throw std::runtime_error(message); }

template <typename T>
std::string str(const T& v) {
  std::ostringstream out;
  out << v;
  return out.str();
}

// --------------------------------------------------------------- criteria --

std::string fmm_oracle_suite() {
  std::mt19937 rng(20240501);
  const int n = 48;
  const double h = 0.05;
  double worst_residual = 0.0;
  int cells_checked = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const Cell src{static_cast<int>(rng() % n), static_cast<int>(rng() % n)};
    const auto free = oracles::random_mask(rng, n, n, 0.15 + 0.004 * trial, src);
    const auto field = local_policy::fmm_field(free, n, n, h, src);
    const auto d8 = oracles::dijkstra8(free, n, n, h, src);
    for (int r = 0; r < n; ++r) {
      for (int c = 0; c < n; ++c) {
        const int i = r * n + c;
        if (!std::isfinite(field.time_m[i])) {
          if (std::isfinite(d8[i])) fail("reachability disagrees with Dijkstra");
          continue;
        }
        const double euclid = std::hypot(r - src.row, c - src.col) * h;
        if (field.time_m[i] < euclid - 1e-9)
          fail("FMM below the Euclidean lower bound at trial " + str(trial));
        if (field.time_m[i] > d8[i] + 1e-9)
          fail("FMM above the 8-connected Dijkstra bound at trial " + str(trial));
        if (Cell{r, c} != src) {
          const double residual = std::abs(
              field.time_m[i] - oracles::eikonal_update(field.time_m, free, n, n, r, c, h));
          worst_residual = std::max(worst_residual, residual);
          if (residual >= 1e-9) fail("eikonal residual " + str(residual));
        }
        ++cells_checked;
      }
    }
  }
  return "50 masks, " + str(cells_checked) + " cells, max residual " +
         str(worst_residual);
}

std::string frontier_equivalence() {
  std::mt19937 rng(77001);
  frontier::FrontierParams params;
  int clusters_total = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 32 + static_cast<int>(rng() % 33);  // up to 64x64
    const GridMap map = oracles::random_partial_map(rng, n);
    const auto got = frontier::extract_frontiers(map, params);
    const auto expected = oracles::brute_frontiers(map, params.dilation_radius_cells,
                                                   params.min_cluster_size);
    if (got.size() != expected.size())
      fail("cluster count mismatch on trial " + str(trial));
    for (std::size_t i = 0; i < got.size(); ++i) {
      if (got[i].id != expected[i].id || got[i].size != expected[i].size ||
          got[i].cells != expected[i].cells ||
          !(got[i].representative == expected[i].representative))
        fail("cluster content mismatch on trial " + str(trial));
    }
    clusters_total += static_cast<int>(got.size());
  }
  return "100 maps, " + str(clusters_total) + " clusters matched exactly";
}

std::string assignment_oracles() {
  std::mt19937 rng(5150);
  int trials_done = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 96;
    GridSpec spec;
    spec.side_m = n * 0.05;
    spec.resolution_m = 0.05;
    GridMap map(spec);
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < n; ++c) map.mark_explored(Cell{r, c});

    planners::PlannerInput input;
    input.map = &map;
    input.fallback_seed = trial;
    const int robots = 1 + static_cast<int>(rng() % 3);
    for (int i = 0; i < robots; ++i) {
      const Cell c{8 + static_cast<int>(rng() % 80), 8 + static_cast<int>(rng() % 80)};
      const auto [wx, wy] = grid_to_world(c, spec);
      input.robot_poses.push_back(Pose{wx, wy, 0.0});
    }
    const int nf = 1 + static_cast<int>(rng() % 5);
    for (int f = 0; f < nf; ++f) {
      frontier::FrontierCluster cluster;
      cluster.id = f;
      const Cell rep{8 + static_cast<int>(rng() % 80), 8 + static_cast<int>(rng() % 80)};
      for (int k = 0; k < 3; ++k) cluster.cells.push_back(Cell{rep.row, rep.col - 1 + k});
      cluster.size = 3 + static_cast<int>(rng() % 40);
      cluster.representative = rep;
      input.frontiers.push_back(std::move(cluster));
    }

    // independent sequential-argmax enumeration over the same inputs
    const double lambda = 1.0;
    std::vector<std::vector<double>> dist(robots);
    for (int i = 0; i < robots; ++i) dist[i] = planners::frontier_distances(input, i);

    const auto sequential = [&](bool greedy) {
      std::vector<int> picks(robots, -1);
      std::set<int> taken;
      for (int i = 0; i < robots; ++i) {
        double best = -1e300;
        for (int f = 0; f < nf; ++f) {
          if (taken.count(f) || !std::isfinite(dist[i][f])) continue;
          const double s =
              greedy ? -dist[i][f] : input.frontiers[f].size - lambda * dist[i][f];
          if (s > best) {
            best = s;
            picks[i] = f;
          }
        }
        if (picks[i] >= 0) taken.insert(picks[i]);
      }
      return picks;
    };

    const auto check = [&](const planners::Assignment& got, const std::vector<int>& want,
                           const char* tag) {
      for (int i = 0; i < robots; ++i) {
        if (want[i] < 0) {
          if (got.goals[i].kind != planners::GoalKind::FallbackCell)
            fail(std::string(tag) + ": expected fallback on trial " + str(trial));
        } else if (got.goals[i].kind != planners::GoalKind::Frontier ||
                   got.goals[i].frontier_id != want[i]) {
          fail(std::string(tag) + ": assignment mismatch on trial " + str(trial));
        }
      }
    };
    check(planners::assign_greedy(input), sequential(true), "greedy");
    check(planners::assign_cost_utility(input, lambda), sequential(false), "cost-utility");

    // lambda = 0 must reduce to size-maximal selection
    const auto cu0 = planners::assign_cost_utility(input, 0.0);
    std::set<int> taken;
    for (int i = 0; i < robots; ++i) {
      int want = -1;
      int best_size = -1;
      for (int f = 0; f < nf; ++f) {
        if (taken.count(f) || !std::isfinite(dist[i][f])) continue;
        if (input.frontiers[f].size > best_size) {
          best_size = input.frontiers[f].size;
          want = f;
        }
      }
      if (want >= 0) {
        taken.insert(want);
        if (cu0.goals[i].frontier_id != want)
          fail("lambda=0 is not max-size selection on trial " + str(trial));
      }
    }
    ++trials_done;
  }
  return str(trials_done) + " random instances matched the enumeration oracle";
}

std::string metrics_examples() {
  using runner::EpisodeRecord;
  const auto rec = [](bool success, double l, double p) {
    EpisodeRecord r;
    r.success = success;
    r.shortest_path_m = l;
    r.path_of_success_robot_m = p;
    r.termination = success ? "stop" : "timeout";
    r.dtg_m = success ? 0.0 : 1.0;
    return r;
  };
  if (runner::compute_spl({rec(true, 10, 10)}) != 1.0) fail("SPL(l=p=10) != 1");
  if (runner::compute_spl({rec(true, 10, 20)}) != 0.5) fail("SPL(l=10,p=20) != 0.5");
  if (runner::compute_spl({rec(true, 10, 20), rec(false, 1, 1)}) != 0.25)
    fail("SPL with one failure != 0.25");
  if (runner::compute_sr({rec(true, 1, 1), rec(false, 1, 1), rec(true, 1, 1),
                          rec(true, 1, 1)}) != 0.75)
    fail("SR of [1,0,1,1] != 0.75");
  if (runner::compute_sr({rec(false, 1, 1)}) != 0.0) fail("SR all-fail != 0");
  if (runner::compute_sr({rec(true, 1, 1)}) != 1.0) fail("SR all-pass != 1");

  std::mt19937 rng(31337);
  std::uniform_real_distribution<double> len(0.05, 25.0);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<EpisodeRecord> batch;
    const int n = 1 + static_cast<int>(rng() % 16);
    for (int i = 0; i < n; ++i) batch.push_back(rec(rng() % 2 == 0, len(rng), len(rng)));
    const double sr = runner::compute_sr(batch);
    const double spl = runner::compute_spl(batch);
    if (!(0.0 <= spl && spl <= sr && sr <= 1.0))
      fail("0 <= SPL <= SR violated on batch " + str(trial));
    for (const auto& r : batch) {
      if (!r.success) continue;
      const double term = r.shortest_path_m /
                          std::max(r.shortest_path_m, r.path_of_success_robot_m);
      if (term > 1.0 + 1e-12) fail("per-record SPL term above 1");
    }
  }
  return "unit examples exact, 100 random batches bounded";
}

std::string g_scenes_dir;
std::string g_cli_path;
std::string g_work_dir;

std::string closed_loop_success() {
  runner::BatchOptions options;
  options.episode.planner = planners::PolicyTag::Vlm;
  options.vlm_choice = runner::VlmClientChoice::MockGreedy;
  options.seed = 3;

  const std::string episodes = g_scenes_dir + "/episodes_closed_loop.json";
  const auto two = runner::run_batch(g_scenes_dir, episodes, options);
  options.robots_override = 1;
  const auto one = runner::run_batch(g_scenes_dir, episodes, options);

  const auto mean_steps = [](const runner::BatchReport& report) {
    double sum = 0;
    for (const auto& r : report.records) sum += r.steps;
    return sum / report.records.size();
  };
  const double steps2 = mean_steps(two);
  const double steps1 = mean_steps(one);
  if (two.sr < 0.9)
    fail("2-robot SR " + str(two.sr) + " below 0.9");
  if (!(steps2 < steps1))
    fail("2-robot mean steps " + str(steps2) + " not below 1-robot " + str(steps1));
  return "2-robot SR " + str(two.sr) + ", mean steps " + str(steps2) +
         " vs 1-robot SR " + str(one.sr) + ", mean steps " + str(steps1);
}

std::string planner_ordering() {
  const std::string episodes = g_scenes_dir + "/episodes_ordering.json";
  runner::BatchOptions options;
  options.seed = 11;
  options.episode.planner = planners::PolicyTag::Greedy;
  const auto greedy = runner::run_batch(g_scenes_dir, episodes, options);
  options.episode.planner = planners::PolicyTag::CostUtility;
  const auto cu = runner::run_batch(g_scenes_dir, episodes, options);
  if (greedy.records.size() < 50) fail("corpus has fewer than 50 episodes");
  if (cu.sr < greedy.sr - 0.05)
    fail("cost-utility SR " + str(cu.sr) + " below greedy SR " + str(greedy.sr) +
         " - 0.05");
  return "cost-utility SR " + str(cu.sr) + " vs greedy SR " + str(greedy.sr) + " on " +
         str(greedy.records.size()) + " episodes";
}

std::string prompt_protocol() {
  // lossless serialize -> parse round trip
  std::mt19937 rng(909);
  for (int trial = 0; trial < 100; ++trial) {
    const int robots = 1 + static_cast<int>(rng() % 4);
    const int frontiers = robots + static_cast<int>(rng() % 5);
    std::map<int, int> assignment;
    std::set<int> used;
    for (int r = 0; r < robots; ++r) {
      int f;
      do {
        f = static_cast<int>(rng() % frontiers);
      } while (used.count(f));
      used.insert(f);
      assignment[r] = f;
    }
    const auto parsed =
        prompt::parse_reply(prompt::serialize_assignment(assignment), robots, frontiers);
    if (!parsed.ok() || parsed.assignment != assignment)
      fail("round-trip loss on trial " + str(trial));
  }

  // canned malformed replies: category must be exact and the fallback must fire
  using prompt::ParseErrorKind;
  const std::vector<std::pair<std::string, ParseErrorKind>> bad = {
      {"", ParseErrorKind::NoJson},
      {"I cannot decide.", ParseErrorKind::NoJson},
      {"robot_0: 1, robot_1: 0", ParseErrorKind::NoJson},
      {"[0, 1]", ParseErrorKind::NoJson},
      {"{\"robot_0\": 1, \"robot_1\":", ParseErrorKind::NoJson},
      {"{\"robot_0\": 1}", ParseErrorKind::BadKeys},
      {"{\"robot_0\": 1, \"robot_1\": 0, \"robot_2\": 1}", ParseErrorKind::BadKeys},
      {"{\"agent_0\": 1, \"agent_1\": 0}", ParseErrorKind::BadKeys},
      {"{\"robot_0\": \"one\", \"robot_1\": 0}", ParseErrorKind::BadKeys},
      {"{\"robot_0\": 0.5, \"robot_1\": 0}", ParseErrorKind::BadKeys},
      {"{\"robot_0\": null, \"robot_1\": 0}", ParseErrorKind::BadKeys},
      {"{\"robot_1\": 0, \"robot_2\": 1}", ParseErrorKind::BadKeys},
      {"{\"robot_0\": 2, \"robot_1\": 0}", ParseErrorKind::OutOfRange},
      {"{\"robot_0\": -1, \"robot_1\": 0}", ParseErrorKind::OutOfRange},
      {"{\"robot_0\": 99, \"robot_1\": 98}", ParseErrorKind::OutOfRange},
      {"```json {\"robot_0\": 7, \"robot_1\": 0} ```", ParseErrorKind::OutOfRange},
      {"{\"robot_0\": 1, \"robot_1\": 1}", ParseErrorKind::DuplicateId},
      {"```json {\"robot_0\": 0, \"robot_1\": 0} ```", ParseErrorKind::DuplicateId},
      {"pick {\"robot_0\": 1, \"robot_1\": 1} ok?", ParseErrorKind::DuplicateId},
      {"{\"robot_1\": 0, \"robot_0\": 0}", ParseErrorKind::DuplicateId},
  };
  if (bad.size() != 20) fail("expected 20 canned replies");

  GridSpec spec;
  spec.side_m = 6.4;
  spec.resolution_m = 0.05;
  GridMap map(spec);
  for (int r = 0; r < map.size(); ++r)
    for (int c = 0; c < map.size(); ++c) map.mark_explored(Cell{r, c});
  planners::PlannerInput input;
  input.map = &map;
  const auto [wx, wy] = grid_to_world(Cell{64, 64}, spec);
  input.robot_poses = {Pose{wx, wy, 0}, Pose{wx, wy, kPi}};
  for (int f = 0; f < 2; ++f) {
    frontier::FrontierCluster cluster;
    cluster.id = f;
    for (int k = 0; k < 5; ++k) cluster.cells.push_back(Cell{30 + 40 * f, 30 + k});
    cluster.size = 5;
    cluster.representative = cluster.cells[2];
    input.frontiers.push_back(std::move(cluster));
  }

  for (std::size_t i = 0; i < bad.size(); ++i) {
    const auto parsed = prompt::parse_reply(bad[i].first, 2, 2);
    if (parsed.error != bad[i].second)
      fail("reply " + str(i) + " classified as " +
           std::string(prompt::to_string(parsed.error)));
    auto client = prompt::ScriptedVlmClient::from_replies({bad[i].first});
    const auto a = planners::assign_vlm(input, client);
    if (!a.fallback_used) fail("fallback did not fire for reply " + str(i));
  }

  // byte-identical renders
  SemanticPointCloud cloud;
  cloud.points.push_back(CloudPoint{wx + 0.4, wy, 1.0, 3, 0});
  const auto img1 = prompt::render_topview(cloud, map, input.robot_poses,
                                           prompt::PromptMode::Topview);
  const auto img2 = prompt::render_topview(cloud, map, input.robot_poses,
                                           prompt::PromptMode::Topview);
  const auto png1 = prompt::encode_png(img1);
  if (png1 != prompt::encode_png(img2)) fail("repeated renders differ");
  const auto vp1 = prompt::render_candidates(img1, input.frontiers);
  const auto vp2 = prompt::render_candidates(img2, input.frontiers);
  for (std::size_t i = 0; i < vp1.images.size(); ++i)
    if (prompt::encode_png(vp1.images[i]) != prompt::encode_png(vp2.images[i]))
      fail("candidate renders differ");

  return "100 round-trips lossless, 20/20 malformed replies categorized, renders "
         "byte-identical";
}

std::string cli_determinism() {
  if (g_cli_path.empty() || !fs::exists(g_cli_path)) fail("CLI binary not found");
  const fs::path work(g_work_dir);
  fs::remove_all(work);
  fs::create_directories(work);

  const fs::path replies = work / "replies.jsonl";
  {
    std::ofstream out(replies);
    for (int i = 0; i < 60; ++i) {
      if (i % 3 == 0)
        out << R"({"content": "{\"robot_0\": 0, \"robot_1\": 1}"})" << "\n";
      else if (i % 3 == 1)
        out << R"({"content": "no idea"})" << "\n";
      else
        out << R"({"content": "{\"robot_0\": 1, \"robot_1\": 0}"})" << "\n";
    }
  }

  const auto run_once = [&](const fs::path& out_dir) {
    std::ostringstream cmd;
    cmd << '"' << g_cli_path << '"' << " run --scenes " << g_scenes_dir
        << " --episodes " << g_scenes_dir << "/episodes_closed_loop.json"
        << " --planner vlm --vlm scripted:" << replies.string() << " --seed 42 --out "
        << out_dir.string() << " > " << (out_dir.string() + ".log") << " 2>&1";
    if (std::system(cmd.str().c_str()) != 0) fail("CLI run failed, see " +
                                                  out_dir.string() + ".log");
  };
  run_once(work / "run1");
  run_once(work / "run2");

  const auto slurp = [](const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
  };
  const std::string a = slurp(work / "run1" / "results.jsonl");
  const std::string b = slurp(work / "run2" / "results.jsonl");
  if (a.empty()) fail("first run produced no results");
  if (a != b) fail("JSONL outputs differ between identical runs");
  return "two CLI runs, " + str(a.size()) + " bytes of JSONL, byte-identical";
}

}  // namespace

int main(int argc, char** argv) {
  g_scenes_dir = MRNAV_SCENES_DIR;
  g_cli_path = MRNAV_CLI_PATH;
  g_work_dir = "/tmp/mrnav_acceptance";
  for (int i = 1; i + 1 < argc; i += 2) {
    const std::string flag = argv[i];
    if (flag == "--scenes") g_scenes_dir = argv[i + 1];
    else if (flag == "--cli") g_cli_path = argv[i + 1];
    else if (flag == "--workdir") g_work_dir = argv[i + 1];
  }

  criterion("fmm_oracle_suite", 30.0, fmm_oracle_suite);
  criterion("frontier_definitional_equivalence", 30.0, frontier_equivalence);
  criterion("assignment_oracles", 10.0, assignment_oracles);
  criterion("metrics", 0.0, metrics_examples);
  criterion("closed_loop_success", 300.0, closed_loop_success);
  criterion("planner_ordering", 0.0, planner_ordering);
  criterion("prompt_protocol", 0.0, prompt_protocol);
  criterion("determinism", 0.0, cli_determinism);

  int failures = 0;
  for (const auto& r : g_results) {
    std::cout << (r.pass ? "[PASS] " : "[FAIL] ") << r.name << " (" << std::fixed
              << std::setprecision(1) << r.seconds << " s): " << r.detail << "\n";
    failures += r.pass ? 0 : 1;
  }
  std::cout << (failures == 0 ? "ACCEPTANCE: all criteria passed"
                              : "ACCEPTANCE: " + std::to_string(failures) +
                                    " criterion(s) failed")
            << std::endl;
  return failures;
}
