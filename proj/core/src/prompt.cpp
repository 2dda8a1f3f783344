#include "mrnav/prompt.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

#include <json.hpp>

#include "mrnav/error.hpp"

namespace mrnav::prompt {

using nlohmann::json;

namespace {

// Pixel position of a cell, north-up.
inline std::pair<int, int> cell_to_pixel(Cell c, int grid_size, int scale) {
  return {c.col * scale, (grid_size - 1 - c.row) * scale};
}

void fill_cell(Image& img, Cell c, int grid_size, int scale, Rgb color) {
  const auto [px, py] = cell_to_pixel(c, grid_size, scale);
  for (int dy = 0; dy < scale; ++dy)
    for (int dx = 0; dx < scale; ++dx) img.set(px + dx, py + dy, color);
}

}  // namespace

Image render_topview(const SemanticPointCloud& cloud, const GridMap& map,
                     const std::vector<Pose>& poses, PromptMode mode, int scale) {
  const int n = map.size();
  Image img(n * scale, n * scale, kUnknownColor);

  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) {
      const Cell cell{r, c};
      const int i = map.index(cell);
      if (!map.explored[i]) continue;
      fill_cell(img, cell, n, scale, map.obstacle[i] ? kObstacleColor : kExploredFreeColor);
    }
  }

  if (mode == PromptMode::Topview) {
    // Labeled points paint in grid order; higher points win a cell, later
    // points win ties, matching the semantic projection rule.
    std::vector<double> height(static_cast<std::size_t>(n) * n,
                               -std::numeric_limits<double>::infinity());
    for (const CloudPoint& p : cloud.points) {
      if (p.category == kNoCategory) continue;
      if (!in_extent(p.x, p.y, map.spec)) continue;
      const Cell cell = world_to_grid(p.x, p.y, map.spec);
      if (p.z < height[map.index(cell)]) continue;
      height[map.index(cell)] = p.z;
      fill_cell(img, cell, n, scale, category_color(p.category));
    }
  }

  for (std::size_t i = 0; i < poses.size(); ++i) {
    if (!in_extent(poses[i].x, poses[i].y, map.spec)) continue;
    const Cell cell = world_to_grid(poses[i].x, poses[i].y, map.spec);
    const auto [px, py] = cell_to_pixel(cell, n, scale);
    const Rgb color = robot_color(static_cast<int>(i));
    draw_circle(img, px + scale / 2, py + scale / 2, 3 * scale, color);
    draw_disk(img, px + scale / 2, py + scale / 2, scale / 2, color);
    draw_text(img, px + scale / 2 + 3 * scale + 2, py + scale / 2 - 3,
              std::to_string(i), color);
  }
  return img;
}

VisualPrompt render_candidates(const Image& base,
                               const std::vector<frontier::FrontierCluster>& frontiers,
                               int scale) {
  if (frontiers.empty())
    throw Error(ErrorKind::Argument, "no frontier candidates to render");
  const int grid_size = base.height / scale;

  VisualPrompt vp;
  vp.width = base.width;
  vp.height = base.height;
  for (const auto& cluster : frontiers) {
    Image img = base;
    for (const Cell& cell : cluster.cells)
      fill_cell(img, cell, grid_size, scale, kFrontierHighlight);
    draw_text(img, 2, 2, std::to_string(cluster.id), kLabelInk);
    vp.images.push_back(std::move(img));
    vp.frontier_ids.push_back(cluster.id);
  }
  return vp;
}

std::string build_text_prompt(const std::string& target_category, int robot_count,
                              const std::vector<std::string>& extra_context) {
  std::ostringstream out;
  out << "Task: Locate the given target.\n\n";
  out << "Context:\n";
  out << "We have " << robot_count
      << " robots. Each robot perceives the environment and can navigate to "
         "explore unknown areas.\n";
  out << "The global top-view map shows the positions of each robot, candidate "
         "frontiers, and their IDs.\n";
  for (const std::string& line : extra_context) out << line << "\n";
  out << "\nRequirements:\n";
  out << "Understand: the scene layout, the robots' state, and the frontiers.\n";
  out << "Analyze: collaborative exploration and efficient target searching.\n";
  out << "Decide: a frontier assignment policy such that each robot moves to an "
         "optimal frontier.\n";
  out << "Justify: Reconsider the decision with a concise explanation.\n";
  out << "\nInput: Multiple top-view maps, each containing one candidate "
         "frontier. The target object category is \""
      << target_category << "\".\n";
  out << "Output: A JSON object indicating the frontier IDs assigned to each "
         "robot, and nothing else. Use exactly the keys ";
  for (int i = 0; i < robot_count; ++i) {
    if (i) out << (i + 1 == robot_count ? " and " : ", ");
    out << "\"robot_" << i << "\"";
  }
  out << ", e.g. {\"robot_0\": 1";
  if (robot_count > 1) out << ", \"robot_1\": 0";
  out << "}.\n";
  return out.str();
}

std::string serialize_assignment(const std::map<int, int>& robot_to_frontier) {
  json j = json::object();
  for (const auto& [robot, frontier_id] : robot_to_frontier)
    j["robot_" + std::to_string(robot)] = frontier_id;
  return j.dump();
}

std::string_view to_string(ParseErrorKind kind) {
  switch (kind) {
    case ParseErrorKind::None: return "none";
    case ParseErrorKind::NoJson: return "no-json";
    case ParseErrorKind::BadKeys: return "bad-keys";
    case ParseErrorKind::OutOfRange: return "out-of-range";
    case ParseErrorKind::DuplicateId: return "duplicate-id";
  }
  return "unknown";
}

namespace {

// First balanced {...} span, string-aware; VLM replies often wrap JSON in
// prose or code fences.
std::optional<std::string> first_json_object(const std::string& text) {
  for (std::size_t start = 0; start < text.size(); ++start) {
    if (text[start] != '{') continue;
    int depth = 0;
    bool in_string = false;
    for (std::size_t i = start; i < text.size(); ++i) {
      const char ch = text[i];
      if (in_string) {
        if (ch == '\\')
          ++i;
        else if (ch == '"')
          in_string = false;
        continue;
      }
      if (ch == '"') in_string = true;
      else if (ch == '{') ++depth;
      else if (ch == '}') {
        --depth;
        if (depth == 0) return text.substr(start, i - start + 1);
      }
    }
  }
  return std::nullopt;
}

}  // namespace

ParsedReply parse_reply(const std::string& raw, int robot_count, int frontier_count) {
  ParsedReply result;
  const auto span = first_json_object(raw);
  if (!span) {
    result.error = ParseErrorKind::NoJson;
    result.detail = "no JSON object in reply";
    return result;
  }
  json j = json::parse(*span, nullptr, false);
  if (j.is_discarded() || !j.is_object()) {
    result.error = ParseErrorKind::NoJson;
    result.detail = "extracted span is not a JSON object";
    return result;
  }

  if (static_cast<int>(j.size()) != robot_count) {
    result.error = ParseErrorKind::BadKeys;
    result.detail = "expected " + std::to_string(robot_count) + " robot keys, got " +
                    std::to_string(j.size());
    return result;
  }
  for (int i = 0; i < robot_count; ++i) {
    const std::string key = "robot_" + std::to_string(i);
    if (!j.contains(key) || !j[key].is_number_integer()) {
      result.error = ParseErrorKind::BadKeys;
      result.detail = "missing or non-integer key " + key;
      return result;
    }
    result.assignment[i] = j[key].get<int>();
  }
  for (const auto& [robot, fid] : result.assignment) {
    if (fid < 0 || fid >= frontier_count) {
      result.assignment.clear();
      result.error = ParseErrorKind::OutOfRange;
      result.detail = "frontier id " + std::to_string(fid) + " for robot " +
                      std::to_string(robot) + " outside [0, " +
                      std::to_string(frontier_count) + ")";
      return result;
    }
  }
  for (auto it = result.assignment.begin(); it != result.assignment.end(); ++it) {
    for (auto jt = std::next(it); jt != result.assignment.end(); ++jt) {
      if (it->second == jt->second) {
        result.error = ParseErrorKind::DuplicateId;
        result.detail = "frontier " + std::to_string(it->second) +
                        " assigned to robots " + std::to_string(it->first) + " and " +
                        std::to_string(jt->first);
        result.assignment.clear();
        return result;
      }
    }
  }
  return result;
}

std::string_view to_string(VlmErrorKind kind) {
  switch (kind) {
    case VlmErrorKind::None: return "none";
    case VlmErrorKind::Timeout: return "timeout";
    case VlmErrorKind::Http: return "http";
    case VlmErrorKind::Transport: return "transport";
    case VlmErrorKind::Credential: return "credential";
    case VlmErrorKind::Exhausted: return "exhausted";
  }
  return "unknown";
}

std::string base64_encode(const std::uint8_t* data, std::size_t len) {
  static const char* alphabet =
      "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
  std::string out;
  out.reserve((len + 2) / 3 * 4);
  for (std::size_t i = 0; i < len; i += 3) {
    const std::uint32_t b0 = data[i];
    const std::uint32_t b1 = i + 1 < len ? data[i + 1] : 0;
    const std::uint32_t b2 = i + 2 < len ? data[i + 2] : 0;
    const std::uint32_t triple = (b0 << 16) | (b1 << 8) | b2;
    out.push_back(alphabet[(triple >> 18) & 0x3F]);
    out.push_back(alphabet[(triple >> 12) & 0x3F]);
    out.push_back(i + 1 < len ? alphabet[(triple >> 6) & 0x3F] : '=');
    out.push_back(i + 2 < len ? alphabet[triple & 0x3F] : '=');
  }
  return out;
}

}  // namespace mrnav::prompt
