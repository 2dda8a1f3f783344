#include "mrnav/config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "mrnav/error.hpp"

namespace mrnav::config {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

const char* kKnownKeys[] = {
    "sensor.range_m",        "sensor.fov_deg",
    "sensor.ray_count",      "sensor.label_dropout",
    "sensor.false_label_rate",
    "frontier.dilation_radius_cells", "frontier.min_cluster_size",
    "mapping.dbscan_eps_m",  "mapping.dbscan_min_pts",
    "planner.lambda_cu",     "local.plan_dilation_cells",
    "local.lookahead_m",     "local.heading_tolerance_deg",
    "local.goal_snap_radius_m",
    "vlm.base_url",          "vlm.path",
    "vlm.model",             "vlm.temperature",
    "vlm.timeout_s",         "vlm.max_tokens",
    "vlm.api_key_env",       "vlm.distance_hints",
};

double parse_double(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const double v = std::stod(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw Error(ErrorKind::Parse, "config key " + key + " needs a number, got '" + value + "'");
  }
}

int parse_int(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const int v = std::stoi(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw Error(ErrorKind::Parse, "config key " + key + " needs an integer, got '" + value + "'");
  }
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "on") return true;
  if (value == "false" || value == "0" || value == "off") return false;
  throw Error(ErrorKind::Parse, "config key " + key + " needs a boolean, got '" + value + "'");
}

}  // namespace

std::map<std::string, std::string> parse_config(const std::string& text) {
  std::map<std::string, std::string> kv;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto comment = line.find('#');
    if (comment != std::string::npos) line = line.substr(0, comment);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw Error(ErrorKind::Parse,
                  "config line " + std::to_string(lineno) + " has no '='");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.find("key") != std::string::npos && key != "vlm.api_key_env")
      throw Error(ErrorKind::Parse,
                  "credentials are environment-only; remove '" + key + "'");
    if (std::find_if(std::begin(kKnownKeys), std::end(kKnownKeys),
                     [&](const char* k) { return key == k; }) == std::end(kKnownKeys))
      throw Error(ErrorKind::Parse, "unknown config key '" + key + "'");
    kv[key] = value;
  }
  return kv;
}

std::map<std::string, std::string> load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open config file " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

void apply_config(const std::map<std::string, std::string>& kv,
                  runner::EpisodeOptions& episode, prompt::EndpointConfig& endpoint) {
  for (const auto& [key, value] : kv) {
    if (key == "sensor.range_m") episode.sensor.range_m = parse_double(key, value);
    else if (key == "sensor.fov_deg")
      episode.sensor.fov_rad = parse_double(key, value) * kPi / 180.0;
    else if (key == "sensor.ray_count") episode.sensor.ray_count = parse_int(key, value);
    else if (key == "sensor.label_dropout")
      episode.sensor.label_dropout = parse_double(key, value);
    else if (key == "sensor.false_label_rate")
      episode.sensor.false_label_rate = parse_double(key, value);
    else if (key == "frontier.dilation_radius_cells")
      episode.frontier.dilation_radius_cells = parse_int(key, value);
    else if (key == "frontier.min_cluster_size")
      episode.frontier.min_cluster_size = parse_int(key, value);
    else if (key == "mapping.dbscan_eps_m") episode.dbscan_eps_m = parse_double(key, value);
    else if (key == "mapping.dbscan_min_pts") episode.dbscan_min_pts = parse_int(key, value);
    else if (key == "planner.lambda_cu") episode.lambda_cu = parse_double(key, value);
    else if (key == "local.plan_dilation_cells")
      episode.local.plan_dilation_cells = parse_int(key, value);
    else if (key == "local.lookahead_m") episode.local.lookahead_m = parse_double(key, value);
    else if (key == "local.heading_tolerance_deg")
      episode.local.heading_tolerance_deg = parse_double(key, value);
    else if (key == "local.goal_snap_radius_m")
      episode.local.goal_snap_radius_m = parse_double(key, value);
    else if (key == "vlm.base_url") endpoint.base_url = value;
    else if (key == "vlm.path") endpoint.path = value;
    else if (key == "vlm.model") endpoint.model = value;
    else if (key == "vlm.temperature") endpoint.temperature = parse_double(key, value);
    else if (key == "vlm.timeout_s") endpoint.timeout_s = parse_int(key, value);
    else if (key == "vlm.max_tokens") endpoint.max_tokens = parse_int(key, value);
    else if (key == "vlm.api_key_env") endpoint.api_key_env = value;
    else if (key == "vlm.distance_hints")
      episode.vlm.include_distance_hints = parse_bool(key, value);
  }
  episode.vlm.model = endpoint.model;
  episode.vlm.temperature = endpoint.temperature;
}

}  // namespace mrnav::config
