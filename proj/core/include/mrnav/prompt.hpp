#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "mrnav/frontier.hpp"
#include "mrnav/grid.hpp"
#include "mrnav/image.hpp"
#include "mrnav/types.hpp"

namespace mrnav::prompt {

enum class PromptMode { Topview, ObstacleOnly };

inline constexpr int kRenderScale = 2;  // pixels per cell

/// Colored top-view of the current state at 1 px/cell scaled by kRenderScale:
/// unknown white, explored free light gray, obstacle dark gray, labeled
/// points in the category palette (skipped in ObstacleOnly mode). Robots are
/// drawn as circles with their id next to them. Pixel rows run north-up:
/// py = (n - 1 - row) * scale. Pure function of its inputs.
Image render_topview(const SemanticPointCloud& cloud, const GridMap& map,
                     const std::vector<Pose>& poses, PromptMode mode,
                     int scale = kRenderScale);

struct VisualPrompt {
  std::vector<Image> images;       // one per frontier candidate
  std::vector<int> frontier_ids;   // parallel to images
  int width = 0;
  int height = 0;
};

/// One copy of the base image per frontier, the cluster cells masked in the
/// highlight color and the id drawn in the top-left corner.
/// Throws Error{Argument} on an empty frontier list.
VisualPrompt render_candidates(const Image& base,
                               const std::vector<frontier::FrontierCluster>& frontiers,
                               int scale = kRenderScale);

/// Task / Context / Requirements / Input / Output template instantiated with
/// the target and the robot key list. Byte-deterministic.
std::string build_text_prompt(const std::string& target_category, int robot_count,
                              const std::vector<std::string>& extra_context = {});

/// Canonical reply serialization: {"robot_0": f0, "robot_1": f1, ...}.
std::string serialize_assignment(const std::map<int, int>& robot_to_frontier);

enum class ParseErrorKind { None, NoJson, BadKeys, OutOfRange, DuplicateId };
std::string_view to_string(ParseErrorKind kind);

struct ParsedReply {
  std::map<int, int> assignment;  // robot id -> frontier id
  ParseErrorKind error = ParseErrorKind::None;
  std::string detail;

  bool ok() const { return error == ParseErrorKind::None; }
};

/// Extracts the first JSON object from free-form reply text (code fences and
/// surrounding prose tolerated) and validates it: keys must be exactly
/// robot_0..robot_{n-1}, values integers in [0, frontier_count) and pairwise
/// distinct. Failures come back as categorized data, never exceptions.
ParsedReply parse_reply(const std::string& raw, int robot_count, int frontier_count);

struct VlmRequest {
  std::string system_text;
  std::string user_text;
  std::vector<std::vector<std::uint8_t>> images_png;
  std::string model;
  double temperature = 0.0;
};

struct VlmReply {
  std::string content;
  int prompt_tokens = -1;      // -1 when the transport gives no accounting
  int completion_tokens = -1;
  double latency_s = 0.0;
};

enum class VlmErrorKind { None, Timeout, Http, Transport, Credential, Exhausted };
std::string_view to_string(VlmErrorKind kind);

struct VlmResult {
  std::optional<VlmReply> reply;
  VlmErrorKind error = VlmErrorKind::None;
  std::string detail;

  bool ok() const { return reply.has_value(); }
};

struct VlmClient {
  virtual ~VlmClient() = default;
  virtual VlmResult complete(const VlmRequest& request) = 0;
};

struct EndpointConfig {
  std::string base_url;             // e.g. https://api.openai.com
  std::string path = "/v1/chat/completions";
  std::string model = "gpt-4o";
  std::string api_key_env = "VLM_API_KEY";  // credential comes only from here
  double temperature = 0.0;
  int timeout_s = 60;
  int max_tokens = 512;
};

/// Chat-completions-style HTTP client with base64-embedded PNG attachments.
/// Retries once on transport failure; all failures are structured results.
class HttpVlmClient : public VlmClient {
 public:
  explicit HttpVlmClient(EndpointConfig config);
  VlmResult complete(const VlmRequest& request) override;

 private:
  EndpointConfig config_;
};

/// Replays canned replies from a line-delimited JSON file; each line is an
/// object {"content": "..."}. Consumption is in order; running out yields an
/// Exhausted error. Throws Error{Io}/Error{Parse} at construction.
class ScriptedVlmClient : public VlmClient {
 public:
  explicit ScriptedVlmClient(const std::string& path);
  static ScriptedVlmClient from_replies(std::vector<std::string> replies);
  VlmResult complete(const VlmRequest& request) override;
  std::size_t remaining() const { return replies_.size() - next_; }

 private:
  ScriptedVlmClient() = default;
  std::vector<std::string> replies_;
  std::size_t next_ = 0;
};

std::string base64_encode(const std::uint8_t* data, std::size_t len);

}  // namespace mrnav::prompt
