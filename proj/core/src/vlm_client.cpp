#include <chrono>
#include <cstdlib>
#include <fstream>

#ifdef MRNAV_WITH_OPENSSL
#define CPPHTTPLIB_OPENSSL_SUPPORT
#endif
#include <httplib.h>
#include <json.hpp>

#include "mrnav/error.hpp"
#include "mrnav/prompt.hpp"

namespace mrnav::prompt {

using nlohmann::json;

HttpVlmClient::HttpVlmClient(EndpointConfig config) : config_(std::move(config)) {}

namespace {

json build_body(const VlmRequest& request, const EndpointConfig& config) {
  json content = json::array();
  content.push_back({{"type", "text"}, {"text", request.user_text}});
  for (const auto& png : request.images_png) {
    content.push_back(
        {{"type", "image_url"},
         {"image_url",
          {{"url", "data:image/png;base64," + base64_encode(png.data(), png.size())}}}});
  }
  json body;
  body["model"] = request.model.empty() ? config.model : request.model;
  body["temperature"] = request.temperature;
  body["max_tokens"] = config.max_tokens;
  body["messages"] = json::array();
  if (!request.system_text.empty())
    body["messages"].push_back({{"role", "system"}, {"content", request.system_text}});
  body["messages"].push_back({{"role", "user"}, {"content", content}});
  return body;
}

}  // namespace

VlmResult HttpVlmClient::complete(const VlmRequest& request) {
  VlmResult result;
  if (config_.base_url.empty()) {
    result.error = VlmErrorKind::Transport;
    result.detail = "no endpoint base URL configured";
    return result;
  }
  const char* key = std::getenv(config_.api_key_env.c_str());
  if (!key || !*key) {
    result.error = VlmErrorKind::Credential;
    result.detail = "environment variable " + config_.api_key_env + " not set";
    return result;
  }

  const std::string payload = build_body(request, config_).dump();
  httplib::Headers headers = {{"Authorization", std::string("Bearer ") + key}};

  const auto started = std::chrono::steady_clock::now();
  for (int attempt = 0; attempt < 2; ++attempt) {
    httplib::Client client(config_.base_url);
    client.set_connection_timeout(config_.timeout_s, 0);
    client.set_read_timeout(config_.timeout_s, 0);
    client.set_write_timeout(config_.timeout_s, 0);

    auto res = client.Post(config_.path, headers, payload, "application/json");
    if (!res) {
      result.error = res.error() == httplib::Error::ConnectionTimeout ||
                             res.error() == httplib::Error::Read
                         ? VlmErrorKind::Timeout
                         : VlmErrorKind::Transport;
      result.detail = httplib::to_string(res.error());
      continue;  // one retry on transport-level failure
    }
    if (res->status == 401 || res->status == 403) {
      result.error = VlmErrorKind::Credential;
      result.detail = "HTTP " + std::to_string(res->status);
      return result;
    }
    if (res->status >= 400) {
      result.error = VlmErrorKind::Http;
      result.detail = "HTTP " + std::to_string(res->status);
      if (res->status >= 500 && attempt == 0) continue;
      return result;
    }

    json j = json::parse(res->body, nullptr, false);
    if (j.is_discarded() || !j.contains("choices") || j["choices"].empty()) {
      result.error = VlmErrorKind::Http;
      result.detail = "malformed completion body";
      return result;
    }
    VlmReply reply;
    reply.content = j["choices"][0].value("message", json::object()).value("content", "");
    if (j.contains("usage")) {
      reply.prompt_tokens = j["usage"].value("prompt_tokens", -1);
      reply.completion_tokens = j["usage"].value("completion_tokens", -1);
    }
    reply.latency_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    result.reply = std::move(reply);
    result.error = VlmErrorKind::None;
    result.detail.clear();
    return result;
  }
  return result;
}

ScriptedVlmClient::ScriptedVlmClient(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open scripted replies " + path);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object() || !j.contains("content") ||
        !j["content"].is_string())
      throw Error(ErrorKind::Parse, "scripted reply line " + std::to_string(lineno) +
                                        " must be {\"content\": \"...\"}");
    replies_.push_back(j["content"].get<std::string>());
  }
}

ScriptedVlmClient ScriptedVlmClient::from_replies(std::vector<std::string> replies) {
  ScriptedVlmClient client;
  client.replies_ = std::move(replies);
  return client;
}

VlmResult ScriptedVlmClient::complete(const VlmRequest&) {
  VlmResult result;
  if (next_ >= replies_.size()) {
    result.error = VlmErrorKind::Exhausted;
    result.detail = "scripted replies exhausted after " + std::to_string(next_);
    return result;
  }
  VlmReply reply;
  reply.content = replies_[next_++];
  result.reply = std::move(reply);
  return result;
}

}  // namespace mrnav::prompt
