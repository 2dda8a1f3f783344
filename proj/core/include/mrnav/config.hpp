#pragma once

#include <map>
#include <string>

#include "mrnav/prompt.hpp"
#include "mrnav/runner.hpp"

namespace mrnav::config {

/// Key-value text format: one `key = value` per line, '#' starts a comment,
/// blank lines ignored. Unknown keys and any credential-looking key are
/// rejected (credentials come only from the environment).
std::map<std::string, std::string> parse_config(const std::string& text);
std::map<std::string, std::string> load_config_file(const std::string& path);

/// Applies recognized keys onto episode/endpoint defaults. Throws
/// Error{Parse} on malformed values.
void apply_config(const std::map<std::string, std::string>& kv,
                  runner::EpisodeOptions& episode, prompt::EndpointConfig& endpoint);

}  // namespace mrnav::config
