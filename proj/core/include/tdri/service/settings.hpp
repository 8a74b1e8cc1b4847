#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "tdri/core/config.hpp"

namespace tdri::service {

enum class PolicyScope { Session, Shared };

struct ServerSettings {
  std::string host = "127.0.0.1";
  int port = 8080;
  std::filesystem::path data_dir = "tdri-data";
  std::string backend_url;  // empty: toy backends
  std::string backend_token;  // bearer token sent to the backend service
  std::string api_token;      // empty: no auth
  PolicyScope policy_scope = PolicyScope::Session;
  bool external_summarizer = false;
  int backend_timeout_ms = 30000;
  SessionConfig defaults;
};

using KeyValues = std::vector<std::pair<std::string, std::string>>;

// "key = value" lines; '#' starts a comment. Throws InvalidConfig with the
// line number on a line without '='.
KeyValues parse_config_text(std::string_view text);
KeyValues read_config_file(const std::filesystem::path& path);

// Applies one key, either a server key (host, port, data_dir, backend_url,
// backend_token, api_token, policy_scope, external_summarizer, backend_timeout_ms) or a
// SessionConfig field. Throws InvalidConfig.
void apply_setting(ServerSettings& settings, std::string_view key, std::string_view value);

// TDRI_<KEY> with the key upper-cased and '.' turned into '_', e.g.
// TDRI_AMBIGUITY_THRESHOLD, TDRI_TOY_NOISE_SCALE, TDRI_PORT.
std::string env_name(std::string_view key);
std::vector<std::string> setting_keys();

using EnvLookup = std::function<std::optional<std::string>(const std::string& name)>;
EnvLookup process_env();

// defaults < config file < environment < command-line overrides. The
// session defaults are validated at the end.
ServerSettings resolve_settings(const std::optional<std::filesystem::path>& config_file,
                                const EnvLookup& env, const KeyValues& cli_overrides);

}  // namespace tdri::service
