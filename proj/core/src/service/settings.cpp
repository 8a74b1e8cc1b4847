#include "tdri/service/settings.hpp"

#include <cctype>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "detail/text.hpp"
#include "tdri/core/error.hpp"

namespace tdri::service {

namespace {

[[noreturn]] void invalid(std::string_view key, const std::string& why) {
  throw Error(ErrorCode::InvalidConfig, std::string(key) + ": " + why, std::string(key));
}

int parse_int(std::string_view key, std::string_view raw) {
  const auto text = detail::trim(raw);
  int v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size())
    invalid(key, "not an integer: '" + std::string(text) + "'");
  return v;
}

bool parse_bool(std::string_view key, std::string_view raw) {
  std::string t(detail::trim(raw));
  for (char& c : t) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (t == "1" || t == "true" || t == "yes" || t == "on") return true;
  if (t == "0" || t == "false" || t == "no" || t == "off") return false;
  invalid(key, "not a boolean: '" + std::string(raw) + "'");
}

const std::vector<std::string> kServerKeys = {
    "api_token", "backend_timeout_ms", "backend_token", "backend_url", "data_dir",
    "external_summarizer", "host", "policy_scope", "port",
};

}  // namespace

KeyValues parse_config_text(std::string_view text) {
  KeyValues out;
  int line_no = 0;
  for (std::string_view line : detail::split_lines(text)) {
    ++line_no;
    if (line_no == 1 && line.substr(0, 3) == "\xEF\xBB\xBF") line.remove_prefix(3);
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw Error(ErrorCode::InvalidConfig, "config line " + std::to_string(line_no) + " has no '='");
    const auto key = detail::trim(line.substr(0, eq));
    if (key.empty())
      throw Error(ErrorCode::InvalidConfig, "config line " + std::to_string(line_no) + " has an empty key");
    out.emplace_back(std::string(key), std::string(detail::trim(line.substr(eq + 1))));
  }
  return out;
}

KeyValues read_config_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::InvalidConfig, "cannot read config file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

void apply_setting(ServerSettings& s, std::string_view key, std::string_view value) {
  const auto v = detail::trim(value);
  if (key == "host") {
    if (v.empty()) invalid(key, "must not be empty");
    s.host = std::string(v);
  } else if (key == "port") {
    const int port = parse_int(key, v);
    if (port < 0 || port > 65535) invalid(key, "must lie in [0, 65535]");
    s.port = port;
  } else if (key == "data_dir") {
    if (v.empty()) invalid(key, "must not be empty");
    s.data_dir = std::string(v);
  } else if (key == "backend_url") {
    s.backend_url = std::string(v);
  } else if (key == "backend_token") {
    s.backend_token = std::string(v);
  } else if (key == "api_token") {
    s.api_token = std::string(v);
  } else if (key == "policy_scope") {
    if (v == "session") s.policy_scope = PolicyScope::Session;
    else if (v == "shared") s.policy_scope = PolicyScope::Shared;
    else invalid(key, "must be 'session' or 'shared'");
  } else if (key == "external_summarizer") {
    s.external_summarizer = parse_bool(key, v);
  } else if (key == "backend_timeout_ms") {
    const int ms = parse_int(key, v);
    if (ms < 1) invalid(key, "must be >= 1");
    s.backend_timeout_ms = ms;
  } else {
    set_field(s.defaults, key, v);
  }
}

std::string env_name(std::string_view key) {
  std::string out = "TDRI_";
  for (char c : key) out += c == '.' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

std::vector<std::string> setting_keys() {
  std::vector<std::string> keys = kServerKeys;
  for (auto& k : config_field_names()) keys.push_back(std::move(k));
  return keys;
}

EnvLookup process_env() {
  return [](const std::string& name) -> std::optional<std::string> {
    if (const char* v = std::getenv(name.c_str())) return std::string(v);
    return std::nullopt;
  };
}

ServerSettings resolve_settings(const std::optional<std::filesystem::path>& config_file,
                                const EnvLookup& env, const KeyValues& cli_overrides) {
  ServerSettings s;
  if (config_file)
    for (const auto& [k, v] : read_config_file(*config_file)) apply_setting(s, k, v);
  if (env)
    for (const std::string& k : setting_keys())
      if (auto v = env(env_name(k))) apply_setting(s, k, *v);
  for (const auto& [k, v] : cli_overrides) apply_setting(s, k, v);
  validate(s.defaults);
  return s;
}

}  // namespace tdri::service
