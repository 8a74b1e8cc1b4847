#include "tdri/harness/scenario.hpp"

#include <algorithm>
#include <fstream>
#include <random>
#include <sstream>

#include <json.hpp>

#include "tdri/core/error.hpp"
#include "tdri/core/rng.hpp"

namespace tdri::harness {

namespace {

using nlohmann::json;

[[noreturn]] void bad(const std::string& why, std::string field = {}) {
  throw Error(ErrorCode::BadScenario, "scenario: " + why, std::move(field));
}

std::string json_scalar(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number() || v.is_boolean()) return v.dump();
  bad("config values must be scalars");
}

template <class T>
T field_or(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    bad(std::string("field '") + key + "' has the wrong type", key);
  }
}

TargetSpec parse_target(const json& j, const d2p::Lexicon& lexicon) {
  if (!j.is_object()) bad("each target must be an object", "targets");
  TargetSpec t;
  t.opening = field_or<std::string>(j, "opening", "");
  if (!j.contains("aspects") || !j.at("aspects").is_object()) bad("target lacks 'aspects'", "targets");
  for (const auto& [name, tokens] : j.at("aspects").items()) {
    const auto aspect = parse_aspect(name);
    if (!aspect) bad("unknown aspect '" + name + "'", "targets");
    if (!tokens.is_array() || tokens.empty()) bad("aspect '" + name + "' needs a token list", "targets");
    for (const json& tok : tokens) {
      if (!tok.is_string()) bad("tokens must be strings", "targets");
      const auto parts = d2p::tokenize(tok.get<std::string>());
      if (parts.size() != 1) bad("token '" + tok.get<std::string>() + "' is not a single word", "targets");
      if (lexicon.lookup(parts.front()) != aspect)
        bad("token '" + parts.front() + "' is not a " + name + " keyword", "targets");
      t.tokens[index(*aspect)].push_back(parts.front());
    }
  }
  if (t.tokens[index(Aspect::Content)].empty()) bad("target needs Content tokens", "targets");
  if (t.opening.empty()) t.opening = render_edit(Aspect::Content, t.tokens[index(Aspect::Content)]);
  return t;
}

}  // namespace

std::string_view to_string(EditStrategy s) noexcept {
  return s == EditStrategy::WorstAspect ? "WorstAspect" : "RandomAspect";
}

std::vector<Aspect> TargetSpec::aspects() const {
  std::vector<Aspect> out;
  for (Aspect a : kAllAspects)
    if (!tokens[index(a)].empty()) out.push_back(a);
  return out;
}

bool is_template_word(Aspect a, std::string_view token) {
  switch (a) {
    case Aspect::Style: return token == "style";
    case Aspect::Background: return token == "background";
    case Aspect::Perspective: return token == "view";
    case Aspect::Color: return token == "color" || token == "colour";
    case Aspect::Size: return token == "size";
    default: return false;
  }
}

std::string render_edit(Aspect a, const std::vector<std::string>& tokens) {
  std::string t;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) t += ' ';
    t += tokens[i];
  }
  switch (a) {
    case Aspect::Content: return "a " + t;
    case Aspect::Color:
    case Aspect::Size: return "make it " + t;
    case Aspect::Background: return t + " background";
    case Aspect::Style: return t + " style";
    case Aspect::Perspective: return t + " view";
    case Aspect::Others: return "with " + t;
  }
  return t;
}

TargetSpec random_target(const d2p::Lexicon& lexicon, std::uint64_t seed, const RandomTargets& spec) {
  auto engine = make_engine(derive_seed(seed, fnv1a("target")));
  auto pick_tokens = [&](Aspect a, int count) {
    std::vector<std::string> pool;
    for (const std::string& w : lexicon.words(a))
      if (!is_template_word(a, w)) pool.push_back(w);
    std::shuffle(pool.begin(), pool.end(), engine);
    pool.resize(std::min<std::size_t>(pool.size(), static_cast<std::size_t>(count)));
    return pool;
  };

  TargetSpec t;
  t.tokens[index(Aspect::Content)] = pick_tokens(Aspect::Content, 1);
  std::vector<Aspect> others(kAllAspects.begin() + 1, kAllAspects.end());
  std::shuffle(others.begin(), others.end(), engine);
  const auto extra = std::clamp<std::size_t>(static_cast<std::size_t>(spec.extra_aspects), 0, others.size());
  std::uniform_int_distribution<int> count(spec.min_tokens, spec.max_tokens);
  for (std::size_t i = 0; i < extra; ++i) t.tokens[index(others[i])] = pick_tokens(others[i], count(engine));
  t.opening = render_edit(Aspect::Content, t.tokens[index(Aspect::Content)]);
  return t;
}

TargetSpec target_for(const Scenario& scenario, const d2p::Lexicon& lexicon,
                      std::size_t session_index, std::uint64_t seed) {
  if (scenario.random_targets) return random_target(lexicon, seed, *scenario.random_targets);
  if (scenario.targets.empty()) bad("no targets");
  return scenario.targets[session_index % scenario.targets.size()];
}

Scenario parse_scenario(std::string_view text, const d2p::Lexicon& lexicon) {
  if (text.find_first_not_of(" \t\r\n") == std::string_view::npos) bad("file is empty");
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    bad(std::string("not valid JSON: ") + e.what());
  }
  if (!j.is_object()) bad("top level must be an object");

  Scenario s;
  s.name = field_or<std::string>(j, "name", "scenario");
  const auto strategy = field_or<std::string>(j, "strategy", "WorstAspect");
  if (strategy == "WorstAspect") s.strategy = EditStrategy::WorstAspect;
  else if (strategy == "RandomAspect") s.strategy = EditStrategy::RandomAspect;
  else bad("unknown strategy '" + strategy + "'", "strategy");
  s.patience = field_or<int>(j, "patience", s.patience);
  s.temperature = field_or<double>(j, "temperature", s.temperature);
  s.slack = field_or<int>(j, "slack", s.slack);
  if (s.patience < 1) bad("patience must be at least 1", "patience");
  if (!(s.temperature > 0.0)) bad("temperature must be positive", "temperature");
  if (s.slack < 0) bad("slack must be nonnegative", "slack");

  if (j.contains("config")) {
    if (!j.at("config").is_object()) bad("'config' must be an object", "config");
    for (const auto& [key, value] : j.at("config").items()) {
      s.overrides.emplace_back(key, json_scalar(value));
      try {
        set_field(s.config, key, s.overrides.back().second);
      } catch (const Error& e) {
        bad(e.what(), e.field());
      }
    }
    try {
      validate(s.config);
    } catch (const Error& e) {
      bad(e.what(), e.field());
    }
  }

  if (j.contains("targets")) {
    if (!j.at("targets").is_array()) bad("'targets' must be an array", "targets");
    for (const json& t : j.at("targets")) s.targets.push_back(parse_target(t, lexicon));
  }
  if (j.contains("random_targets")) {
    const json& r = j.at("random_targets");
    if (!r.is_object()) bad("'random_targets' must be an object", "random_targets");
    RandomTargets rt;
    rt.extra_aspects = field_or<int>(r, "extra_aspects", rt.extra_aspects);
    rt.min_tokens = field_or<int>(r, "min_tokens", rt.min_tokens);
    rt.max_tokens = field_or<int>(r, "max_tokens", rt.max_tokens);
    if (rt.extra_aspects < 0 || rt.extra_aspects > 6) bad("extra_aspects must be in [0,6]", "random_targets");
    if (rt.min_tokens < 1 || rt.max_tokens < rt.min_tokens) bad("bad token counts", "random_targets");
    s.random_targets = rt;
  }
  if (s.targets.empty() && !s.random_targets) bad("needs 'targets' or 'random_targets'");
  return s;
}

Scenario load_scenario(const std::filesystem::path& path, const d2p::Lexicon& lexicon) {
  std::ifstream in(path, std::ios::binary);
  if (!in) bad("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str(), lexicon);
}

}  // namespace tdri::harness
