#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "tdri/core/aspect.hpp"
#include "tdri/core/config.hpp"
#include "tdri/d2p/lexicon.hpp"

namespace tdri::harness {

enum class EditStrategy { WorstAspect, RandomAspect };

std::string_view to_string(EditStrategy s) noexcept;

// What the simulated user has in mind: lexicon tokens per aspect. Content
// must be present; the opening message is rendered from it when empty.
struct TargetSpec {
  AspectArray<std::vector<std::string>> tokens{};
  std::string opening;

  std::vector<Aspect> aspects() const;
};

struct RandomTargets {
  int extra_aspects = 4;   // non-Content aspects per target
  int min_tokens = 1;
  int max_tokens = 2;
};

// Scenario file (JSON):
//   {
//     "name": "...",
//     "strategy": "WorstAspect" | "RandomAspect",
//     "patience": 10, "temperature": 0.05, "slack": 1,
//     "config": {"ambiguity_threshold": 0.3, ...},
//     "targets": [{"opening": "a parrot",
//                  "aspects": {"Content": ["parrot"], "Color": ["red"]}}],
//     "random_targets": {"extra_aspects": 4, "min_tokens": 1, "max_tokens": 2}
//   }
// Either "targets" or "random_targets" is required. Sessions cycle through
// explicit targets; random targets are drawn from the session seed.
struct Scenario {
  std::string name;
  EditStrategy strategy = EditStrategy::WorstAspect;
  int patience = 10;
  double temperature = 0.05;
  int slack = 1;
  SessionConfig config;
  std::vector<std::pair<std::string, std::string>> overrides;
  std::vector<TargetSpec> targets;
  std::optional<RandomTargets> random_targets;
};

// Throws BadScenario.
Scenario parse_scenario(std::string_view json, const d2p::Lexicon& lexicon = d2p::Lexicon::builtin());
Scenario load_scenario(const std::filesystem::path& path,
                       const d2p::Lexicon& lexicon = d2p::Lexicon::builtin());

// Words a template already supplies; never sampled as target tokens.
bool is_template_word(Aspect a, std::string_view token);

// The one-aspect message a user sends to set `a` to `tokens`:
//   Content "a {t}", Color/Size "make it {t}", Background "{t} background",
//   Style "{t} style", Perspective "{t} view", Others "with {t}".
std::string render_edit(Aspect a, const std::vector<std::string>& tokens);

TargetSpec random_target(const d2p::Lexicon& lexicon, std::uint64_t seed,
                         const RandomTargets& spec);

TargetSpec target_for(const Scenario& scenario, const d2p::Lexicon& lexicon, std::size_t session_index,
                      std::uint64_t seed);

}  // namespace tdri::harness
