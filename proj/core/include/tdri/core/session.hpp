#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "tdri/adapt/types.hpp"
#include "tdri/core/config.hpp"
#include "tdri/core/rng.hpp"
#include "tdri/core/types.hpp"
#include "tdri/reflect/types.hpp"

namespace tdri {

enum class Phase {
  Created,
  InitialGenerated,
  AwaitFeedback,
  Clarifying,
  Refining,
  Completed,
};

std::string_view to_string(Phase phase) noexcept;
std::optional<Phase> parse_phase(std::string_view name) noexcept;

// True for the edges of the protocol graph:
//   Created -> InitialGenerated -> {AwaitFeedback, Clarifying}
//   {AwaitFeedback, Clarifying} -> Refining -> {AwaitFeedback, Clarifying}
//   {AwaitFeedback, Clarifying} -> Completed
bool transition_allowed(Phase from, Phase to) noexcept;

struct UserMessage {
  std::string text;
};
struct UserAccept {};
// The system's own step: reflect on the image generated for the pending
// input and either wait for feedback or ask a clarification question.
struct Continue {};

using SessionEvent = std::variant<UserMessage, UserAccept, Continue>;

std::string_view event_name(const SessionEvent& event) noexcept;

// A&E decision for the image generated in one round.
struct AeRecord {
  int round = 0;
  double sim = 1.0;
  bool applied = false;
  std::optional<double> refined_sim;

  friend bool operator==(const AeRecord&, const AeRecord&) = default;
};

struct ReflectionRecord {
  int round = 0;
  AmbiguityReport report;
  AspectCaptionSet captions;

  friend bool operator==(const ReflectionRecord&, const ReflectionRecord&) = default;
};

// Full state of one refinement dialogue. A value type: transitions return a
// new Session and only ever append to the sequences below.
struct Session {
  std::string id;
  SessionConfig config;
  Phase phase = Phase::Created;
  DialogueHistory history;
  SessionContext context;
  std::optional<Pose> pose_constraint;
  std::vector<ImageArtifact> images;
  std::vector<Prompt> prompts;
  std::vector<AeRecord> ae_records;
  std::vector<ReflectionRecord> reflections;
  std::optional<std::string> pending_input;
  std::optional<ClarificationQuery> pending_query;
  std::vector<PreferencePair> preference_pairs;
  PolicyParams policy;
  SeedStream rng;

  int round() const noexcept { return static_cast<int>(images.size()); }
  const ImageArtifact* find_image(std::string_view image_id) const noexcept;

  friend bool operator==(const Session&, const Session&) = default;
};

// Validates the config and returns a session in phase Created.
Session make_session(std::string id, SessionConfig config);

// Throws SessionCompleted after Completed, IllegalTransition when the event
// is not accepted in the current phase (or the round budget is spent).
void check_event(const Session& session, const SessionEvent& event);

// Structural invariants; throws IllegalTransition naming the first breach.
void check_invariants(const Session& session);

}  // namespace tdri
