#include "tdri/core/session.hpp"

#include <array>

#include "tdri/core/error.hpp"

namespace tdri {

namespace {

constexpr std::array<std::string_view, 6> kPhaseNames = {
    "Created", "InitialGenerated", "AwaitFeedback", "Clarifying", "Refining", "Completed",
};

[[noreturn]] void illegal(const Session& s, const SessionEvent& e, const std::string& why = {}) {
  std::string msg = std::string(event_name(e)) + " is not accepted in phase " +
                    std::string(to_string(s.phase));
  if (!why.empty()) msg += " (" + why + ")";
  throw Error(ErrorCode::IllegalTransition, msg);
}

void breach(const std::string& what) {
  throw Error(ErrorCode::IllegalTransition, "session invariant violated: " + what);
}

}  // namespace

std::string_view to_string(Phase phase) noexcept {
  return kPhaseNames[static_cast<std::size_t>(phase)];
}

std::optional<Phase> parse_phase(std::string_view name) noexcept {
  for (std::size_t i = 0; i < kPhaseNames.size(); ++i)
    if (kPhaseNames[i] == name) return static_cast<Phase>(i);
  return std::nullopt;
}

bool transition_allowed(Phase from, Phase to) noexcept {
  switch (from) {
    case Phase::Created:
      return to == Phase::InitialGenerated;
    case Phase::InitialGenerated:
    case Phase::Refining:
      return to == Phase::AwaitFeedback || to == Phase::Clarifying;
    case Phase::AwaitFeedback:
    case Phase::Clarifying:
      return to == Phase::Refining || to == Phase::Completed;
    case Phase::Completed:
      return false;
  }
  return false;
}

std::string_view event_name(const SessionEvent& event) noexcept {
  struct Visitor {
    std::string_view operator()(const UserMessage&) const { return "UserMessage"; }
    std::string_view operator()(const UserAccept&) const { return "UserAccept"; }
    std::string_view operator()(const Continue&) const { return "Continue"; }
  };
  return std::visit(Visitor{}, event);
}

const ImageArtifact* Session::find_image(std::string_view image_id) const noexcept {
  for (const ImageArtifact& img : images)
    if (img.id == image_id) return &img;
  return nullptr;
}

Session make_session(std::string id, SessionConfig config) {
  validate(config);
  Session s;
  s.id = std::move(id);
  s.policy = PolicyParams::zero(config.embedding_dim, config.toy.dpo_step);
  s.rng = SeedStream(static_cast<std::uint64_t>(config.rng_seed));
  s.config = std::move(config);
  return s;
}

void check_event(const Session& s, const SessionEvent& e) {
  if (s.phase == Phase::Completed)
    throw Error(ErrorCode::SessionCompleted, "session " + s.id + " is completed");
  if (const auto* msg = std::get_if<UserMessage>(&e)) {
    if (s.phase != Phase::Created && s.phase != Phase::AwaitFeedback &&
        s.phase != Phase::Clarifying)
      illegal(s, e);
    if (msg->text.empty()) throw Error(ErrorCode::EmptyText, "user message is empty");
    if (s.round() >= s.config.max_rounds)
      illegal(s, e, "max_rounds " + std::to_string(s.config.max_rounds) + " reached");
  } else if (std::holds_alternative<UserAccept>(e)) {
    if (s.phase != Phase::AwaitFeedback && s.phase != Phase::Clarifying) illegal(s, e);
  } else {
    if (s.phase != Phase::InitialGenerated && s.phase != Phase::Refining) illegal(s, e);
  }
}

void check_invariants(const Session& s) {
  if (s.images.size() != s.prompts.size()) breach("images and prompts differ in length");
  if (s.ae_records.size() != s.images.size()) breach("one A&E record per image");
  if (s.pending_query.has_value() != (s.phase == Phase::Clarifying))
    breach("pending query must be present exactly in phase Clarifying");
  const bool awaiting_reflection =
      s.phase == Phase::InitialGenerated || s.phase == Phase::Refining;
  if (s.pending_input.has_value() != awaiting_reflection)
    breach("pending input must be present exactly while a round awaits reflection");
  if (awaiting_reflection && s.images.empty()) breach("round awaiting reflection has no image");
  const std::size_t reflected = s.images.size() - (awaiting_reflection ? 1 : 0);
  if (s.history.size() != reflected || s.reflections.size() != reflected)
    breach("history and reflections must cover every reflected round");
  if (s.context.prior_descriptors.size() != reflected ||
      s.context.prior_prompts.size() != reflected)
    breach("context must fold in every reflected round");
  if (s.phase == Phase::Created && !s.images.empty()) breach("Created session has images");
  if (s.round() > 0 && s.phase != Phase::Created && !s.pose_constraint)
    breach("pose constraint missing after the first round");
  for (std::size_t i = 0; i < s.images.size(); ++i) {
    if (!is_unit(s.images[i].descriptor)) breach("image descriptor not unit norm");
    for (std::size_t j = 0; j < i; ++j)
      if (s.images[i].id == s.images[j].id) breach("duplicate image id " + s.images[i].id);
  }
}

}  // namespace tdri
