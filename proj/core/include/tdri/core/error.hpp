#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace tdri {

enum class ErrorCode {
  IllegalTransition,
  SessionCompleted,
  EmptyText,
  BackendUnavailable,
  InvalidPrompt,
  InvalidSigma,
  InvalidGrid,
  DimensionMismatch,
  NoActiveAspects,
  NotTriggered,
  EmptyPairs,
  CandidateMissing,
  InsufficientPairs,
  InvalidConfig,
  UnknownSession,
  UnknownImage,
  SelfPair,
  SchemaMismatch,
  CorruptSnapshot,
  BadScenario,
  EmptyCorpus,
  NoImages,
  BadLexicon,
  Unauthorized,
  InvalidPose,
};

std::string_view to_string(ErrorCode code) noexcept;

// Single exception type for the library. `field` names the offending input
// where one exists (config keys, request fields).
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message, std::string field = {})
      : std::runtime_error(message), code_(code), field_(std::move(field)) {}

  ErrorCode code() const noexcept { return code_; }
  const std::string& field() const noexcept { return field_; }

 private:
  ErrorCode code_;
  std::string field_;
};

}  // namespace tdri
