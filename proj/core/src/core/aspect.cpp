#include "tdri/core/aspect.hpp"

#include <cctype>

#include "tdri/core/error.hpp"

namespace tdri {

namespace {

constexpr std::array<std::string_view, kAspectCount> kAspectNames = {
    "Content", "Style", "Background", "Size", "Color", "Perspective", "Others",
};

bool iequals(std::string_view a, std::string_view b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (std::tolower(static_cast<unsigned char>(a[i])) !=
        std::tolower(static_cast<unsigned char>(b[i])))
      return false;
  }
  return true;
}

}  // namespace

std::string_view to_string(Aspect a) noexcept { return kAspectNames[index(a)]; }

std::optional<Aspect> parse_aspect(std::string_view name) noexcept {
  for (Aspect a : kAllAspects)
    if (iequals(name, kAspectNames[index(a)])) return a;
  return std::nullopt;
}

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::IllegalTransition: return "IllegalTransition";
    case ErrorCode::SessionCompleted: return "SessionCompleted";
    case ErrorCode::EmptyText: return "EmptyText";
    case ErrorCode::BackendUnavailable: return "BackendUnavailable";
    case ErrorCode::InvalidPrompt: return "InvalidPrompt";
    case ErrorCode::InvalidSigma: return "InvalidSigma";
    case ErrorCode::InvalidGrid: return "InvalidGrid";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NoActiveAspects: return "NoActiveAspects";
    case ErrorCode::NotTriggered: return "NotTriggered";
    case ErrorCode::EmptyPairs: return "EmptyPairs";
    case ErrorCode::CandidateMissing: return "CandidateMissing";
    case ErrorCode::InsufficientPairs: return "InsufficientPairs";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::UnknownSession: return "UnknownSession";
    case ErrorCode::UnknownImage: return "UnknownImage";
    case ErrorCode::SelfPair: return "SelfPair";
    case ErrorCode::SchemaMismatch: return "SchemaMismatch";
    case ErrorCode::CorruptSnapshot: return "CorruptSnapshot";
    case ErrorCode::BadScenario: return "BadScenario";
    case ErrorCode::EmptyCorpus: return "EmptyCorpus";
    case ErrorCode::NoImages: return "NoImages";
    case ErrorCode::BadLexicon: return "BadLexicon";
    case ErrorCode::Unauthorized: return "Unauthorized";
    case ErrorCode::InvalidPose: return "InvalidPose";
  }
  return "Unknown";
}

}  // namespace tdri
