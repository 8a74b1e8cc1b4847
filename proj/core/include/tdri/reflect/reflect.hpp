#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "tdri/core/config.hpp"
#include "tdri/core/types.hpp"
#include "tdri/d2p/embedder.hpp"
#include "tdri/reflect/types.hpp"

namespace tdri::reflect {

inline constexpr std::size_t kCandidateCount = 3;

// kappa = (1 + cos) / 2. Throws DimensionMismatch.
double pair_similarity(const Vector& a, const Vector& b);

// Weighted mean of the given kappas (nullopt marks an inactive aspect), the
// ambiguity score, the tau trigger and the lowest-kappa candidates (ties
// broken by aspect order). Throws NoActiveAspects.
AmbiguityReport consistency(const AspectArray<std::optional<double>>& kappa,
                            const AspectArray<double>& importance, double tau);

// Kappa between each active aspect's embedded text and its caption.
AspectArray<std::optional<double>> aspect_similarities(const Prompt& prompt,
                                                       const AspectCaptionSet& captions,
                                                       const d2p::Embedder& embedder);

AmbiguityReport consistency(const Prompt& prompt, const AspectCaptionSet& captions,
                            const d2p::Embedder& embedder, const SessionConfig& config);

// Uniform draw from the candidates. Throws NotTriggered.
Aspect select_aspect(const AmbiguityReport& report, std::uint64_t seed);

// Aspect -> question template with a "{caption}" placeholder. File format:
// "Aspect<TAB>template" lines, '#' comments, "# version: <v>" header.
class ClarificationTemplates {
 public:
  // Throws BadLexicon when a line is malformed, an aspect repeats or is
  // missing, or a template lacks the placeholder.
  static ClarificationTemplates parse(std::string_view tsv);
  static ClarificationTemplates load(const std::filesystem::path& path);
  static const ClarificationTemplates& builtin();

  const std::string& skeleton(Aspect a) const { return templates_[index(a)]; }
  std::string render(Aspect a, std::string_view caption) const;
  const std::string& version() const noexcept { return version_; }

 private:
  AspectArray<std::string> templates_{};
  std::string version_;
};

// Throws NotTriggered unless the report is triggered with a selected aspect.
ClarificationQuery build_query(const Prompt& prompt, const AspectCaptionSet& captions,
                               const AmbiguityReport& report,
                               const ClarificationTemplates& templates =
                                   ClarificationTemplates::builtin());

}  // namespace tdri::reflect
