#pragma once

#include <optional>
#include <string>
#include <vector>

#include "tdri/core/aspect.hpp"
#include "tdri/core/linalg.hpp"

namespace tdri {

struct AspectCaption {
  Aspect aspect = Aspect::Content;
  std::string text;
  Vector embedding;
  std::optional<double> similarity;

  friend bool operator==(const AspectCaption& a, const AspectCaption& b) {
    return a.aspect == b.aspect && a.text == b.text && same(a.embedding, b.embedding) &&
           a.similarity == b.similarity;
  }
};

// C_t: exactly one caption per aspect, stored in canonical aspect order.
struct AspectCaptionSet {
  AspectArray<AspectCaption> captions{};

  const AspectCaption& operator[](Aspect a) const { return captions[index(a)]; }
  AspectCaption& operator[](Aspect a) { return captions[index(a)]; }

  friend bool operator==(const AspectCaptionSet&, const AspectCaptionSet&) = default;
};

// Every slot must carry its own aspect and a unit-norm embedding. A
// malformed set can only come from a misbehaving backend, so violations
// throw BackendUnavailable.
void validate(const AspectCaptionSet& captions);

struct AmbiguityReport {
  AspectArray<std::optional<double>> per_aspect_similarity{};  // kappa, active aspects only
  double sigma = 1.0;
  double ambiguity_score = 0.0;  // r_t = 1 - sigma
  bool triggered = false;
  std::vector<Aspect> candidate_aspects;
  std::optional<Aspect> selected_aspect;

  friend bool operator==(const AmbiguityReport&, const AmbiguityReport&) = default;
};

struct ClarificationQuery {
  Aspect aspect = Aspect::Content;
  std::string question_text;
  int round = 0;

  friend bool operator==(const ClarificationQuery&, const ClarificationQuery&) = default;
};

}  // namespace tdri
