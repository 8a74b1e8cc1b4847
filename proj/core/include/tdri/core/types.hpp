#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tdri/core/aspect.hpp"
#include "tdri/core/linalg.hpp"

namespace tdri {

// One completed exchange (w_t, r_t). Turns are appended only once the
// system response exists, so a stored turn is never edited.
struct DialogueTurn {
  int index = 1;
  std::string user_input;
  std::string system_response;

  friend bool operator==(const DialogueTurn&, const DialogueTurn&) = default;
};

class DialogueHistory {
 public:
  DialogueHistory() = default;

  // Throws IllegalTransition when the index does not continue the sequence
  // or the user input is empty.
  void append(DialogueTurn turn);

  const std::vector<DialogueTurn>& turns() const noexcept { return turns_; }
  std::size_t size() const noexcept { return turns_.size(); }
  bool empty() const noexcept { return turns_.empty(); }

  friend bool operator==(const DialogueHistory&, const DialogueHistory&) = default;

 private:
  std::vector<DialogueTurn> turns_;
};

struct Prompt {
  AspectArray<std::string> aspect_texts{};
  AspectArray<double> aspect_weights{};
  Vector embedding;
  int round = 0;

  bool active(Aspect a) const { return !aspect_texts[index(a)].empty(); }
  std::vector<Aspect> active_aspects() const;

  // g_sum text synthesis: nonempty aspect texts in a fixed order,
  // "Content, with Color, Style, Background, Size, Perspective, Others".
  std::string text() const;

  friend bool operator==(const Prompt& a, const Prompt& b) {
    return a.aspect_texts == b.aspect_texts && a.aspect_weights == b.aspect_weights &&
           same(a.embedding, b.embedding) && a.round == b.round;
  }
};

// Throws InvalidPrompt describing the first violated invariant.
void validate(const Prompt& prompt);

struct RenderPayload {
  std::string bytes;
  std::string media_type;

  friend bool operator==(const RenderPayload&, const RenderPayload&) = default;
};

struct Provenance {
  int round = 0;
  std::string generator;
  std::uint64_t seed = 0;

  friend bool operator==(const Provenance&, const Provenance&) = default;
};

struct ImageArtifact {
  std::string id;
  Vector descriptor;
  std::optional<RenderPayload> render;
  Provenance provenance;

  friend bool operator==(const ImageArtifact& a, const ImageArtifact& b) {
    return a.id == b.id && same(a.descriptor, b.descriptor) && a.render == b.render &&
           a.provenance == b.provenance;
  }
};

struct Keypoint {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Keypoint&, const Keypoint&) = default;
};

// Row-major H x W grid of nonnegative mass.
struct Heatmap {
  int height = 0;
  int width = 0;
  std::vector<double> cells;

  double at(int row, int col) const { return cells[static_cast<std::size_t>(row) * width + col]; }
  double total() const;

  friend bool operator==(const Heatmap&, const Heatmap&) = default;
};

struct Pose {
  std::vector<Keypoint> keypoints;
  std::optional<Heatmap> heatmap;
  bool smoothed = false;

  friend bool operator==(const Pose&, const Pose&) = default;
};

// C_{t-1}: everything generated before the current round.
struct SessionContext {
  std::vector<Prompt> prior_prompts;
  std::vector<Vector> prior_descriptors;
  Vector context_vector;

  bool empty() const noexcept { return prior_descriptors.empty(); }

  // Returns a new context with one more round folded into the running mean.
  SessionContext with(const Prompt& prompt, const Vector& descriptor) const;

  friend bool operator==(const SessionContext& a, const SessionContext& b) {
    return a.prior_prompts == b.prior_prompts && same(a.prior_descriptors, b.prior_descriptors) &&
           same(a.context_vector, b.context_vector);
  }
};

}  // namespace tdri
