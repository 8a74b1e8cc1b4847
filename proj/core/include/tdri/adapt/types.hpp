#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tdri/core/linalg.hpp"
#include "tdri/core/types.hpp"

namespace tdri {

// One human vote: under conditioning `state`, `winner` was preferred to
// `loser`.
struct PreferencePair {
  Vector state_embedding;
  int round = 0;
  std::string winner_id;
  Vector winner_descriptor;
  std::string loser_id;
  Vector loser_descriptor;
  std::string session_id;
  std::string created_at;  // ISO-8601 UTC

  friend bool operator==(const PreferencePair& a, const PreferencePair& b) {
    return same(a.state_embedding, b.state_embedding) && a.round == b.round &&
           a.winner_id == b.winner_id && same(a.winner_descriptor, b.winner_descriptor) &&
           a.loser_id == b.loser_id && same(a.loser_descriptor, b.loser_descriptor) &&
           a.session_id == b.session_id && a.created_at == b.created_at;
  }
};

// theta of the toy policy pi(x | s) = softmax_x(x^T theta s).
struct PolicyParams {
  Matrix weight_matrix;
  double step_size = 0.1;
  std::int64_t version = 1;

  static PolicyParams zero(Eigen::Index dim, double step_size = 0.1) {
    return PolicyParams{Matrix::Zero(dim, dim), step_size, 1};
  }

  friend bool operator==(const PolicyParams& a, const PolicyParams& b) {
    return same(a.weight_matrix, b.weight_matrix) && a.step_size == b.step_size &&
           a.version == b.version;
  }
};

struct AEOutcome {
  double sim = 1.0;
  double loss = 0.0;
  AspectArray<double> gradient{};  // zero for inactive aspects
  std::optional<Prompt> refined_prompt;
  std::optional<ImageArtifact> refined_image;
  std::optional<double> refined_sim;  // Sim(refined image, original prompt)
  bool applied = false;
};

}  // namespace tdri
