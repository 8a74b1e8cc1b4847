#pragma once

#include <cstdint>
#include <memory>
#include <optional>

#include "tdri/core/config.hpp"
#include "tdri/d2p/embedder.hpp"
#include "tdri/d2p/lexicon.hpp"
#include "tdri/genbridge/backends.hpp"

namespace tdri::genbridge {

// The pieces of a toy descriptor before mixing. The noise-free descriptor
// for weights w is normalize(sum_a w_a * aspect[a] + offset).
struct MixTerms {
  AspectArray<std::optional<Vector>> aspect{};  // embed(aspect text), active aspects only
  Vector offset;                                // context and pose terms
};

// Block-sums a heatmap onto an 8x8 grid, normalizes the flattened cells and
// projects them to `dim` through a seeded Gaussian matrix; unit result.
Vector pose_encoding(const Heatmap& heatmap, Eigen::Index dim, std::uint64_t seed);

class ToyGenerator final : public Generator {
 public:
  static constexpr std::uint64_t kDefaultSeed = 0x51a9c3d7ULL;

  ToyGenerator(std::shared_ptr<const d2p::Embedder> embedder, ToyConstants constants,
               std::uint64_t seed = kDefaultSeed);

  ImageArtifact generate(const GeneratorRequest& request) const override;
  // Noise-free, so it is smooth in the weights.
  ImageFn smooth_path(const GeneratorRequest& request) const override;
  std::string name() const override { return "toy"; }

  MixTerms mix_terms(const GeneratorRequest& request) const;

 private:
  std::shared_ptr<const d2p::Embedder> embedder_;
  ToyConstants constants_;
  std::uint64_t seed_;
};

// Keypoints are a seeded linear map of the descriptor to 2K values pushed
// through a logistic, so they sit inside (0,1).
class ToyPoseEstimator final : public PoseEstimator {
 public:
  static constexpr std::uint64_t kDefaultSeed = 0x90e5e7a1ULL;

  ToyPoseEstimator(Eigen::Index dim, int keypoints, std::uint64_t seed = kDefaultSeed);

  Pose estimate(const ImageArtifact& image) const override;
  std::string name() const override { return "toy"; }

 private:
  Matrix projection_;
  int keypoints_;
};

// Per-aspect linear read-out of the descriptor: the aspect's coordinate
// block plus a small seeded mixing term. Caption text is the two lexicon
// words of that aspect nearest the caption embedding.
class ToyCaptioner final : public Captioner {
 public:
  static constexpr std::uint64_t kDefaultSeed = 0x3c6ef372ULL;
  static constexpr double kMixing = 0.1;

  ToyCaptioner(std::shared_ptr<const d2p::Embedder> embedder,
               std::shared_ptr<const d2p::Lexicon> lexicon, std::uint64_t seed = kDefaultSeed);

  AspectCaptionSet extract(const ImageArtifact& image) const override;
  std::string name() const override { return "toy"; }

  const Matrix& projection(Aspect a) const { return projections_[index(a)]; }

 private:
  struct Word {
    std::string text;
    Vector embedding;
  };
  AspectArray<Matrix> projections_;
  AspectArray<std::vector<Word>> words_;
};

}  // namespace tdri::genbridge
