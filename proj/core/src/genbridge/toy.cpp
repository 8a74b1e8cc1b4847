#include "tdri/genbridge/toy.hpp"

#include <algorithm>
#include <cmath>

#include "tdri/core/error.hpp"
#include "tdri/core/rng.hpp"
#include "tdri/genbridge/pose.hpp"

namespace tdri::genbridge {

namespace {

constexpr int kPoseBins = 8;
constexpr std::uint64_t kPoseSalt = 0x706f7365ULL;  // "pose"
constexpr std::uint64_t kNoiseSalt = 0x6e6f6973ULL;

Matrix gaussian_matrix(std::uint64_t seed, Eigen::Index rows, Eigen::Index cols) {
  const Vector flat = gaussian_vector(seed, rows * cols);
  return Eigen::Map<const Matrix>(flat.data(), rows, cols);
}

void check_dim(const Vector& v, Eigen::Index dim, const char* what) {
  if (v.size() != dim)
    throw Error(ErrorCode::DimensionMismatch, std::string(what) + " has dimension " +
                                                  std::to_string(v.size()) + ", expected " +
                                                  std::to_string(dim));
}

Vector mix(const MixTerms& terms, const AspectArray<double>& weights) {
  Vector v = terms.offset;
  for (Aspect a : kAllAspects)
    if (terms.aspect[index(a)]) v += weights[index(a)] * *terms.aspect[index(a)];
  return v;
}

}  // namespace

ImageFn Generator::smooth_path(const GeneratorRequest& request) const {
  // Captures `this`; the generator must outlive the returned function.
  return [this, request](const AspectArray<double>& weights) {
    GeneratorRequest r = request;
    r.prompt.aspect_weights = weights;
    return generate(r).descriptor;
  };
}

Vector pose_encoding(const Heatmap& heatmap, Eigen::Index dim, std::uint64_t seed) {
  Vector bins = Vector::Zero(kPoseBins * kPoseBins);
  for (int r = 0; r < heatmap.height; ++r)
    for (int c = 0; c < heatmap.width; ++c)
      bins[(r * kPoseBins / heatmap.height) * kPoseBins + c * kPoseBins / heatmap.width] +=
          heatmap.at(r, c);
  if (bins.norm() == 0.0) return Vector::Zero(dim);
  const Matrix projection = gaussian_matrix(seed, dim, kPoseBins * kPoseBins);
  return normalized(projection * bins.normalized());
}

ToyGenerator::ToyGenerator(std::shared_ptr<const d2p::Embedder> embedder, ToyConstants constants,
                           std::uint64_t seed)
    : embedder_(std::move(embedder)), constants_(constants), seed_(seed) {}

MixTerms ToyGenerator::mix_terms(const GeneratorRequest& request) const {
  const Eigen::Index dim = embedder_->dim();
  MixTerms terms;
  for (Aspect a : kAllAspects)
    if (request.prompt.active(a))
      terms.aspect[index(a)] = embedder_->embed(request.prompt.aspect_texts[index(a)]);
  terms.offset = Vector::Zero(dim);
  if (!request.context.empty()) {
    check_dim(request.context.context_vector, dim, "context vector");
    terms.offset += constants_.context_weight * request.context.context_vector;
  }
  if (request.pose_constraint) {
    const Pose& pose = *request.pose_constraint;
    const Heatmap heatmap =
        pose.heatmap ? *pose.heatmap
                     : *smooth_pose(pose, constants_.pose_sigma, constants_.heatmap_height,
                                    constants_.heatmap_width)
                            .heatmap;
    terms.offset +=
        constants_.pose_weight * pose_encoding(heatmap, dim, derive_seed(seed_, kPoseSalt));
  }
  return terms;
}

ImageArtifact ToyGenerator::generate(const GeneratorRequest& request) const {
  validate(request.prompt);
  const MixTerms terms = mix_terms(request);
  Vector v = mix(terms, request.prompt.aspect_weights);
  if (constants_.noise_scale != 0.0)
    v += constants_.noise_scale *
         random_unit_vector(derive_seed(derive_seed(seed_, kNoiseSalt), request.seed),
                            embedder_->dim());
  if (v.norm() == 0.0) throw Error(ErrorCode::InvalidPrompt, "generator mix is the zero vector");

  ImageArtifact image;
  image.descriptor = v.normalized();
  image.provenance = Provenance{request.prompt.round, name(), request.seed};
  return image;
}

ImageFn ToyGenerator::smooth_path(const GeneratorRequest& request) const {
  return [terms = mix_terms(request)](const AspectArray<double>& weights) {
    return normalized(mix(terms, weights));
  };
}

ToyPoseEstimator::ToyPoseEstimator(Eigen::Index dim, int keypoints, std::uint64_t seed)
    : projection_(gaussian_matrix(seed, 2 * static_cast<Eigen::Index>(keypoints), dim)),
      keypoints_(keypoints) {
  if (keypoints < 1) throw Error(ErrorCode::InvalidConfig, "need at least one keypoint", "toy.pose_keypoints");
}

Pose ToyPoseEstimator::estimate(const ImageArtifact& image) const {
  check_dim(image.descriptor, projection_.cols(), "descriptor");
  const Vector z = projection_ * image.descriptor;
  auto squash = [](double t) { return std::clamp(1.0 / (1.0 + std::exp(-t)), 0.0, 1.0); };
  Pose pose;
  pose.keypoints.reserve(static_cast<std::size_t>(keypoints_));
  for (int i = 0; i < keypoints_; ++i) pose.keypoints.push_back({squash(z[2 * i]), squash(z[2 * i + 1])});
  return pose;
}

ToyCaptioner::ToyCaptioner(std::shared_ptr<const d2p::Embedder> embedder,
                           std::shared_ptr<const d2p::Lexicon> lexicon, std::uint64_t seed) {
  const Eigen::Index dim = embedder->dim();
  const double scale = kMixing / std::sqrt(static_cast<double>(dim));
  for (Aspect a : kAllAspects) {
    const d2p::AspectBlock block = d2p::aspect_block(a, dim);
    Matrix p = scale * gaussian_matrix(derive_seed(seed, index(a)), dim, dim);
    for (Eigen::Index i = block.start; i < block.start + block.size; ++i) p(i, i) += 1.0;
    projections_[index(a)] = std::move(p);
    for (const std::string& w : lexicon->words(a)) words_[index(a)].push_back({w, embedder->embed(w)});
  }
}

AspectCaptionSet ToyCaptioner::extract(const ImageArtifact& image) const {
  check_dim(image.descriptor, projections_[0].cols(), "descriptor");
  AspectCaptionSet set;
  for (Aspect a : kAllAspects) {
    AspectCaption& cap = set[a];
    cap.aspect = a;
    cap.embedding = normalized(projections_[index(a)] * image.descriptor);

    std::vector<std::pair<double, const Word*>> ranked;
    for (const Word& w : words_[index(a)]) ranked.emplace_back(w.embedding.dot(cap.embedding), &w);
    const std::size_t top = std::min<std::size_t>(2, ranked.size());
    std::partial_sort(ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(top),
                      ranked.end(), [](const auto& x, const auto& y) {
                        return x.first != y.first ? x.first > y.first : x.second->text < y.second->text;
                      });
    for (std::size_t i = 0; i < top; ++i) {
      if (i) cap.text += ' ';
      cap.text += ranked[i].second->text;
    }
  }
  return set;
}

}  // namespace tdri::genbridge
