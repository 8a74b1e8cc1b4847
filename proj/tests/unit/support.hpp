#pragma once

// Test doubles and small builders shared by the suites.

#include <atomic>
#include <memory>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "tdri/core/error.hpp"
#include "tdri/core/protocol.hpp"
#include "tdri/core/rng.hpp"

namespace tdri::testing {

inline Vector unit(Eigen::Index dim, Eigen::Index hot) {
  Vector v = Vector::Zero(dim);
  v[hot] = 1.0;
  return v;
}

inline Vector random_unit(std::uint64_t seed, Eigen::Index dim = 64) { return random_unit_vector(seed, dim); }

inline Prompt prompt_with(Backends const& b, std::initializer_list<std::pair<Aspect, std::string>> texts,
                          int round = 1) {
  Prompt p;
  Vector sum = Vector::Zero(b.embedder->dim());
  for (const auto& [a, t] : texts) {
    p.aspect_texts[index(a)] = t;
    p.aspect_weights[index(a)] = 1.0;
    sum += b.embedder->embed(t);
  }
  p.embedding = normalized(sum);
  p.round = round;
  return p;
}

// Returns the wrapped captioner's set with the listed aspects' embeddings
// negated, for images generated in the listed rounds (all rounds when empty).
class DistortingCaptioner final : public genbridge::Captioner {
 public:
  DistortingCaptioner(std::shared_ptr<const genbridge::Captioner> inner, std::set<Aspect> aspects,
                      std::set<int> rounds = {})
      : inner_(std::move(inner)), aspects_(std::move(aspects)), rounds_(std::move(rounds)) {}

  AspectCaptionSet extract(const ImageArtifact& image) const override {
    AspectCaptionSet set = inner_->extract(image);
    if (!rounds_.empty() && !rounds_.count(image.provenance.round)) return set;
    for (Aspect a : aspects_) set[a].embedding = -set[a].embedding;
    return set;
  }
  std::string name() const override { return "distorting"; }

 private:
  std::shared_ptr<const genbridge::Captioner> inner_;
  std::set<Aspect> aspects_;
  std::set<int> rounds_;
};

// Delegates until armed, then throws BackendUnavailable.
class FailingGenerator final : public genbridge::Generator {
 public:
  explicit FailingGenerator(std::shared_ptr<const genbridge::Generator> inner) : inner_(std::move(inner)) {}

  ImageArtifact generate(const genbridge::GeneratorRequest& request) const override {
    if (armed_) throw Error(ErrorCode::BackendUnavailable, "generator offline");
    return inner_->generate(request);
  }
  std::string name() const override { return inner_->name(); }

  void arm(bool on = true) const { armed_ = on; }

 private:
  std::shared_ptr<const genbridge::Generator> inner_;
  mutable std::atomic<bool> armed_{false};
};

class FailingCaptioner final : public genbridge::Captioner {
 public:
  explicit FailingCaptioner(std::shared_ptr<const genbridge::Captioner> inner) : inner_(std::move(inner)) {}

  AspectCaptionSet extract(const ImageArtifact& image) const override {
    if (armed_) throw Error(ErrorCode::BackendUnavailable, "captioner offline");
    return inner_->extract(image);
  }
  std::string name() const override { return inner_->name(); }

  void arm(bool on = true) const { armed_ = on; }

 private:
  std::shared_ptr<const genbridge::Captioner> inner_;
  mutable std::atomic<bool> armed_{false};
};

// Backends whose Color caption is flipped on the given rounds, so a prompt
// with Content and Color text scores r_t near 0.5.
inline Backends distorted_backends(const SessionConfig& config, std::set<int> rounds = {}) {
  Backends b = make_toy_backends(config);
  b.captioner = std::make_shared<DistortingCaptioner>(b.captioner, std::set<Aspect>{Aspect::Color},
                                                      std::move(rounds));
  return b;
}

// Pairs whose winner leans along one hidden direction and loser against it,
// under states clustered around one anchor.
inline std::vector<PreferencePair> consistent_pairs(int n, Eigen::Index dim, std::uint64_t seed) {
  const Vector u = random_unit_vector(derive_seed(seed, 1), dim);
  const Vector anchor = random_unit_vector(derive_seed(seed, 2), dim);
  std::vector<PreferencePair> pairs;
  for (int i = 0; i < n; ++i) {
    const std::uint64_t s = derive_seed(seed, 100 + static_cast<std::uint64_t>(i));
    PreferencePair p;
    p.state_embedding = normalized(anchor + 0.3 * random_unit_vector(derive_seed(s, 1), dim));
    p.winner_descriptor = normalized(u + 0.2 * random_unit_vector(derive_seed(s, 2), dim));
    p.loser_descriptor = normalized(-u + 0.2 * random_unit_vector(derive_seed(s, 3), dim));
    p.winner_id = "w" + std::to_string(i);
    p.loser_id = "l" + std::to_string(i);
    p.round = 1;
    pairs.push_back(std::move(p));
  }
  return pairs;
}

// Each pair followed by its mirror image.
inline std::vector<PreferencePair> antisymmetric(const std::vector<PreferencePair>& pairs) {
  std::vector<PreferencePair> out;
  for (const PreferencePair& p : pairs) {
    out.push_back(p);
    PreferencePair flip = p;
    std::swap(flip.winner_descriptor, flip.loser_descriptor);
    std::swap(flip.winner_id, flip.loser_id);
    out.push_back(std::move(flip));
  }
  return out;
}

inline std::vector<Vector> pair_candidates(const std::vector<PreferencePair>& pairs) {
  std::vector<Vector> out;
  for (const PreferencePair& p : pairs) {
    out.push_back(p.winner_descriptor);
    out.push_back(p.loser_descriptor);
  }
  return out;
}

inline Session run_round(const Protocol& p, const Session& s, const std::string& text) {
  return p.advance(p.advance(s, UserMessage{text}), Continue{});
}

}  // namespace tdri::testing
