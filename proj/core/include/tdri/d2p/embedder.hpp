#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>

#include "tdri/core/aspect.hpp"
#include "tdri/core/linalg.hpp"
#include "tdri/d2p/lexicon.hpp"

namespace tdri::d2p {

// phi / psi: text -> unit vector. Implementations must be deterministic and
// safe to call concurrently.
class Embedder {
 public:
  virtual ~Embedder() = default;
  // Throws EmptyText when the text carries no tokens.
  virtual Vector embed(std::string_view text) const = 0;
  virtual Eigen::Index dim() const noexcept = 0;
  virtual std::string name() const = 0;
};

// Contiguous coordinate range [start, start + size) reserved for an aspect
// in toy embedding spaces.
struct AspectBlock {
  Eigen::Index start = 0;
  Eigen::Index size = 0;
};
AspectBlock aspect_block(Aspect aspect, Eigen::Index dim);

// Bag-of-tokens embedder. Each token maps to a fixed Gaussian direction
// whose mass sits mostly in the coordinate block of the token's lexicon
// aspect (unknown tokens count as Content); the text embedding is the
// normalized sum. Token order never matters.
class ToyEmbedder final : public Embedder {
 public:
  static constexpr std::uint64_t kDefaultSeed = 0x7d2b1e5aULL;
  static constexpr double kLeak = 0.15;  // off-block standard deviation

  ToyEmbedder(Eigen::Index dim, std::shared_ptr<const Lexicon> lexicon,
              std::uint64_t seed = kDefaultSeed);

  Vector embed(std::string_view text) const override;
  Eigen::Index dim() const noexcept override { return dim_; }
  std::string name() const override { return "toy-bag-of-tokens"; }

  Vector token_vector(std::string_view token) const;

 private:
  Eigen::Index dim_;
  std::shared_ptr<const Lexicon> lexicon_;
  std::uint64_t seed_;
};

}  // namespace tdri::d2p
