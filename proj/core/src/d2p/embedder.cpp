#include "tdri/d2p/embedder.hpp"

#include "tdri/core/error.hpp"
#include "tdri/core/rng.hpp"

namespace tdri::d2p {

AspectBlock aspect_block(Aspect aspect, Eigen::Index dim) {
  const auto n = static_cast<Eigen::Index>(kAspectCount);
  const auto i = static_cast<Eigen::Index>(index(aspect));
  const Eigen::Index start = i * dim / n;
  const Eigen::Index end = (i + 1) * dim / n;
  return {start, end - start};
}

ToyEmbedder::ToyEmbedder(Eigen::Index dim, std::shared_ptr<const Lexicon> lexicon,
                         std::uint64_t seed)
    : dim_(dim), lexicon_(std::move(lexicon)), seed_(seed) {
  if (dim_ < static_cast<Eigen::Index>(kAspectCount))
    throw Error(ErrorCode::InvalidConfig, "toy embedder needs dim >= 7", "embedding_dim");
  if (!lexicon_) lexicon_ = std::shared_ptr<const Lexicon>(&Lexicon::builtin(), [](const Lexicon*) {});
}

Vector ToyEmbedder::token_vector(std::string_view token) const {
  const Aspect home = lexicon_->lookup(token).value_or(Aspect::Content);
  Vector v = gaussian_vector(derive_seed(seed_, fnv1a(token)), dim_);
  const AspectBlock block = aspect_block(home, dim_);
  for (Eigen::Index i = 0; i < dim_; ++i)
    if (i < block.start || i >= block.start + block.size) v[i] *= kLeak;
  return v.normalized();
}

Vector ToyEmbedder::embed(std::string_view text) const {
  const auto tokens = tokenize(text);
  if (tokens.empty()) throw Error(ErrorCode::EmptyText, "cannot embed text without tokens");
  Vector sum = Vector::Zero(dim_);
  for (const std::string& t : tokens) sum += token_vector(t);
  return normalized(sum);
}

}  // namespace tdri::d2p
