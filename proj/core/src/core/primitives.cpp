#include <algorithm>
#include <cmath>
#include <numeric>

#include "tdri/core/error.hpp"
#include "tdri/core/linalg.hpp"
#include "tdri/core/rng.hpp"
#include "tdri/core/types.hpp"

namespace tdri {

double cosine(const Vector& a, const Vector& b) {
  if (a.size() != b.size())
    throw Error(ErrorCode::DimensionMismatch, "vector dimensions differ: " +
                                                  std::to_string(a.size()) + " vs " +
                                                  std::to_string(b.size()));
  const double na = a.norm();
  const double nb = b.norm();
  if (na == 0.0 || nb == 0.0) return 0.0;
  return std::clamp(a.dot(b) / (na * nb), -1.0, 1.0);
}

std::uint64_t fnv1a(std::string_view bytes) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t salt) noexcept {
  // splitmix64 finalizer over the combined words.
  std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (salt + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::mt19937_64 make_engine(std::uint64_t seed) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
  return std::mt19937_64(seq);
}

Vector gaussian_vector(std::uint64_t seed, Eigen::Index dim) {
  auto engine = make_engine(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector v(dim);
  for (Eigen::Index i = 0; i < dim; ++i) v[i] = normal(engine);
  return v;
}

Vector random_unit_vector(std::uint64_t seed, Eigen::Index dim) {
  Vector v = gaussian_vector(seed, dim);
  // A zero Gaussian draw has probability zero; retry on the next salt anyway.
  for (std::uint64_t salt = 1; v.norm() == 0.0; ++salt)
    v = gaussian_vector(derive_seed(seed, salt), dim);
  return v.normalized();
}

void DialogueHistory::append(DialogueTurn turn) {
  const int expected = static_cast<int>(turns_.size()) + 1;
  if (turn.index != expected)
    throw Error(ErrorCode::IllegalTransition, "turn index " + std::to_string(turn.index) +
                                                  " does not follow " +
                                                  std::to_string(expected - 1));
  if (turn.user_input.empty())
    throw Error(ErrorCode::IllegalTransition, "turn user input is empty");
  turns_.push_back(std::move(turn));
}

std::vector<Aspect> Prompt::active_aspects() const {
  std::vector<Aspect> out;
  for (Aspect a : kAllAspects)
    if (active(a)) out.push_back(a);
  return out;
}

std::string Prompt::text() const {
  static constexpr std::array<Aspect, kAspectCount> kOrder = {
      Aspect::Content, Aspect::Color,       Aspect::Style,  Aspect::Background,
      Aspect::Size,    Aspect::Perspective, Aspect::Others,
  };
  std::string out;
  for (Aspect a : kOrder) {
    const std::string& t = aspect_texts[index(a)];
    if (t.empty()) continue;
    if (!out.empty()) out += ", ";
    if (a == Aspect::Color && !out.empty()) out += "with ";
    out += t;
  }
  return out;
}

void validate(const Prompt& prompt) {
  bool any_text = false;
  bool any_weight = false;
  for (Aspect a : kAllAspects) {
    const double w = prompt.aspect_weights[index(a)];
    if (!(w >= 0.0) || !std::isfinite(w))
      throw Error(ErrorCode::InvalidPrompt,
                  "aspect weight for " + std::string(to_string(a)) + " is not a finite value >= 0");
    any_text = any_text || prompt.active(a);
    any_weight = any_weight || w > 0.0;
  }
  if (!any_text) throw Error(ErrorCode::InvalidPrompt, "prompt has no aspect text");
  if (!any_weight) throw Error(ErrorCode::InvalidPrompt, "all aspect weights are zero");
  if (!is_unit(prompt.embedding))
    throw Error(ErrorCode::InvalidPrompt, "prompt embedding is not unit norm");
}

double Heatmap::total() const { return std::accumulate(cells.begin(), cells.end(), 0.0); }

SessionContext SessionContext::with(const Prompt& prompt, const Vector& descriptor) const {
  SessionContext next = *this;
  next.prior_prompts.push_back(prompt);
  next.prior_descriptors.push_back(descriptor);
  Vector sum = Vector::Zero(descriptor.size());
  for (const Vector& d : next.prior_descriptors) sum += d;
  next.context_vector = normalized(sum / static_cast<double>(next.prior_descriptors.size()));
  return next;
}

}  // namespace tdri
