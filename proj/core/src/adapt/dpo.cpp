#include "tdri/adapt/dpo.hpp"

#include <algorithm>
#include <cmath>

#include "tdri/core/error.hpp"
#include "tdri/core/rng.hpp"

namespace tdri::adapt {

namespace {

void require_pairs(const std::vector<PreferencePair>& pairs) {
  if (pairs.empty()) throw Error(ErrorCode::EmptyPairs, "no preference pairs");
}

void check_shapes(const PolicyParams& params, const PreferencePair& p) {
  const Eigen::Index d = params.weight_matrix.rows();
  if (params.weight_matrix.cols() != d || p.state_embedding.size() != d ||
      p.winner_descriptor.size() != d || p.loser_descriptor.size() != d)
    throw Error(ErrorCode::DimensionMismatch, "pair dimensions do not match the policy");
}

bool contains(const CandidateSet& candidates, const Vector& x) {
  return std::any_of(candidates.begin(), candidates.end(),
                     [&](const Vector& c) { return same(c, x); });
}

void require_members(const CandidateSet& candidates, const PreferencePair& p) {
  if (!contains(candidates, p.winner_descriptor))
    throw Error(ErrorCode::CandidateMissing, "winner " + p.winner_id + " is not a candidate");
  if (!contains(candidates, p.loser_descriptor))
    throw Error(ErrorCode::CandidateMissing, "loser " + p.loser_id + " is not a candidate");
}

double logit(const PolicyParams& params, const Vector& x, const Vector& s) {
  return x.dot(params.weight_matrix * s);
}

}  // namespace

CandidateSet build_candidates(const std::vector<Vector>& descriptors, std::uint64_t seed,
                              int per_image, double scale) {
  CandidateSet out;
  out.reserve(descriptors.size() * static_cast<std::size_t>(per_image + 1));
  for (std::size_t i = 0; i < descriptors.size(); ++i) {
    const Vector& d = descriptors[i];
    out.push_back(d);
    for (int j = 0; j < per_image; ++j) {
      const std::uint64_t s = derive_seed(derive_seed(seed, i), static_cast<std::uint64_t>(j));
      out.push_back(normalized(d + scale * gaussian_vector(s, d.size())));
    }
  }
  return out;
}

double log_policy(const PolicyParams& params, const CandidateSet& candidates, const Vector& x,
                  const Vector& state) {
  if (candidates.empty()) throw Error(ErrorCode::CandidateMissing, "candidate set is empty");
  const Vector ts = params.weight_matrix * state;
  double max_logit = -INFINITY;
  for (const Vector& c : candidates) max_logit = std::max(max_logit, c.dot(ts));
  double z = 0.0;
  for (const Vector& c : candidates) z += std::exp(c.dot(ts) - max_logit);
  return x.dot(ts) - max_logit - std::log(z);
}

double dpo_objective(const PolicyParams& params, const std::vector<PreferencePair>& pairs,
                     const CandidateSet& candidates) {
  require_pairs(pairs);
  double sum = 0.0;
  for (const PreferencePair& p : pairs) {
    check_shapes(params, p);
    require_members(candidates, p);
    sum += logit(params, p.winner_descriptor - p.loser_descriptor, p.state_embedding);
  }
  return sum / static_cast<double>(pairs.size());
}

double dpo_objective_softmax(const PolicyParams& params, const std::vector<PreferencePair>& pairs,
                             const CandidateSet& candidates) {
  require_pairs(pairs);
  double sum = 0.0;
  for (const PreferencePair& p : pairs) {
    check_shapes(params, p);
    require_members(candidates, p);
    sum += log_policy(params, candidates, p.winner_descriptor, p.state_embedding) -
           log_policy(params, candidates, p.loser_descriptor, p.state_embedding);
  }
  return sum / static_cast<double>(pairs.size());
}

Matrix dpo_gradient(const PolicyParams& params, const std::vector<PreferencePair>& pairs) {
  require_pairs(pairs);
  Matrix g = Matrix::Zero(params.weight_matrix.rows(), params.weight_matrix.cols());
  for (const PreferencePair& p : pairs) {
    check_shapes(params, p);
    g += (p.winner_descriptor - p.loser_descriptor) * p.state_embedding.transpose();
  }
  return g / static_cast<double>(pairs.size());
}

double preference_accuracy(const PolicyParams& params, const std::vector<PreferencePair>& pairs) {
  require_pairs(pairs);
  std::size_t correct = 0;
  for (const PreferencePair& p : pairs) {
    check_shapes(params, p);
    if (logit(params, p.winner_descriptor - p.loser_descriptor, p.state_embedding) > 0.0) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(pairs.size());
}

PolicyParams dpo_update(const PolicyParams& params, const std::vector<PreferencePair>& pairs,
                        int epochs, int batch) {
  if (batch < 1 || pairs.size() < static_cast<std::size_t>(batch))
    throw Error(ErrorCode::InsufficientPairs, "need " + std::to_string(batch) +
                                                  " pairs, have " + std::to_string(pairs.size()));
  const std::vector<PreferencePair> recent(pairs.end() - batch, pairs.end());
  PolicyParams out = params;
  for (int e = 0; e < epochs; ++e) out.weight_matrix += out.step_size * dpo_gradient(out, recent);
  ++out.version;
  return out;
}

}  // namespace tdri::adapt
