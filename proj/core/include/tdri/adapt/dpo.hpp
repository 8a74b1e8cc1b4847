#pragma once

#include <cstdint>
#include <vector>

#include "tdri/adapt/types.hpp"

namespace tdri::adapt {

// The finite support X of the toy policy.
using CandidateSet = std::vector<Vector>;

// Each descriptor plus `per_image` seeded perturbations
// normalize(d + scale * gaussian).
CandidateSet build_candidates(const std::vector<Vector>& descriptors, std::uint64_t seed,
                              int per_image = 8, double scale = 0.1);

// log pi(x | s) under softmax over the candidates.
double log_policy(const PolicyParams& params, const CandidateSet& candidates, const Vector& x,
                  const Vector& state);

// Mean over pairs of log pi(x_w|s) - log pi(x_l|s), evaluated in the
// cancelled form (x_w - x_l)^T theta s. Throws EmptyPairs, CandidateMissing.
double dpo_objective(const PolicyParams& params, const std::vector<PreferencePair>& pairs,
                     const CandidateSet& candidates);

// Same objective through explicit log-softmax terms.
double dpo_objective_softmax(const PolicyParams& params, const std::vector<PreferencePair>& pairs,
                             const CandidateSet& candidates);

// d objective / d theta = mean (x_w - x_l) s^T. Throws EmptyPairs.
Matrix dpo_gradient(const PolicyParams& params, const std::vector<PreferencePair>& pairs);

// Fraction of pairs with pi(x_w|s) > pi(x_l|s).
double preference_accuracy(const PolicyParams& params, const std::vector<PreferencePair>& pairs);

// `epochs` full-batch ascent steps on the most recent `batch` pairs, then
// version + 1. Throws InsufficientPairs when fewer than `batch` pairs exist.
PolicyParams dpo_update(const PolicyParams& params, const std::vector<PreferencePair>& pairs,
                        int epochs, int batch);

}  // namespace tdri::adapt
