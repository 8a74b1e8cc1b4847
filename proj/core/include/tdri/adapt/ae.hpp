#pragma once

#include <vector>

#include "tdri/adapt/dpo.hpp"
#include "tdri/adapt/types.hpp"
#include "tdri/d2p/embedder.hpp"
#include "tdri/genbridge/backends.hpp"
#include "tdri/genbridge/toy.hpp"

namespace tdri::adapt {

inline constexpr double kFiniteDifferenceStep = 1e-4;

// Sim = kappa(descriptor, prompt embedding), loss = 1 - Sim. Only sim and
// loss are filled in. Throws DimensionMismatch.
AEOutcome ae_loss(const ImageArtifact& image, const Prompt& prompt);

// Loss as a function of aspect weights through `image_fn`.
double ae_loss_at(const Prompt& prompt, const genbridge::ImageFn& image_fn,
                  const AspectArray<double>& weights);

// Central differences over the active aspects' weights; inactive aspects get
// 0. Throws NoActiveAspects.
AspectArray<double> ae_gradient(const Prompt& prompt, const genbridge::ImageFn& image_fn,
                                double h = kFiniteDifferenceStep);

// Closed form for the toy mix v = sum_a w_a e_a + offset:
//   dL/dw_a = -1/2 * ((e_a . p) / |v| - (v . p)(v . e_a) / |v|^3).
AspectArray<double> ae_gradient_analytic(const Prompt& prompt, const genbridge::MixTerms& terms);

struct RefineOptions {
  double threshold = 0.70;  // k
  double step = 0.5;        // eta
};

// When Sim < k: one step w <- max(0, w - eta * grad), prompt embedding
// re-derived as normalize(sum_a w_a embed(text_a)), image regenerated with
// the request's seed. refined_sim is measured against the original prompt.
AEOutcome ae_refine(const Prompt& prompt, const ImageArtifact& image,
                    const genbridge::GeneratorRequest& request,
                    const genbridge::Generator& generator, const d2p::Embedder& embedder,
                    const RefineOptions& options);

// For minimization: -dpo_objective + lambda * ae_loss.
double combined_objective(const PolicyParams& params, const std::vector<PreferencePair>& pairs,
                          const CandidateSet& candidates, const ImageArtifact& image,
                          const Prompt& prompt, double lambda);

}  // namespace tdri::adapt
