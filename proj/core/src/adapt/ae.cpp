#include "tdri/adapt/ae.hpp"

#include <algorithm>
#include <cmath>

#include "tdri/core/error.hpp"
#include "tdri/reflect/reflect.hpp"

namespace tdri::adapt {

AEOutcome ae_loss(const ImageArtifact& image, const Prompt& prompt) {
  AEOutcome out;
  out.sim = reflect::pair_similarity(image.descriptor, prompt.embedding);
  out.loss = 1.0 - out.sim;
  return out;
}

double ae_loss_at(const Prompt& prompt, const genbridge::ImageFn& image_fn,
                  const AspectArray<double>& weights) {
  return 1.0 - reflect::pair_similarity(image_fn(weights), prompt.embedding);
}

AspectArray<double> ae_gradient(const Prompt& prompt, const genbridge::ImageFn& image_fn,
                                double h) {
  const auto active = prompt.active_aspects();
  if (active.empty()) throw Error(ErrorCode::NoActiveAspects, "prompt has no active aspect");
  AspectArray<double> grad{};
  for (Aspect a : active) {
    AspectArray<double> up = prompt.aspect_weights;
    AspectArray<double> down = prompt.aspect_weights;
    up[index(a)] += h;
    down[index(a)] -= h;
    grad[index(a)] = (ae_loss_at(prompt, image_fn, up) - ae_loss_at(prompt, image_fn, down)) / (2.0 * h);
  }
  return grad;
}

AspectArray<double> ae_gradient_analytic(const Prompt& prompt, const genbridge::MixTerms& terms) {
  const auto active = prompt.active_aspects();
  if (active.empty()) throw Error(ErrorCode::NoActiveAspects, "prompt has no active aspect");
  Vector v = terms.offset;
  for (Aspect a : active) v += prompt.aspect_weights[index(a)] * *terms.aspect[index(a)];
  const Vector p = prompt.embedding.normalized();
  const double n = v.norm();
  const double vp = v.dot(p);
  AspectArray<double> grad{};
  for (Aspect a : active) {
    const Vector& e = *terms.aspect[index(a)];
    grad[index(a)] = -0.5 * (e.dot(p) / n - vp * v.dot(e) / (n * n * n));
  }
  return grad;
}

AEOutcome ae_refine(const Prompt& prompt, const ImageArtifact& image,
                    const genbridge::GeneratorRequest& request,
                    const genbridge::Generator& generator, const d2p::Embedder& embedder,
                    const RefineOptions& options) {
  AEOutcome out = ae_loss(image, prompt);
  if (out.sim >= options.threshold) return out;
  out.applied = true;

  genbridge::GeneratorRequest base = request;
  base.prompt = prompt;
  out.gradient = ae_gradient(prompt, generator.smooth_path(base));

  Prompt refined = prompt;
  bool any_positive = false;
  for (Aspect a : prompt.active_aspects()) {
    double& w = refined.aspect_weights[index(a)];
    w = std::max(0.0, w - options.step * out.gradient[index(a)]);
    any_positive = any_positive || w > 0.0;
  }
  // A step that zeroes every weight would leave nothing to generate from.
  if (!any_positive) refined.aspect_weights = prompt.aspect_weights;

  Vector mix = Vector::Zero(prompt.embedding.size());
  for (Aspect a : refined.active_aspects())
    mix += refined.aspect_weights[index(a)] * embedder.embed(refined.aspect_texts[index(a)]);
  if (mix.norm() > 0.0) refined.embedding = mix.normalized();

  base.prompt = refined;
  ImageArtifact regenerated = generator.generate(base);
  out.refined_sim = reflect::pair_similarity(regenerated.descriptor, prompt.embedding);
  out.refined_prompt = std::move(refined);
  out.refined_image = std::move(regenerated);
  return out;
}

double combined_objective(const PolicyParams& params, const std::vector<PreferencePair>& pairs,
                          const CandidateSet& candidates, const ImageArtifact& image,
                          const Prompt& prompt, double lambda) {
  return -dpo_objective(params, pairs, candidates) + lambda * ae_loss(image, prompt).loss;
}

}  // namespace tdri::adapt
