#include "tdri/harness/simulated_user.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "tdri/core/error.hpp"
#include "tdri/core/rng.hpp"
#include "tdri/reflect/reflect.hpp"

namespace tdri::harness {

SimulatedUser make_user(const TargetSpec& target, const Backends& backends, const Scenario& scenario,
                        const d2p::Lexicon& lexicon) {
  SimulatedUser user;
  user.target = target;
  user.patience = scenario.patience;
  user.strategy = scenario.strategy;
  user.temperature = scenario.temperature;
  user.slack = scenario.slack;

  Prompt& p = user.target_prompt;
  Vector mix = Vector::Zero(backends.embedder->dim());
  for (Aspect a : target.aspects()) {
    const Prompt single =
        backends.summarizer->summarize({DialogueHistory{}, render_edit(a, target.tokens[index(a)]), scenario.config});
    p.aspect_texts[index(a)] = single.active(a) ? single.aspect_texts[index(a)]
                                                : render_edit(a, target.tokens[index(a)]);
    p.aspect_weights[index(a)] = 1.0;
    mix += backends.embedder->embed(p.aspect_texts[index(a)]);
  }
  p.embedding = normalized(mix);
  p.round = 1;

  const genbridge::GeneratorRequest request{p, std::nullopt, SessionContext{}, 0};
  user.target_descriptor = normalized(backends.generator->smooth_path(request)(p.aspect_weights));
  ImageArtifact image;
  image.descriptor = user.target_descriptor;
  user.target_captions = backends.captioner->extract(image);

  for (Aspect a : kAllAspects)
    for (const std::string& w : lexicon.words(a))
      if (!is_template_word(a, w)) user.vocabulary[index(a)].push_back({w, backends.embedder->embed(w)});
  return user;
}

double alignment(const SimulatedUser& user, const Vector& descriptor) {
  return reflect::pair_similarity(descriptor, user.target_descriptor);
}

Aspect choose_aspect(const SimulatedUser& user, const Session& session, const Backends& backends,
                     std::uint64_t seed) {
  if (session.images.empty()) throw Error(ErrorCode::NoImages, "session has no image yet");
  const std::vector<Aspect> aspects = user.target.aspects();
  if (session.pending_query &&
      std::find(aspects.begin(), aspects.end(), session.pending_query->aspect) != aspects.end())
    return session.pending_query->aspect;

  if (user.strategy == EditStrategy::RandomAspect) {
    auto engine = make_engine(seed);
    std::uniform_int_distribution<std::size_t> pick(0, aspects.size() - 1);
    return aspects[pick(engine)];
  }
  const AspectCaptionSet captions = backends.captioner->extract(session.images.back());
  Aspect worst = aspects.front();
  double worst_sim = 2.0;
  for (Aspect a : aspects) {
    const double k = reflect::pair_similarity(captions[a].embedding, user.target_captions[a].embedding);
    if (k < worst_sim) {
      worst_sim = k;
      worst = a;
    }
  }
  return worst;
}

std::string simulate_feedback(const SimulatedUser& user, const Session& session,
                              const Backends& backends, std::uint64_t seed) {
  if (session.images.empty()) throw Error(ErrorCode::NoImages, "session has no image yet");
  if ((session.images.back().descriptor - user.target_descriptor).norm() <= kAcceptTolerance)
    return std::string(kAcceptSentinel);

  const Aspect a = choose_aspect(user, session, backends, derive_seed(seed, 1));
  const Vector& goal = user.target_captions[a].embedding;
  const auto& vocab = user.vocabulary[index(a)];
  const std::size_t want = user.target.tokens[index(a)].size();

  std::vector<std::pair<double, std::size_t>> ranked;
  for (std::size_t i = 0; i < vocab.size(); ++i) ranked.emplace_back(cosine(vocab[i].embedding, goal), i);
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto& x, const auto& y) { return x.first > y.first; });
  ranked.resize(std::min(ranked.size(), want + static_cast<std::size_t>(user.slack)));

  // Softmax sampling without replacement, then back to rank order.
  auto engine = make_engine(derive_seed(seed, 2));
  std::vector<std::size_t> chosen;
  std::vector<bool> taken(ranked.size(), false);
  while (chosen.size() < std::min(want, ranked.size())) {
    std::vector<double> w(ranked.size(), 0.0);
    for (std::size_t i = 0; i < ranked.size(); ++i)
      if (!taken[i]) w[i] = std::exp((ranked[i].first - ranked.front().first) / user.temperature);
    std::discrete_distribution<std::size_t> pick(w.begin(), w.end());
    const std::size_t i = pick(engine);
    taken[i] = true;
    chosen.push_back(i);
  }
  std::sort(chosen.begin(), chosen.end());
  std::vector<std::string> tokens;
  for (std::size_t i : chosen) tokens.push_back(vocab[ranked[i].second].text);
  return render_edit(a, tokens);
}

}  // namespace tdri::harness
