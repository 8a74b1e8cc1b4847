#include "tdri/core/protocol.hpp"

#include "tdri/adapt/ae.hpp"
#include "tdri/adapt/dpo.hpp"
#include "tdri/core/error.hpp"
#include "tdri/genbridge/pose.hpp"
#include "tdri/genbridge/toy.hpp"

namespace tdri {

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw Error(ErrorCode::InvalidConfig, std::string("backend missing: ") + what);
}

}  // namespace

Backends make_toy_backends(const SessionConfig& config,
                           std::shared_ptr<const d2p::Lexicon> lexicon) {
  if (!lexicon)
    lexicon = std::shared_ptr<const d2p::Lexicon>(&d2p::Lexicon::builtin(), [](const d2p::Lexicon*) {});
  Backends b;
  auto embedder = std::make_shared<d2p::ToyEmbedder>(config.embedding_dim, lexicon);
  b.embedder = embedder;
  b.summarizer = std::make_shared<d2p::TemplateSummarizer>(embedder, lexicon);
  b.generator = std::make_shared<genbridge::ToyGenerator>(embedder, config.toy);
  b.pose_estimator =
      std::make_shared<genbridge::ToyPoseEstimator>(config.embedding_dim, config.toy.pose_keypoints);
  b.captioner = std::make_shared<genbridge::ToyCaptioner>(embedder, lexicon);
  b.templates = std::shared_ptr<const reflect::ClarificationTemplates>(
      &reflect::ClarificationTemplates::builtin(), [](const reflect::ClarificationTemplates*) {});
  return b;
}

Protocol::Protocol(Backends backends) : backends_(std::move(backends)) {
  require(backends_.embedder != nullptr, "embedder");
  require(backends_.summarizer != nullptr, "summarizer");
  require(backends_.generator != nullptr, "generator");
  require(backends_.pose_estimator != nullptr, "pose estimator");
  require(backends_.captioner != nullptr, "captioner");
  require(backends_.templates != nullptr, "clarification templates");
}

Session Protocol::advance(const Session& session, const SessionEvent& event) const {
  check_event(session, event);
  if (const auto* msg = std::get_if<UserMessage>(&event)) return on_message(session, *msg);
  if (std::holds_alternative<Continue>(event)) return on_continue(session);
  Session s = session;
  s.pending_query.reset();
  s.phase = Phase::Completed;
  return s;
}

Session Protocol::on_message(const Session& session, const UserMessage& msg) const {
  Session s = session;
  const SessionConfig& cfg = s.config;

  Prompt prompt = backends_.summarizer->summarize({s.history, msg.text, cfg});
  genbridge::GeneratorRequest request{prompt, s.pose_constraint, s.context, s.rng.next()};
  ImageArtifact image = backends_.generator->generate(request);

  const AEOutcome ae =
      adapt::ae_refine(prompt, image, request, *backends_.generator, *backends_.embedder,
                       {cfg.ae_threshold, cfg.toy.ae_step});
  if (ae.applied && ae.refined_prompt && ae.refined_image) {
    prompt = *ae.refined_prompt;
    image = *ae.refined_image;
  }
  if (!is_unit(image.descriptor))
    throw Error(ErrorCode::BackendUnavailable, "generator returned a non-unit descriptor");
  image.id = "img-" + std::to_string(s.images.size() + 1);

  const bool first = s.images.empty();
  if (first) {
    const Pose raw = backends_.pose_estimator->estimate(image);
    s.pose_constraint = genbridge::smooth_pose(raw, cfg.toy.pose_sigma, cfg.toy.heatmap_height,
                                               cfg.toy.heatmap_width);
  }

  s.ae_records.push_back({prompt.round, ae.sim, ae.applied, ae.refined_sim});
  s.prompts.push_back(std::move(prompt));
  s.images.push_back(std::move(image));
  s.pending_input = msg.text;
  s.pending_query.reset();
  s.phase = first ? Phase::InitialGenerated : Phase::Refining;
  return s;
}

Session Protocol::on_continue(const Session& session) const {
  Session s = session;
  const ImageArtifact& image = s.images.back();
  const Prompt& prompt = s.prompts.back();

  AspectCaptionSet captions = backends_.captioner->extract(image);
  validate(captions);
  AmbiguityReport report =
      reflect::consistency(prompt, captions, *backends_.embedder, s.config);
  for (Aspect a : kAllAspects) captions[a].similarity = report.per_aspect_similarity[index(a)];

  std::string response;
  if (report.triggered) {
    report.selected_aspect = reflect::select_aspect(report, s.rng.next());
    ClarificationQuery query = reflect::build_query(prompt, captions, report, *backends_.templates);
    response = query.question_text;
    s.pending_query = std::move(query);
    s.phase = Phase::Clarifying;
  } else {
    response = prompt.text();
    s.phase = Phase::AwaitFeedback;
  }

  s.history.append({static_cast<int>(s.history.size()) + 1, *s.pending_input, std::move(response)});
  s.context = s.context.with(prompt, image.descriptor);
  s.reflections.push_back({prompt.round, std::move(report), std::move(captions)});
  s.pending_input.reset();
  return s;
}

PreferencePair make_preference(const Session& session, const std::string& winner_id,
                               const std::string& loser_id, std::string created_at) {
  if (winner_id == loser_id)
    throw Error(ErrorCode::SelfPair, "winner and loser are the same image", "loser_id");
  const ImageArtifact* winner = session.find_image(winner_id);
  if (!winner) throw Error(ErrorCode::UnknownImage, "no image " + winner_id, "winner_id");
  const ImageArtifact* loser = session.find_image(loser_id);
  if (!loser) throw Error(ErrorCode::UnknownImage, "no image " + loser_id, "loser_id");

  PreferencePair p;
  p.state_embedding = session.prompts.back().embedding;
  p.round = session.round();
  p.winner_id = winner_id;
  p.winner_descriptor = winner->descriptor;
  p.loser_id = loser_id;
  p.loser_descriptor = loser->descriptor;
  p.session_id = session.id;
  p.created_at = std::move(created_at);
  return p;
}

Session record_preference(const Session& session, PreferencePair pair, bool update_policy) {
  Session s = session;
  s.preference_pairs.push_back(std::move(pair));
  const auto batch = static_cast<std::size_t>(s.config.dpo_batch);
  if (update_policy && s.preference_pairs.size() % batch == 0)
    s.policy = adapt::dpo_update(s.policy, s.preference_pairs, s.config.dpo_epochs,
                                 s.config.dpo_batch);
  return s;
}

}  // namespace tdri
