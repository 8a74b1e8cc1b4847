#pragma once

#include <memory>
#include <string>

#include "tdri/core/session.hpp"
#include "tdri/d2p/embedder.hpp"
#include "tdri/d2p/lexicon.hpp"
#include "tdri/d2p/summarizer.hpp"
#include "tdri/genbridge/backends.hpp"
#include "tdri/reflect/reflect.hpp"

namespace tdri {

struct Backends {
  std::shared_ptr<const d2p::Embedder> embedder;
  std::shared_ptr<const d2p::Summarizer> summarizer;
  std::shared_ptr<const genbridge::Generator> generator;
  std::shared_ptr<const genbridge::PoseEstimator> pose_estimator;
  std::shared_ptr<const genbridge::Captioner> captioner;
  std::shared_ptr<const reflect::ClarificationTemplates> templates;
};

// Toy embedder, template summarizer, toy generator, pose estimator and
// captioner sized from the config. A null lexicon means the builtin one.
Backends make_toy_backends(const SessionConfig& config,
                           std::shared_ptr<const d2p::Lexicon> lexicon = nullptr);

// The session state machine.
//
//   UserMessage  summarize, generate (pose constraint and context from
//                earlier rounds), A&E refine when Sim < k. Round 1 also
//                estimates and smooths the pose constraint.
//                -> InitialGenerated (round 1) or Refining.
//   Continue     caption the round's image, score consistency, and either
//                ask about one of the worst aspects (-> Clarifying) or wait
//                (-> AwaitFeedback). The dialogue turn is recorded here,
//                once its system response exists.
//   UserAccept   -> Completed.
//
// Each UserMessage draws one seed from the session stream for generation;
// each triggered Continue draws one for aspect selection.
class Protocol {
 public:
  explicit Protocol(Backends backends);

  Session advance(const Session& session, const SessionEvent& event) const;

  const Backends& backends() const noexcept { return backends_; }

 private:
  Session on_message(const Session& session, const UserMessage& msg) const;
  Session on_continue(const Session& session) const;

  Backends backends_;
};

// Builds the pair for a vote on two images of the session. The state is the
// latest prompt's embedding. Throws UnknownImage, SelfPair.
PreferencePair make_preference(const Session& session, const std::string& winner_id,
                               const std::string& loser_id, std::string created_at);

// Appends the vote; every dpo_batch-th pair runs dpo_update on the session
// policy when `update_policy` is set.
Session record_preference(const Session& session, PreferencePair pair, bool update_policy = true);

}  // namespace tdri
