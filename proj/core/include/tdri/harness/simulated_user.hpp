#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tdri/core/protocol.hpp"
#include "tdri/core/session.hpp"
#include "tdri/harness/scenario.hpp"

namespace tdri::harness {

inline constexpr std::string_view kAcceptSentinel = "accept";
inline constexpr double kAcceptTolerance = 1e-6;

struct SimulatedUser {
  struct Word {
    std::string text;
    Vector embedding;
  };

  TargetSpec target;
  Prompt target_prompt;
  Vector target_descriptor;
  AspectCaptionSet target_captions;
  int patience = 10;
  EditStrategy strategy = EditStrategy::WorstAspect;
  double temperature = 0.05;
  int slack = 1;
  AspectArray<std::vector<Word>> vocabulary{};  // lexicon words the user may type
};

// Target prompt texts are what the summarizer makes of each aspect's edit;
// the descriptor is the generator's noise-free image of that prompt with
// no context and no pose.
SimulatedUser make_user(const TargetSpec& target, const Backends& backends, const Scenario& scenario,
                        const d2p::Lexicon& lexicon = d2p::Lexicon::builtin());

// Alignment between an image and the target: kappa(descriptor, target).
double alignment(const SimulatedUser& user, const Vector& descriptor);

// Aspect the user will edit next. A pending clarification query wins when
// it asks about a target aspect; otherwise WorstAspect picks the target
// aspect whose image caption is least similar to the target's caption and
// RandomAspect draws one uniformly.
Aspect choose_aspect(const SimulatedUser& user, const Session& session, const Backends& backends,
                     std::uint64_t seed);

// The user's next message for the latest image: "accept" when the image is
// within tolerance of the target, else a template edit whose tokens are
// drawn by softmax(similarity / temperature) from the |T_a| + slack lexicon
// words nearest the target's caption. Throws NoImages.
std::string simulate_feedback(const SimulatedUser& user, const Session& session,
                              const Backends& backends, std::uint64_t seed);

}  // namespace tdri::harness
