#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "tdri/core/config.hpp"
#include "tdri/core/types.hpp"
#include "tdri/d2p/embedder.hpp"
#include "tdri/d2p/lexicon.hpp"

namespace tdri::d2p {

struct SummaryInput {
  DialogueHistory history;
  std::string latest_input;
  SessionConfig config;
};

// Sum over prior turns of gamma^(t-i) * (phi(w_i) + rho * psi(r_i)) plus
// phi(w_t), renormalized. Turns with an empty response contribute only their
// input term.
Vector aggregate_history(const SummaryInput& input, const Embedder& embedder);

struct AspectEdit {
  Aspect aspect = Aspect::Content;
  std::string text;

  friend bool operator==(const AspectEdit&, const AspectEdit&) = default;
};

// Rule-based parse of one user input into aspect-tagged edits.
//  - The input splits into clauses at ',', ';', '.', and the word "and".
//  - Leading and trailing directive words ("make", "it", "please", ...) are
//    dropped from each clause.
//  - A clause's aspect is the highest-precedence aspect among its tokens,
//    precedence Background > Perspective > Style > Content > Size > Others >
//    Color. Tokens missing from the lexicon count as Content unless they are
//    function words ("a", "with", "more", ...).
//  - Clauses with the same aspect in one input are joined with ", ".
std::vector<AspectEdit> parse_edits(std::string_view input, const Lexicon& lexicon);

// Folds every turn's edits plus the latest input's edits into one map,
// later edits to an aspect replacing earlier ones.
AspectArray<std::string> merge_aspect_texts(const DialogueHistory& history,
                                            std::string_view latest_input,
                                            const Lexicon& lexicon);

// Implementations return a Prompt whose embedding is
// aggregate_history(input), whose weights are 1 on every aspect with text,
// and whose round is history.size() + 1.
class Summarizer {
 public:
  virtual ~Summarizer() = default;
  virtual Prompt summarize(const SummaryInput& input) const = 0;
  virtual std::string name() const = 0;
};

class TemplateSummarizer final : public Summarizer {
 public:
  TemplateSummarizer(std::shared_ptr<const Embedder> embedder,
                     std::shared_ptr<const Lexicon> lexicon);

  Prompt summarize(const SummaryInput& input) const override;
  std::string name() const override { return "template"; }

 private:
  std::shared_ptr<const Embedder> embedder_;
  std::shared_ptr<const Lexicon> lexicon_;
};

// Text synthesis delegated to a language model; embedding still local.
class LanguageModel {
 public:
  virtual ~LanguageModel() = default;
  // Throws BackendUnavailable on transport or protocol failure.
  virtual AspectArray<std::string> synthesize(const DialogueHistory& history,
                                              std::string_view latest_input) const = 0;
};

class ExternalSummarizer final : public Summarizer {
 public:
  ExternalSummarizer(std::shared_ptr<const Embedder> embedder,
                     std::shared_ptr<const LanguageModel> model);

  Prompt summarize(const SummaryInput& input) const override;
  std::string name() const override { return "external"; }

 private:
  std::shared_ptr<const Embedder> embedder_;
  std::shared_ptr<const LanguageModel> model_;
};

}  // namespace tdri::d2p
