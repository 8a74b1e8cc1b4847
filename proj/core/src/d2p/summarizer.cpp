#include "tdri/d2p/summarizer.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "detail/text.hpp"
#include "tdri/core/error.hpp"

namespace tdri::d2p {

namespace {

// Directive words stripped from both ends of a clause.
constexpr std::array<std::string_view, 36> kDirectives = {
    "make", "it",   "its",  "change", "please", "i",    "want",  "would", "like",
    "to",   "turn", "can",  "you",    "let",    "lets", "now",   "instead", "should",
    "be",   "set",  "use",  "give",   "show",   "me",   "add",   "put",   "have",
    "need", "needs", "could", "we",   "is",     "go",   "keep",  "try",   "also",
};

// Tokens that carry no aspect of their own.
constexpr std::array<std::string_view, 22> kFunctionWords = {
    "a",    "an",   "the", "of",   "with", "in",   "on",   "at",  "for",  "very", "more",
    "less", "bit",  "little", "some", "to", "into", "from", "its", "it",  "is",   "much",
};

// Higher wins.
constexpr AspectArray<int> kPrecedence = {
    /*Content*/ 3, /*Style*/ 4, /*Background*/ 6, /*Size*/ 2,
    /*Color*/ 0,   /*Perspective*/ 5, /*Others*/ 1,
};

template <std::size_t N>
bool contains(const std::array<std::string_view, N>& set, std::string_view token) {
  return std::find(set.begin(), set.end(), token) != set.end();
}

std::vector<std::vector<std::string>> split_clauses(std::string_view input) {
  std::vector<std::vector<std::string>> clauses;
  std::size_t start = 0;
  while (start <= input.size()) {
    auto end = input.find_first_of(",;.", start);
    if (end == std::string_view::npos) end = input.size();
    std::vector<std::string> current;
    for (std::string& tok : tokenize(input.substr(start, end - start))) {
      if (tok == "and") {
        clauses.push_back(std::move(current));
        current.clear();
      } else {
        current.push_back(std::move(tok));
      }
    }
    clauses.push_back(std::move(current));
    start = end + 1;
  }
  return clauses;
}

Prompt assemble(AspectArray<std::string> texts, const SummaryInput& input,
                const Embedder& embedder) {
  Prompt p;
  p.aspect_texts = std::move(texts);
  for (Aspect a : kAllAspects) p.aspect_weights[index(a)] = p.active(a) ? 1.0 : 0.0;
  p.embedding = aggregate_history(input, embedder);
  p.round = static_cast<int>(input.history.size()) + 1;
  return p;
}

}  // namespace

Vector aggregate_history(const SummaryInput& input, const Embedder& embedder) {
  if (input.latest_input.empty()) throw Error(ErrorCode::EmptyText, "latest input is empty");
  const auto& turns = input.history.turns();
  const int t = static_cast<int>(turns.size()) + 1;
  const double gamma = input.config.recency_decay;
  const double rho = input.config.response_weight_ratio;
  Vector sum = embedder.embed(input.latest_input);
  for (const DialogueTurn& turn : turns) {
    const double lambda = std::pow(gamma, t - turn.index);
    sum += lambda * embedder.embed(turn.user_input);
    if (rho > 0.0 && !tokenize(turn.system_response).empty())
      sum += rho * lambda * embedder.embed(turn.system_response);
  }
  return normalized(sum);
}

std::vector<AspectEdit> parse_edits(std::string_view input, const Lexicon& lexicon) {
  std::vector<AspectEdit> edits;
  AspectArray<std::vector<std::string>> grouped{};
  AspectArray<int> first_seen{};
  first_seen.fill(-1);
  int order = 0;
  std::vector<std::string> all_tokens;

  for (auto& clause : split_clauses(input)) {
    all_tokens.insert(all_tokens.end(), clause.begin(), clause.end());
    auto begin = clause.begin();
    auto end = clause.end();
    while (begin != end && contains(kDirectives, *begin)) ++begin;
    while (end != begin && contains(kDirectives, *(end - 1))) --end;
    if (begin == end) continue;

    std::optional<Aspect> best;
    for (auto it = begin; it != end; ++it) {
      std::optional<Aspect> a = lexicon.lookup(*it);
      if (!a && !contains(kFunctionWords, *it)) a = Aspect::Content;
      if (a && (!best || kPrecedence[index(*a)] > kPrecedence[index(*best)])) best = a;
    }
    const Aspect aspect = best.value_or(Aspect::Content);
    grouped[index(aspect)].push_back(detail::join(std::vector<std::string>(begin, end), " "));
    if (first_seen[index(aspect)] < 0) first_seen[index(aspect)] = order++;
  }

  if (order == 0) {
    if (all_tokens.empty()) throw Error(ErrorCode::EmptyText, "input carries no tokens");
    return {AspectEdit{Aspect::Content, detail::join(all_tokens, " ")}};
  }
  std::vector<Aspect> by_order;
  for (Aspect a : kAllAspects)
    if (first_seen[index(a)] >= 0) by_order.push_back(a);
  std::sort(by_order.begin(), by_order.end(),
            [&](Aspect x, Aspect y) { return first_seen[index(x)] < first_seen[index(y)]; });
  for (Aspect a : by_order) edits.push_back({a, detail::join(grouped[index(a)], ", ")});
  return edits;
}

AspectArray<std::string> merge_aspect_texts(const DialogueHistory& history,
                                            std::string_view latest_input,
                                            const Lexicon& lexicon) {
  AspectArray<std::string> merged{};
  auto apply = [&](std::string_view text) {
    for (const AspectEdit& e : parse_edits(text, lexicon)) merged[index(e.aspect)] = e.text;
  };
  for (const DialogueTurn& turn : history.turns()) apply(turn.user_input);
  apply(latest_input);
  return merged;
}

TemplateSummarizer::TemplateSummarizer(std::shared_ptr<const Embedder> embedder,
                                       std::shared_ptr<const Lexicon> lexicon)
    : embedder_(std::move(embedder)), lexicon_(std::move(lexicon)) {}

Prompt TemplateSummarizer::summarize(const SummaryInput& input) const {
  if (input.latest_input.empty()) throw Error(ErrorCode::EmptyText, "latest input is empty");
  return assemble(merge_aspect_texts(input.history, input.latest_input, *lexicon_), input,
                  *embedder_);
}

ExternalSummarizer::ExternalSummarizer(std::shared_ptr<const Embedder> embedder,
                                       std::shared_ptr<const LanguageModel> model)
    : embedder_(std::move(embedder)), model_(std::move(model)) {}

Prompt ExternalSummarizer::summarize(const SummaryInput& input) const {
  if (input.latest_input.empty()) throw Error(ErrorCode::EmptyText, "latest input is empty");
  AspectArray<std::string> texts = model_->synthesize(input.history, input.latest_input);
  const bool any = std::any_of(texts.begin(), texts.end(), [](const auto& t) { return !t.empty(); });
  if (!any) throw Error(ErrorCode::BackendUnavailable, "language model returned no aspect text");
  return assemble(std::move(texts), input, *embedder_);
}

}  // namespace tdri::d2p
