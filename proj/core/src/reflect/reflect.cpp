#include "tdri/reflect/reflect.hpp"

#include <algorithm>
#include <fstream>
#include <random>
#include <sstream>

#include "detail/builtin_data.hpp"
#include "detail/text.hpp"
#include "tdri/core/error.hpp"
#include "tdri/core/rng.hpp"

namespace tdri {

void validate(const AspectCaptionSet& captions) {
  for (Aspect a : kAllAspects) {
    const AspectCaption& c = captions[a];
    if (c.aspect != a)
      throw Error(ErrorCode::BackendUnavailable,
                  "caption slot " + std::string(to_string(a)) + " holds another aspect");
    if (c.embedding.size() == 0 || !is_unit(c.embedding))
      throw Error(ErrorCode::BackendUnavailable,
                  "caption embedding for " + std::string(to_string(a)) + " is not unit norm");
    if (c.similarity && !(*c.similarity >= 0.0 && *c.similarity <= 1.0))
      throw Error(ErrorCode::BackendUnavailable, "caption similarity outside [0,1]");
  }
}

}  // namespace tdri

namespace tdri::reflect {

namespace {
constexpr std::string_view kPlaceholder = "{caption}";
}

double pair_similarity(const Vector& a, const Vector& b) {
  return std::clamp((1.0 + cosine(a, b)) / 2.0, 0.0, 1.0);
}

AmbiguityReport consistency(const AspectArray<std::optional<double>>& kappa,
                            const AspectArray<double>& importance, double tau) {
  AmbiguityReport report;
  report.per_aspect_similarity = kappa;
  double num = 0.0;
  double den = 0.0;
  std::vector<Aspect> active;
  for (Aspect a : kAllAspects) {
    const auto& k = kappa[index(a)];
    if (!k) continue;
    active.push_back(a);
    num += importance[index(a)] * *k;
    den += importance[index(a)];
  }
  if (active.empty()) throw Error(ErrorCode::NoActiveAspects, "no aspect has prompt text");
  report.sigma = std::clamp(num / den, 0.0, 1.0);
  report.ambiguity_score = 1.0 - report.sigma;
  report.triggered = report.ambiguity_score > tau;

  std::stable_sort(active.begin(), active.end(),
                   [&](Aspect x, Aspect y) { return *kappa[index(x)] < *kappa[index(y)]; });
  active.resize(std::min(active.size(), kCandidateCount));
  report.candidate_aspects = std::move(active);
  return report;
}

AspectArray<std::optional<double>> aspect_similarities(const Prompt& prompt,
                                                       const AspectCaptionSet& captions,
                                                       const d2p::Embedder& embedder) {
  AspectArray<std::optional<double>> kappa{};
  for (Aspect a : kAllAspects)
    if (prompt.active(a))
      kappa[index(a)] =
          pair_similarity(embedder.embed(prompt.aspect_texts[index(a)]), captions[a].embedding);
  return kappa;
}

AmbiguityReport consistency(const Prompt& prompt, const AspectCaptionSet& captions,
                            const d2p::Embedder& embedder, const SessionConfig& config) {
  return consistency(aspect_similarities(prompt, captions, embedder), config.aspect_importance,
                     config.ambiguity_threshold);
}

Aspect select_aspect(const AmbiguityReport& report, std::uint64_t seed) {
  if (!report.triggered || report.candidate_aspects.empty())
    throw Error(ErrorCode::NotTriggered, "ambiguity report is not triggered");
  auto engine = make_engine(seed);
  std::uniform_int_distribution<std::size_t> pick(0, report.candidate_aspects.size() - 1);
  return report.candidate_aspects[pick(engine)];
}

ClarificationTemplates ClarificationTemplates::parse(std::string_view tsv) {
  ClarificationTemplates out;
  int line_no = 0;
  for (std::string_view line : detail::split_lines(tsv)) {
    ++line_no;
    line = detail::trim(line);
    if (line.empty()) continue;
    if (line.front() == '#') {
      auto body = detail::trim(line.substr(1));
      constexpr std::string_view kVersion = "version:";
      if (body.substr(0, kVersion.size()) == kVersion)
        out.version_ = std::string(detail::trim(body.substr(kVersion.size())));
      continue;
    }
    const std::string where = "template line " + std::to_string(line_no);
    const auto tab = line.find('\t');
    if (tab == std::string_view::npos)
      throw Error(ErrorCode::BadLexicon, where + ": expected Aspect<TAB>template");
    const auto aspect = parse_aspect(detail::trim(line.substr(0, tab)));
    if (!aspect) throw Error(ErrorCode::BadLexicon, where + ": unknown aspect");
    const auto text = detail::trim(line.substr(tab + 1));
    if (text.find(kPlaceholder) == std::string_view::npos)
      throw Error(ErrorCode::BadLexicon, where + ": template lacks {caption}");
    if (!out.templates_[index(*aspect)].empty())
      throw Error(ErrorCode::BadLexicon, where + ": duplicate aspect");
    out.templates_[index(*aspect)] = std::string(text);
  }
  for (Aspect a : kAllAspects)
    if (out.templates_[index(a)].empty())
      throw Error(ErrorCode::BadLexicon,
                  "no clarification template for " + std::string(to_string(a)));
  return out;
}

ClarificationTemplates ClarificationTemplates::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::BadLexicon, "cannot open templates " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

const ClarificationTemplates& ClarificationTemplates::builtin() {
  static const ClarificationTemplates t = parse(tdri::detail::kBuiltinClarifyTemplates);
  return t;
}

std::string ClarificationTemplates::render(Aspect a, std::string_view caption) const {
  std::string text = templates_[index(a)];
  for (auto pos = text.find(kPlaceholder); pos != std::string::npos;
       pos = text.find(kPlaceholder, pos + caption.size()))
    text.replace(pos, kPlaceholder.size(), caption);
  return text;
}

ClarificationQuery build_query(const Prompt& prompt, const AspectCaptionSet& captions,
                               const AmbiguityReport& report,
                               const ClarificationTemplates& templates) {
  if (!report.triggered || !report.selected_aspect)
    throw Error(ErrorCode::NotTriggered, "no triggered aspect to ask about");
  const Aspect a = *report.selected_aspect;
  return ClarificationQuery{a, templates.render(a, captions[a].text), prompt.round};
}

}  // namespace tdri::reflect
