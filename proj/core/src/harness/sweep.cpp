#include "tdri/harness/sweep.hpp"

#include <fstream>
#include <sstream>

#include "detail/text.hpp"
#include "tdri/adapt/ae.hpp"
#include "tdri/core/error.hpp"
#include "tdri/core/protocol.hpp"
#include "tdri/core/rng.hpp"

namespace tdri::harness {

namespace {

// Below any reachable similarity, so earlier turns never refine.
constexpr double kHoldOff = 1e-9;
// Above any reachable similarity, so the scored turn always refines.
constexpr double kForce = 2.0;

}  // namespace

std::vector<CorpusItem> parse_corpus(std::string_view text) {
  std::vector<CorpusItem> items;
  for (std::string_view line : detail::split_lines(text)) {
    line = detail::trim(line);
    if (line.empty() || line.front() == '#') continue;
    CorpusItem item;
    std::size_t start = 0;
    while (start <= line.size()) {
      auto end = line.find('|', start);
      if (end == std::string_view::npos) end = line.size();
      const auto turn = detail::trim(line.substr(start, end - start));
      if (!turn.empty()) item.turns.emplace_back(turn);
      start = end + 1;
    }
    if (!item.turns.empty()) items.push_back(std::move(item));
  }
  if (items.empty()) throw Error(ErrorCode::EmptyCorpus, "corpus has no dialogues");
  return items;
}

std::vector<CorpusItem> load_corpus(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::EmptyCorpus, "cannot open corpus " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_corpus(buf.str());
}

std::vector<ScoredItem> score_corpus(const std::vector<CorpusItem>& corpus,
                                     const SessionConfig& config, std::uint64_t seed) {
  if (corpus.empty()) throw Error(ErrorCode::EmptyCorpus, "corpus has no dialogues");
  const Backends backends = make_toy_backends(config);
  const Protocol protocol(backends);
  std::vector<ScoredItem> out;
  out.reserve(corpus.size());
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const CorpusItem& item = corpus[i];
    if (item.turns.empty()) throw Error(ErrorCode::EmptyCorpus, "corpus item without turns");
    SessionConfig cfg = config;
    cfg.rng_seed = static_cast<std::int64_t>(derive_seed(seed, i) >> 1);
    cfg.ae_threshold = kHoldOff;
    Session s = make_session("corpus-" + std::to_string(i), cfg);
    for (std::size_t t = 0; t + 1 < item.turns.size(); ++t) {
      s = protocol.advance(s, UserMessage{item.turns[t]});
      s = protocol.advance(s, Continue{});
    }
    const Prompt prompt = backends.summarizer->summarize({s.history, item.turns.back(), cfg});
    const genbridge::GeneratorRequest request{prompt, s.pose_constraint, s.context, s.rng.next()};
    const ImageArtifact image = backends.generator->generate(request);
    const AEOutcome ae = adapt::ae_refine(prompt, image, request, *backends.generator,
                                          *backends.embedder, {kForce, config.toy.ae_step});
    out.push_back({ae.sim, ae.refined_sim.value_or(ae.sim)});
  }
  return out;
}

std::vector<ThresholdRow> sweep_thresholds(const std::vector<double>& k_values,
                                           const std::vector<ScoredItem>& scored) {
  if (scored.empty()) throw Error(ErrorCode::EmptyCorpus, "corpus has no scored items");
  std::vector<ThresholdRow> rows;
  for (double k : k_values) {
    if (!(k > 0.0 && k < 1.0)) throw Error(ErrorCode::InvalidConfig, "k must lie in (0,1)", "ae_threshold");
    ThresholdRow row{k, 0.0, 0.0};
    std::size_t triggered = 0;
    for (const ScoredItem& s : scored) {
      const bool fire = s.sim < k;
      triggered += fire ? 1 : 0;
      row.mean_final_sim += fire ? s.refined_sim : s.sim;
    }
    row.trigger_frequency = static_cast<double>(triggered) / static_cast<double>(scored.size());
    row.mean_final_sim /= static_cast<double>(scored.size());
    rows.push_back(row);
  }
  return rows;
}

std::vector<ThresholdRow> sweep_thresholds(const std::vector<double>& k_values,
                                           const std::vector<CorpusItem>& corpus,
                                           const SessionConfig& config, std::uint64_t seed) {
  return sweep_thresholds(k_values, score_corpus(corpus, config, seed));
}

void write_thresholds(const std::vector<ThresholdRow>& rows, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::ofstream out(dir / "thresholds.csv", std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::EmptyCorpus, "cannot write " + (dir / "thresholds.csv").string());
  out << "k,trigger_frequency,mean_final_sim\n";
  char line[128];
  for (const ThresholdRow& r : rows) {
    std::snprintf(line, sizeof line, "%.4f,%.6f,%.6f\n", r.k, r.trigger_frequency, r.mean_final_sim);
    out << line;
  }
}

}  // namespace tdri::harness
