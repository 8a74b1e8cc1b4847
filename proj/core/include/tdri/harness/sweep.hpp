#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "tdri/core/config.hpp"

namespace tdri::harness {

// One corpus entry: the user messages of a dialogue, last one scored.
struct CorpusItem {
  std::vector<std::string> turns;
};

// Text corpus: one dialogue per line, turns separated by " | ", '#'
// comments and blank lines skipped. Throws EmptyCorpus when no item remains.
std::vector<CorpusItem> parse_corpus(std::string_view text);
std::vector<CorpusItem> load_corpus(const std::filesystem::path& path);

// Sim of the last turn's image before and after one forced A&E step.
// Earlier turns run through the protocol with A&E held off.
struct ScoredItem {
  double sim = 0.0;
  double refined_sim = 0.0;
};

std::vector<ScoredItem> score_corpus(const std::vector<CorpusItem>& corpus,
                                     const SessionConfig& config, std::uint64_t seed = 0);

struct ThresholdRow {
  double k = 0.0;
  double trigger_frequency = 0.0;  // fraction of items with sim < k
  double mean_final_sim = 0.0;     // refined sim where triggered, else sim
};

// Throws EmptyCorpus, InvalidConfig (k outside (0,1)).
std::vector<ThresholdRow> sweep_thresholds(const std::vector<double>& k_values,
                                           const std::vector<ScoredItem>& scored);

std::vector<ThresholdRow> sweep_thresholds(const std::vector<double>& k_values,
                                           const std::vector<CorpusItem>& corpus,
                                           const SessionConfig& config, std::uint64_t seed = 0);

// thresholds.csv with header k,trigger_frequency,mean_final_sim.
void write_thresholds(const std::vector<ThresholdRow>& rows, const std::filesystem::path& dir);

}  // namespace tdri::harness
