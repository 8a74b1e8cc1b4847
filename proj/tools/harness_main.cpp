// tdri-harness: simulated-user batches and A&E threshold sweeps.
//
//   tdri-harness run --scenario F --rounds R --seeds a,b,c --out DIR
//   tdri-harness sweep --k 0.80,0.75,0.70 --corpus F --out DIR

#include <cstdint>
#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tdri/core/error.hpp"
#include "tdri/harness/batch.hpp"
#include "tdri/harness/sweep.hpp"

namespace {

// "3,5,10-12" -> 3 5 10 11 12
std::vector<std::uint64_t> parse_seeds(const std::vector<std::string>& parts) {
  std::vector<std::uint64_t> seeds;
  for (const std::string& p : parts) {
    const auto dash = p.find('-');
    if (dash == std::string::npos) {
      seeds.push_back(std::stoull(p));
      continue;
    }
    const std::uint64_t lo = std::stoull(p.substr(0, dash));
    const std::uint64_t hi = std::stoull(p.substr(dash + 1));
    for (std::uint64_t s = lo; s <= hi; ++s) seeds.push_back(s);
  }
  return seeds;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Simulated-user batch runner"};
  app.require_subcommand(1);

  std::string scenario_path;
  std::string out_dir = "out";
  int rounds = 4;
  int threads = 0;
  std::vector<std::string> seed_parts{"0-199"};
  auto* run = app.add_subcommand("run", "Run simulated sessions");
  run->add_option("--scenario", scenario_path, "Scenario JSON")->required();
  run->add_option("--rounds", rounds, "Rounds per session");
  run->add_option("--seeds", seed_parts, "Seeds, e.g. 1,2,3 or 0-199")->delimiter(',');
  run->add_option("--out", out_dir, "Output directory");
  run->add_option("--threads", threads, "Worker threads (0 = all cores)");

  std::string corpus_path;
  std::vector<double> ks{0.80, 0.75, 0.73, 0.70, 0.68, 0.66};
  std::uint64_t corpus_seed = 0;
  std::vector<std::string> sets;
  auto* sweep = app.add_subcommand("sweep", "Sweep the A&E threshold over a corpus");
  sweep->add_option("--k", ks, "Thresholds")->delimiter(',');
  sweep->add_option("--corpus", corpus_path, "Corpus file")->required();
  sweep->add_option("--out", out_dir, "Output directory");
  sweep->add_option("--seed", corpus_seed, "Generation seed");
  sweep->add_option("--set", sets, "Config override key=value (repeatable)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      const auto scenario = tdri::harness::load_scenario(scenario_path);
      const auto report = tdri::harness::run_batch(scenario, rounds, parse_seeds(seed_parts), {threads});
      tdri::harness::write_report(report, out_dir);
      std::printf("%-6s %-9s %-10s %-10s %-8s %-8s\n", "round", "sessions", "mean", "std", "ae", "clarify");
      for (const auto& r : report.rows)
        std::printf("%-6d %-9d %-10.5f %-10.5f %-8.3f %-8.3f\n", r.round, r.sessions, r.mean_alignment,
                    r.std_alignment, r.ae_trigger_rate, r.clarification_rate);
      std::printf("nondecreasing transitions: %.4f, failures: %zu\n",
                  tdri::harness::nondecreasing_fraction(report), report.failures.size());
      return report.failures.empty() ? 0 : 2;
    }
    tdri::SessionConfig config;
    for (const std::string& kv : sets) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) throw tdri::Error(tdri::ErrorCode::InvalidConfig, "expected key=value: " + kv);
      tdri::set_field(config, kv.substr(0, eq), kv.substr(eq + 1));
    }
    tdri::validate(config);
    const auto corpus = tdri::harness::load_corpus(corpus_path);
    const auto rows = tdri::harness::sweep_thresholds(ks, corpus, config, corpus_seed);
    tdri::harness::write_thresholds(rows, out_dir);
    std::printf("%-8s %-10s %-10s\n", "k", "frequency", "final_sim");
    for (const auto& r : rows) std::printf("%-8.3f %-10.4f %-10.5f\n", r.k, r.trigger_frequency, r.mean_final_sim);
    return 0;
  } catch (const tdri::Error& e) {
    std::cerr << "error [" << tdri::to_string(e.code()) << "]: " << e.what() << "\n";
    return 1;
  }
}
