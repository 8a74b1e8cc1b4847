#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "tdri/core/protocol.hpp"
#include "tdri/harness/scenario.hpp"

namespace tdri::harness {

struct RoundRow {
  int round = 0;
  int sessions = 0;  // sessions that reached this round
  double mean_alignment = 0.0;
  double std_alignment = 0.0;
  double ae_trigger_rate = 0.0;
  double clarification_rate = 0.0;
  int clarifications = 0;
};

struct SessionFailure {
  std::uint64_t seed = 0;
  int round = 0;
  std::string code;
  std::string message;
};

struct SessionTrace {
  std::uint64_t seed = 0;
  std::vector<double> alignment;  // one per completed round
  std::vector<std::string> messages;
  std::vector<bool> ae_applied;
  std::vector<bool> clarified;
  bool accepted = false;
  std::optional<SessionFailure> failure;
};

struct RunReport {
  std::string scenario;
  int rounds = 0;
  std::vector<RoundRow> rows;  // exactly `rounds` rows
  std::vector<SessionTrace> sessions;
  std::vector<SessionFailure> failures;
};

struct BatchOptions {
  int threads = 0;  // 0: hardware concurrency
};

// One simulated session per seed, run up to `rounds` rounds (or the
// scenario's patience, or acceptance). Session failures are caught and
// listed; they never abort the batch. Throws BadScenario for rounds < 1 or
// an empty seed list.
RunReport run_batch(const Scenario& scenario, int rounds, const std::vector<std::uint64_t>& seeds,
                    const BatchOptions& options = {});

// A failure ends the trace early and is stored in it.
SessionTrace run_session(const Scenario& scenario, const Backends& backends, int rounds,
                         std::size_t session_index, std::uint64_t seed);

// report.json and rounds.csv.
void write_report(const RunReport& report, const std::filesystem::path& dir);

// Fraction of round-over-round transitions, across all sessions, whose
// alignment did not drop.
double nondecreasing_fraction(const RunReport& report);

}  // namespace tdri::harness
