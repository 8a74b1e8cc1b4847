#include "tdri/harness/batch.hpp"

#include <atomic>
#include <cmath>
#include <fstream>
#include <thread>

#include <json.hpp>

#include "tdri/core/error.hpp"
#include "tdri/core/rng.hpp"
#include "tdri/harness/simulated_user.hpp"

namespace tdri::harness {

namespace {

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::BadScenario, "cannot write " + path.string());
  out << text;
}

}  // namespace

SessionTrace run_session(const Scenario& scenario, const Backends& backends, int rounds,
                         std::size_t session_index, std::uint64_t seed) {
  SessionTrace trace;
  trace.seed = seed;
  int round = 0;
  try {
    SessionConfig config = scenario.config;
    config.rng_seed = static_cast<std::int64_t>(seed);
    const Protocol protocol(backends);
    const SimulatedUser user =
        make_user(target_for(scenario, d2p::Lexicon::builtin(), session_index, seed), backends, scenario);
    Session session = make_session("sim-" + std::to_string(seed), config);

    const int limit = std::min(rounds, scenario.patience);
    for (round = 1; round <= limit; ++round) {
      const std::string text = round == 1
                                   ? user.target.opening
                                   : simulate_feedback(user, session, backends,
                                                       derive_seed(seed, static_cast<std::uint64_t>(round)));
      trace.messages.push_back(text);
      if (text == kAcceptSentinel) {
        session = protocol.advance(session, UserAccept{});
        trace.accepted = true;
        break;
      }
      session = protocol.advance(session, UserMessage{text});
      session = protocol.advance(session, Continue{});
      trace.alignment.push_back(alignment(user, session.images.back().descriptor));
      trace.ae_applied.push_back(session.ae_records.back().applied);
      trace.clarified.push_back(session.phase == Phase::Clarifying);
    }
  } catch (const Error& e) {
    trace.failure = SessionFailure{seed, round, std::string(to_string(e.code())), e.what()};
  }
  return trace;
}

RunReport run_batch(const Scenario& scenario, int rounds, const std::vector<std::uint64_t>& seeds,
                    const BatchOptions& options) {
  if (rounds < 1) throw Error(ErrorCode::BadScenario, "rounds must be at least 1", "rounds");
  if (seeds.empty()) throw Error(ErrorCode::BadScenario, "no seeds given", "seeds");

  const Backends backends = make_toy_backends(scenario.config);
  std::vector<SessionTrace> traces(seeds.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < seeds.size(); i = next++)
      traces[i] = run_session(scenario, backends, rounds, i, seeds[i]);
  };
  unsigned threads = options.threads > 0 ? static_cast<unsigned>(options.threads)
                                         : std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(seeds.size()));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  RunReport report;
  report.scenario = scenario.name;
  report.rounds = rounds;
  for (int r = 1; r <= rounds; ++r) {
    RoundRow row;
    row.round = r;
    double sum = 0.0;
    double sq = 0.0;
    int ae = 0;
    for (const SessionTrace& t : traces) {
      if (static_cast<int>(t.alignment.size()) < r) continue;
      const double a = t.alignment[r - 1];
      ++row.sessions;
      sum += a;
      sq += a * a;
      ae += t.ae_applied[r - 1] ? 1 : 0;
      row.clarifications += t.clarified[r - 1] ? 1 : 0;
    }
    if (row.sessions > 0) {
      const double n = row.sessions;
      row.mean_alignment = sum / n;
      row.std_alignment = std::sqrt(std::max(0.0, sq / n - row.mean_alignment * row.mean_alignment));
      row.ae_trigger_rate = ae / n;
      row.clarification_rate = row.clarifications / n;
    }
    report.rows.push_back(row);
  }
  for (const SessionTrace& t : traces)
    if (t.failure) report.failures.push_back(*t.failure);
  report.sessions = std::move(traces);
  return report;
}

double nondecreasing_fraction(const RunReport& report) {
  std::size_t good = 0;
  std::size_t total = 0;
  for (const SessionTrace& t : report.sessions)
    for (std::size_t i = 1; i < t.alignment.size(); ++i) {
      ++total;
      if (t.alignment[i] >= t.alignment[i - 1]) ++good;
    }
  return total == 0 ? 1.0 : static_cast<double>(good) / static_cast<double>(total);
}

void write_report(const RunReport& report, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  nlohmann::ordered_json j;
  j["scenario"] = report.scenario;
  j["rounds"] = report.rounds;
  j["rows"] = nlohmann::ordered_json::array();
  for (const RoundRow& r : report.rows)
    j["rows"].push_back({{"round", r.round},
                         {"sessions", r.sessions},
                         {"mean_alignment", r.mean_alignment},
                         {"std_alignment", r.std_alignment},
                         {"ae_trigger_rate", r.ae_trigger_rate},
                         {"clarification_rate", r.clarification_rate},
                         {"clarifications", r.clarifications}});
  j["failures"] = nlohmann::ordered_json::array();
  for (const SessionFailure& f : report.failures)
    j["failures"].push_back(
        {{"seed", f.seed}, {"round", f.round}, {"code", f.code}, {"message", f.message}});
  j["sessions"] = nlohmann::ordered_json::array();
  for (const SessionTrace& t : report.sessions)
    j["sessions"].push_back({{"seed", t.seed},
                             {"alignment", t.alignment},
                             {"messages", t.messages},
                             {"accepted", t.accepted}});
  write_file(dir / "report.json", j.dump(2) + "\n");

  std::string csv = "round,sessions,mean_alignment,std_alignment,ae_trigger_rate,clarification_rate\n";
  char line[256];
  for (const RoundRow& r : report.rows) {
    std::snprintf(line, sizeof line, "%d,%d,%.6f,%.6f,%.4f,%.4f\n", r.round, r.sessions,
                  r.mean_alignment, r.std_alignment, r.ae_trigger_rate, r.clarification_rate);
    csv += line;
  }
  write_file(dir / "rounds.csv", csv);
}

}  // namespace tdri::harness
