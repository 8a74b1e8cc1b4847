#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>

#include "tdri/core/protocol.hpp"
#include "tdri/service/settings.hpp"

namespace tdri::service {

struct RoundResult {
  std::string session_id;
  int round = 0;
  Phase phase = Phase::Created;
  ImageArtifact image;
  AmbiguityReport ambiguity_report;
  std::optional<ClarificationQuery> clarification_query;
  std::string response;  // the system turn shown to the user
  bool ae_applied = false;
};

struct VoteResult {
  std::size_t pair_count = 0;
  std::int64_t policy_version = 1;
  bool policy_updated = false;
};

using Clock = std::function<std::string()>;     // ISO-8601 UTC timestamps
using IdSource = std::function<std::string()>;  // candidate session ids
using BackendFactory = std::function<Backends(const SessionConfig&)>;

std::string utc_now();
IdSource random_ids();

// Toy backends, cached per (embedding_dim, toy constants).
BackendFactory toy_backend_factory();

// Remote generator, captioner and embedder behind `endpoint`; pose
// estimation stays in-process. The summarizer is the template one unless
// `external_summarizer` is set.
BackendFactory remote_backend_factory(std::string base_url, std::chrono::milliseconds timeout,
                                      std::string bearer_token, bool external_summarizer);

struct EngineOptions {
  std::filesystem::path data_dir;  // empty: memory only
  PolicyScope policy_scope = PolicyScope::Session;
  SessionConfig defaults;
  Clock clock = utc_now;
  IdSource ids = random_ids();
  BackendFactory backends = toy_backend_factory();
};

EngineOptions engine_options(const ServerSettings& settings);

// Session registry. Every mutation runs on a private copy and replaces the
// stored session only after the whole step (and its snapshot write)
// succeeded. Mutations on one session are serialized; readers never block on
// a running mutation and see the last committed state.
//
// On disk: <data_dir>/sessions/<id>.json (one snapshot per session) and
// <data_dir>/preferences.jsonl (one line per vote, append-only).
class Engine {
 public:
  explicit Engine(EngineOptions options);
  ~Engine();
  Engine(const Engine&) = delete;
  Engine& operator=(const Engine&) = delete;

  // Overrides use the config key names. Throws InvalidConfig.
  std::string create_session(const KeyValues& overrides = {});

  // One full round: UserMessage then Continue. Throws UnknownSession,
  // IllegalTransition, SessionCompleted, BackendUnavailable, EmptyText.
  RoundResult submit_message(const std::string& session_id, const std::string& text);

  Session accept(const std::string& session_id);

  // Throws UnknownSession, UnknownImage, SelfPair.
  VoteResult vote(const std::string& session_id, const std::string& winner_id,
                  const std::string& loser_id);

  // Last committed state. Throws UnknownSession.
  Session get(const std::string& session_id) const;
  ImageArtifact image(const std::string& session_id, const std::string& image_id) const;

  // Writes the snapshot and returns its path. Throws UnknownSession, and
  // InvalidConfig when the engine has no data directory.
  std::filesystem::path save_snapshot(const std::string& session_id);

  // Registers (or replaces) the session found in the file and returns it.
  // Throws SchemaMismatch, CorruptSnapshot.
  Session load_snapshot(const std::filesystem::path& path);

  std::size_t session_count() const;
  const EngineOptions& options() const noexcept;

  // The policy votes feed under PolicyScope::Shared.
  std::optional<PolicyParams> shared_policy(int embedding_dim) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace tdri::service
