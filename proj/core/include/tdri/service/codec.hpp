#pragma once

#include <string>
#include <string_view>

#include "tdri/core/session.hpp"

namespace tdri::service {

inline constexpr int kSchemaVersion = 1;

struct SessionSnapshot {
  int schema_version = kSchemaVersion;
  Session session;
  std::string saved_at;

  friend bool operator==(const SessionSnapshot&, const SessionSnapshot&) = default;
};

// Doubles are written in shortest round-trip form, so decode(encode(s)) == s.
std::string encode_snapshot(const SessionSnapshot& snapshot);

// Throws SchemaMismatch for an unsupported schema_version and
// CorruptSnapshot for anything that does not parse into a session.
SessionSnapshot decode_snapshot(std::string_view text);

// One preference-log line (no trailing newline):
// {session_id, round, state_embedding, winner_id, winner_descriptor,
//  loser_id, loser_descriptor, timestamp}
std::string encode_pair_line(const PreferencePair& pair);
PreferencePair decode_pair_line(std::string_view line);

// The session as served by GET /sessions/{id}.
std::string encode_session(const Session& session);

}  // namespace tdri::service
