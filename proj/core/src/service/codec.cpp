#include "tdri/service/codec.hpp"

#include "service/json_codec.hpp"
#include "tdri/core/error.hpp"

namespace tdri::service {

using json_io::json;

std::string encode_snapshot(const SessionSnapshot& snapshot) {
  const json j = {{"schema_version", snapshot.schema_version},
                  {"saved_at", snapshot.saved_at},
                  {"session", json_io::write(snapshot.session)}};
  return j.dump(2) + "\n";
}

SessionSnapshot decode_snapshot(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::CorruptSnapshot, std::string("snapshot does not parse: ") + e.what());
  }
  if (!j.is_object() || !j.contains("schema_version") || !j.at("schema_version").is_number_integer())
    throw Error(ErrorCode::CorruptSnapshot, "snapshot lacks an integer schema_version");
  const int version = j.at("schema_version").get<int>();
  if (version != kSchemaVersion)
    throw Error(ErrorCode::SchemaMismatch, "snapshot schema_version " + std::to_string(version) +
                                               " is not supported (expected " +
                                               std::to_string(kSchemaVersion) + ")",
                "schema_version");
  try {
    SessionSnapshot s;
    s.schema_version = version;
    s.saved_at = j.at("saved_at").get<std::string>();
    s.session = json_io::read_session(j.at("session"));
    check_invariants(s.session);
    return s;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::CorruptSnapshot, std::string("snapshot is malformed: ") + e.what());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::CorruptSnapshot) throw;
    throw Error(ErrorCode::CorruptSnapshot, std::string("snapshot is inconsistent: ") + e.what());
  }
}

std::string encode_pair_line(const PreferencePair& pair) { return json_io::write(pair).dump(); }

PreferencePair decode_pair_line(std::string_view line) {
  try {
    return json_io::read_pair(json::parse(line));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::CorruptSnapshot, std::string("bad preference line: ") + e.what());
  }
}

std::string encode_session(const Session& session) { return json_io::write(session).dump(); }

}  // namespace tdri::service
