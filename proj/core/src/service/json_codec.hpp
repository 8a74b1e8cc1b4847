#pragma once

// JSON forms of the domain types, shared by the snapshot codec and the HTTP
// layer. Readers throw nlohmann::json::exception or tdri::Error on bad input;
// callers translate those into their own error codes.

#include <json.hpp>

#include "tdri/core/session.hpp"

namespace tdri::service::json_io {

using nlohmann::json;

json write(const Vector& v);
Vector read_vector(const json& j);

json write(const Matrix& m);
Matrix read_matrix(const json& j);

json write(const SessionConfig& c);
SessionConfig read_config(const json& j);

json write(const Prompt& p);
Prompt read_prompt(const json& j);

json write(const ImageArtifact& img);
ImageArtifact read_image(const json& j);

json write(const Pose& p);
Pose read_pose(const json& j);

json write(const AspectCaptionSet& c);
AspectCaptionSet read_captions(const json& j);

json write(const AmbiguityReport& r);
AmbiguityReport read_report(const json& j);

json write(const ClarificationQuery& q);
ClarificationQuery read_query(const json& j);

json write(const PreferencePair& p);
PreferencePair read_pair(const json& j);

json write(const Session& s);
Session read_session(const json& j);

}  // namespace tdri::service::json_io
