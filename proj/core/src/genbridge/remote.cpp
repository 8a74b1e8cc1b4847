#include "tdri/genbridge/remote.hpp"

#include <cmath>

#include <httplib.h>
#include <json.hpp>

#include "detail/base64.hpp"
#include "tdri/core/error.hpp"

namespace tdri::genbridge {

namespace {

using nlohmann::json;

[[noreturn]] void unavailable(const std::string& what) {
  throw Error(ErrorCode::BackendUnavailable, "remote backend: " + what);
}

json post_json(const Endpoint& ep, const std::string& path, const json& body) {
  const auto scheme = ep.base_url.find("://");
  const auto slash = ep.base_url.find('/', scheme == std::string::npos ? 0 : scheme + 3);
  const std::string host = ep.base_url.substr(0, slash);
  std::string prefix = slash == std::string::npos ? "" : ep.base_url.substr(slash);
  while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();

  httplib::Client cli(host);
  if (!cli.is_valid()) unavailable("unsupported URL " + ep.base_url);
  const auto secs = std::chrono::duration_cast<std::chrono::seconds>(ep.timeout);
  const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(ep.timeout - secs);
  cli.set_connection_timeout(secs.count(), usecs.count());
  cli.set_read_timeout(secs.count(), usecs.count());
  cli.set_write_timeout(secs.count(), usecs.count());
  httplib::Headers headers;
  if (!ep.bearer_token.empty()) headers.emplace("Authorization", "Bearer " + ep.bearer_token);

  auto res = cli.Post(prefix + path, headers, body.dump(), "application/json");
  if (!res) unavailable(path + " failed: " + httplib::to_string(res.error()));
  if (res->status != 200) unavailable(path + " returned HTTP " + std::to_string(res->status));
  try {
    return json::parse(res->body);
  } catch (const json::parse_error&) {
    unavailable(path + " returned malformed JSON");
  }
}

Vector read_vector(const json& j, Eigen::Index dim, const char* what) {
  if (!j.is_array() || static_cast<Eigen::Index>(j.size()) != dim)
    unavailable(std::string(what) + " must be an array of " + std::to_string(dim) + " numbers");
  Vector v(dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    const json& x = j[static_cast<std::size_t>(i)];
    if (!x.is_number()) unavailable(std::string(what) + " holds a non-number");
    v[i] = x.get<double>();
    if (!std::isfinite(v[i])) unavailable(std::string(what) + " holds a non-finite value");
  }
  if (v.norm() == 0.0) unavailable(std::string(what) + " is the zero vector");
  return v.normalized();
}

std::vector<double> to_list(const Vector& v) { return {v.data(), v.data() + v.size()}; }

}  // namespace

RemoteGenerator::RemoteGenerator(Endpoint endpoint, Eigen::Index dim)
    : endpoint_(std::move(endpoint)), dim_(dim) {}

ImageArtifact RemoteGenerator::generate(const GeneratorRequest& request) const {
  validate(request.prompt);
  json texts = json::object();
  json weights = json::object();
  for (Aspect a : kAllAspects) {
    texts[std::string(to_string(a))] = request.prompt.aspect_texts[index(a)];
    weights[std::string(to_string(a))] = request.prompt.aspect_weights[index(a)];
  }
  json pose = nullptr;
  if (request.pose_constraint) {
    pose = json::array();
    for (const Keypoint& kp : request.pose_constraint->keypoints) pose.push_back({kp.x, kp.y});
  }
  const json body = {{"prompt", {{"aspect_texts", texts}, {"aspect_weights", weights}}},
                     {"pose", pose},
                     {"seed", request.seed}};
  const json res = post_json(endpoint_, "/generate", body);
  if (!res.is_object() || !res.contains("descriptor")) unavailable("/generate response lacks a descriptor");

  ImageArtifact image;
  image.descriptor = read_vector(res.at("descriptor"), dim_, "descriptor");
  if (res.contains("render") && res.at("render").is_object()) {
    const json& r = res.at("render");
    if (!r.contains("data") || !r.at("data").is_string()) unavailable("render lacks base64 data");
    auto bytes = detail::base64_decode(r.at("data").get<std::string>());
    if (!bytes) unavailable("render data is not valid base64");
    image.render = RenderPayload{std::move(*bytes), r.value("media_type", "application/octet-stream")};
  }
  image.provenance = Provenance{request.prompt.round, name(), request.seed};
  return image;
}

RemoteCaptioner::RemoteCaptioner(Endpoint endpoint, Eigen::Index dim)
    : endpoint_(std::move(endpoint)), dim_(dim) {}

AspectCaptionSet RemoteCaptioner::extract(const ImageArtifact& image) const {
  json body = {{"descriptor", to_list(image.descriptor)}, {"render", nullptr}};
  if (image.render)
    body["render"] = {{"data", detail::base64_encode(image.render->bytes)},
                      {"media_type", image.render->media_type}};
  const json res = post_json(endpoint_, "/caption", body);
  if (!res.is_object() || !res.contains("captions") || !res.at("captions").is_array())
    unavailable("/caption response lacks a caption list");

  AspectCaptionSet set;
  AspectArray<bool> seen{};
  for (const json& c : res.at("captions")) {
    if (!c.is_object() || !c.contains("aspect") || !c.at("aspect").is_string())
      unavailable("caption lacks an aspect");
    const auto a = parse_aspect(c.at("aspect").get<std::string>());
    if (!a) unavailable("caption names an unknown aspect");
    if (seen[index(*a)]) unavailable("caption aspect repeated");
    seen[index(*a)] = true;
    AspectCaption& cap = set[*a];
    cap.aspect = *a;
    cap.text = c.value("text", "");
    if (!c.contains("embedding")) unavailable("caption lacks an embedding");
    cap.embedding = read_vector(c.at("embedding"), dim_, "caption embedding");
  }
  for (Aspect a : kAllAspects)
    if (!seen[index(a)]) unavailable("no caption for " + std::string(to_string(a)));
  return set;
}

RemoteEmbedder::RemoteEmbedder(Endpoint endpoint, Eigen::Index dim)
    : endpoint_(std::move(endpoint)), dim_(dim) {}

Vector RemoteEmbedder::embed(std::string_view text) const {
  if (d2p::tokenize(text).empty()) throw Error(ErrorCode::EmptyText, "cannot embed text without tokens");
  const json res = post_json(endpoint_, "/embed", {{"text", std::string(text)}});
  if (!res.is_object() || !res.contains("embedding")) unavailable("/embed response lacks an embedding");
  return read_vector(res.at("embedding"), dim_, "embedding");
}

RemoteLanguageModel::RemoteLanguageModel(Endpoint endpoint) : endpoint_(std::move(endpoint)) {}

AspectArray<std::string> RemoteLanguageModel::synthesize(const DialogueHistory& history,
                                                         std::string_view latest_input) const {
  json turns = json::array();
  for (const DialogueTurn& t : history.turns())
    turns.push_back({{"index", t.index}, {"user_input", t.user_input}, {"system_response", t.system_response}});
  const json res =
      post_json(endpoint_, "/summarize", {{"history", turns}, {"latest_input", std::string(latest_input)}});
  if (!res.is_object() || !res.contains("aspect_texts") || !res.at("aspect_texts").is_object())
    unavailable("/summarize response lacks aspect_texts");
  AspectArray<std::string> out{};
  for (const auto& [name, text] : res.at("aspect_texts").items()) {
    const auto a = parse_aspect(name);
    if (!a || !text.is_string()) unavailable("/summarize response has a bad aspect entry");
    out[index(*a)] = text.get<std::string>();
  }
  return out;
}

}  // namespace tdri::genbridge
