#include "tdri/service/http_api.hpp"

#include <httplib.h>

#include "service/json_codec.hpp"

namespace tdri::service {

using json_io::json;

int http_status(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::Unauthorized:
      return 401;
    case ErrorCode::UnknownSession:
    case ErrorCode::UnknownImage:
      return 404;
    case ErrorCode::IllegalTransition:
    case ErrorCode::SessionCompleted:
    case ErrorCode::NotTriggered:
      return 409;
    case ErrorCode::BackendUnavailable:
      return 502;
    case ErrorCode::EmptyText:
    case ErrorCode::InvalidPrompt:
    case ErrorCode::InvalidSigma:
    case ErrorCode::InvalidGrid:
    case ErrorCode::InvalidPose:
    case ErrorCode::DimensionMismatch:
    case ErrorCode::NoActiveAspects:
    case ErrorCode::InvalidConfig:
    case ErrorCode::SelfPair:
    case ErrorCode::SchemaMismatch:
    case ErrorCode::CorruptSnapshot:
      return 400;
    default:
      return 500;
  }
}

namespace {

json image_json(const std::string& session_id, const ImageArtifact& img) {
  return {{"id", img.id},
          {"descriptor", json_io::write(img.descriptor)},
          {"has_render", img.render.has_value()},
          {"url", "/sessions/" + session_id + "/images/" + img.id},
          {"provenance",
           {{"round", img.provenance.round},
            {"generator", img.provenance.generator},
            {"seed", img.provenance.seed}}}};
}

json round_json(const RoundResult& r) {
  return {{"session_id", r.session_id},
          {"round", r.round},
          {"phase", std::string(to_string(r.phase))},
          {"image", image_json(r.session_id, r.image)},
          {"ambiguity_report", json_io::write(r.ambiguity_report)},
          {"clarification_query",
           r.clarification_query ? json_io::write(*r.clarification_query) : json(nullptr)},
          {"response", r.response},
          {"ae_applied", r.ae_applied}};
}

json session_json(const Session& s) {
  json j = json_io::write(s);
  for (json& img : j["images"]) {
    img.erase("render");
    const ImageArtifact* a = s.find_image(img.at("id").get<std::string>());
    img["has_render"] = a && a->render.has_value();
    img["url"] = "/sessions/" + s.id + "/images/" + img.at("id").get<std::string>();
  }
  return j;
}

std::string body_string(const json& j, const char* field) {
  if (!j.is_object() || !j.contains(field) || !j.at(field).is_string())
    throw Error(ErrorCode::InvalidConfig, std::string("request body needs a string '") + field + "'", field);
  return j.at(field).get<std::string>();
}

json parse_body(const httplib::Request& req, bool optional) {
  if (req.body.empty()) {
    if (optional) return json::object();
    throw Error(ErrorCode::InvalidConfig, "request body is empty", "body");
  }
  try {
    return json::parse(req.body);
  } catch (const json::parse_error&) {
    throw Error(ErrorCode::InvalidConfig, "request body is not JSON", "body");
  }
}

}  // namespace

struct HttpApi::Impl {
  Engine& engine;
  ApiOptions options;
  httplib::Server server;

  Impl(Engine& e, ApiOptions o) : engine(e), options(std::move(o)) {
    if (!options.api_token.empty()) options.secrets.push_back(options.api_token);
    routes();
  }

  std::string scrub(std::string text) const {
    for (const std::string& secret : options.secrets) {
      if (secret.empty()) continue;
      for (auto pos = text.find(secret); pos != std::string::npos; pos = text.find(secret, pos + 10))
        text.replace(pos, secret.size(), "[redacted]");
    }
    return text;
  }

  void fail(httplib::Response& res, int status, std::string_view code, const std::string& message,
            const std::string& field) const {
    json j = {{"code", std::string(code)}, {"message", scrub(message)}};
    if (!field.empty()) j["field"] = field;
    res.status = status;
    res.set_content(j.dump(), "application/json");
  }

  bool authorized(const httplib::Request& req) const {
    if (options.api_token.empty()) return true;
    const std::string expected = "Bearer " + options.api_token;
    const std::string got = req.get_header_value("Authorization");
    unsigned diff = got.size() ^ expected.size();
    for (std::size_t i = 0; i < expected.size(); ++i)
      diff |= static_cast<unsigned char>(expected[i]) ^ static_cast<unsigned char>(i < got.size() ? got[i] : 0);
    return diff == 0;
  }

  template <class F>
  httplib::Server::Handler guarded(F f, bool needs_auth = true) {
    return [this, f, needs_auth](const httplib::Request& req, httplib::Response& res) {
      try {
        if (needs_auth && !authorized(req))
          throw Error(ErrorCode::Unauthorized, "missing or wrong bearer token");
        f(req, res);
      } catch (const Error& e) {
        fail(res, http_status(e.code()), to_string(e.code()), e.what(), e.field());
      } catch (const json::exception& e) {
        fail(res, 400, to_string(ErrorCode::InvalidConfig), std::string("bad request body: ") + e.what(), "body");
      } catch (const std::exception& e) {
        fail(res, 500, "Internal", e.what(), "");
      }
    };
  }

  static void send(httplib::Response& res, const json& j, int status = 200) {
    res.status = status;
    res.set_content(j.dump(), "application/json");
  }

  void routes() {
    server.Get("/healthz", guarded([](const httplib::Request&, httplib::Response& res) {
                 send(res, {{"status", "ok"}});
               }, false));

    server.Post("/sessions", guarded([this](const httplib::Request& req, httplib::Response& res) {
      const json body = parse_body(req, true);
      KeyValues overrides;
      if (body.contains("config")) {
        const json& cfg = body.at("config");
        if (!cfg.is_object()) throw Error(ErrorCode::InvalidConfig, "config must be an object", "config");
        for (const auto& [k, v] : cfg.items())
          overrides.emplace_back(k, v.is_string() ? v.get<std::string>() : v.dump());
      }
      const std::string id = engine.create_session(overrides);
      const Session s = engine.get(id);
      send(res, {{"session_id", id}, {"phase", std::string(to_string(s.phase))},
                 {"config", json_io::write(s.config)}}, 201);
    }));

    server.Post("/sessions/:id/messages", guarded([this](const httplib::Request& req, httplib::Response& res) {
      const std::string text = body_string(parse_body(req, false), "text");
      send(res, round_json(engine.submit_message(req.path_params.at("id"), text)));
    }));

    server.Post("/sessions/:id/preferences", guarded([this](const httplib::Request& req, httplib::Response& res) {
      const json body = parse_body(req, false);
      const VoteResult v =
          engine.vote(req.path_params.at("id"), body_string(body, "winner_id"), body_string(body, "loser_id"));
      send(res, {{"pair_count", v.pair_count},
                 {"policy_version", v.policy_version},
                 {"policy_updated", v.policy_updated}});
    }));

    server.Post("/sessions/:id/accept", guarded([this](const httplib::Request& req, httplib::Response& res) {
      const Session s = engine.accept(req.path_params.at("id"));
      send(res, {{"session_id", s.id}, {"phase", std::string(to_string(s.phase))}, {"round", s.round()}});
    }));

    server.Get("/sessions/:id", guarded([this](const httplib::Request& req, httplib::Response& res) {
      send(res, session_json(engine.get(req.path_params.at("id"))));
    }));

    server.Get("/sessions/:id/images/:image_id",
               guarded([this](const httplib::Request& req, httplib::Response& res) {
                 const std::string id = req.path_params.at("id");
                 const ImageArtifact img = engine.image(id, req.path_params.at("image_id"));
                 if (img.render) {
                   res.status = 200;
                   res.set_content(img.render->bytes, img.render->media_type);
                 } else {
                   send(res, image_json(id, img));
                 }
               }));

    server.set_error_handler([this](const httplib::Request& req, httplib::Response& res) {
      if (res.status == 404 && res.body.empty())
        fail(res, 404, "NotFound", "no route for " + req.method + " " + req.path, "");
    });
  }
};

HttpApi::HttpApi(Engine& engine, ApiOptions options) : impl_(std::make_unique<Impl>(engine, std::move(options))) {}

HttpApi::~HttpApi() { stop(); }

int HttpApi::bind(const std::string& host, int port) {
  int bound = -1;
  if (port == 0) bound = impl_->server.bind_to_any_port(host);
  else if (impl_->server.bind_to_port(host, port)) bound = port;
  if (bound < 0)
    throw Error(ErrorCode::InvalidConfig, "cannot bind " + host + ":" + std::to_string(port), "port");
  return bound;
}

void HttpApi::serve() {
  impl_->server.listen_after_bind();
}

void HttpApi::stop() {
  if (impl_->server.is_running()) impl_->server.stop();
}

bool HttpApi::running() const { return impl_->server.is_running(); }

}  // namespace tdri::service
