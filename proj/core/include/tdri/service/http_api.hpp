#pragma once

#include <memory>
#include <string>
#include <vector>

#include "tdri/core/error.hpp"
#include "tdri/service/engine.hpp"

namespace tdri::service {

// 400 for bad input, 401, 404 for unknown sessions and images, 409 for
// protocol-order errors, 502 for backend failures, 500 otherwise.
int http_status(ErrorCode code) noexcept;

struct ApiOptions {
  std::string api_token;             // empty: no auth
  std::vector<std::string> secrets;  // scrubbed from every error message
};

//   POST /sessions                          {config?: {key: value}}
//   POST /sessions/{id}/messages            {text}
//   POST /sessions/{id}/preferences         {winner_id, loser_id}
//   POST /sessions/{id}/accept
//   GET  /sessions/{id}
//   GET  /sessions/{id}/images/{image_id}   render bytes, or JSON when none
//   GET  /healthz                           never needs the token
// Errors are {code, message, field?}.
class HttpApi {
 public:
  HttpApi(Engine& engine, ApiOptions options);
  ~HttpApi();
  HttpApi(const HttpApi&) = delete;
  HttpApi& operator=(const HttpApi&) = delete;

  // Port 0 picks a free port. Returns the bound port; throws InvalidConfig
  // when binding fails.
  int bind(const std::string& host, int port);
  // Blocks until stop().
  void serve();
  void stop();
  bool running() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace tdri::service
