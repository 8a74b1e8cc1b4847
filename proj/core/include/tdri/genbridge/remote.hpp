#pragma once

#include <chrono>
#include <string>

#include "tdri/d2p/embedder.hpp"
#include "tdri/d2p/summarizer.hpp"
#include "tdri/genbridge/backends.hpp"

namespace tdri::genbridge {

// Base URL ("http://host:port[/prefix]") plus per-request timeout. Every
// request opens its own connection, so clients are safe to share.
struct Endpoint {
  std::string base_url;
  std::chrono::milliseconds timeout{30000};
  std::string bearer_token;  // sent as Authorization when nonempty
};

// POST /generate
//   {prompt: {aspect_texts, aspect_weights}, pose: [[x, y], ...] | null, seed}
//   -> {descriptor: [D floats], render: {data: base64, media_type} | null}
class RemoteGenerator final : public Generator {
 public:
  RemoteGenerator(Endpoint endpoint, Eigen::Index dim);
  ImageArtifact generate(const GeneratorRequest& request) const override;
  std::string name() const override { return "remote"; }

 private:
  Endpoint endpoint_;
  Eigen::Index dim_;
};

// POST /caption {descriptor, render | null}
//   -> {captions: [{aspect, text, embedding} x 7]}
class RemoteCaptioner final : public Captioner {
 public:
  RemoteCaptioner(Endpoint endpoint, Eigen::Index dim);
  AspectCaptionSet extract(const ImageArtifact& image) const override;
  std::string name() const override { return "remote"; }

 private:
  Endpoint endpoint_;
  Eigen::Index dim_;
};

// POST /embed {text} -> {embedding}
class RemoteEmbedder final : public d2p::Embedder {
 public:
  RemoteEmbedder(Endpoint endpoint, Eigen::Index dim);
  Vector embed(std::string_view text) const override;
  Eigen::Index dim() const noexcept override { return dim_; }
  std::string name() const override { return "remote"; }

 private:
  Endpoint endpoint_;
  Eigen::Index dim_;
};

// POST /summarize
//   {history: [{index, user_input, system_response}], latest_input}
//   -> {aspect_texts: {Aspect: text}}
class RemoteLanguageModel final : public d2p::LanguageModel {
 public:
  explicit RemoteLanguageModel(Endpoint endpoint);
  AspectArray<std::string> synthesize(const DialogueHistory& history,
                                      std::string_view latest_input) const override;

 private:
  Endpoint endpoint_;
};

}  // namespace tdri::genbridge
