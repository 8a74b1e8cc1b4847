#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>

#include "tdri/core/types.hpp"
#include "tdri/reflect/types.hpp"

namespace tdri::genbridge {

struct GeneratorRequest {
  Prompt prompt;
  std::optional<Pose> pose_constraint;
  SessionContext context;
  std::uint64_t seed = 0;
};

// Deterministic map from aspect weights to an image descriptor, everything
// else in a request held fixed.
using ImageFn = std::function<Vector(const AspectArray<double>& weights)>;

// Generators leave ImageArtifact::id empty; the caller names images.
class Generator {
 public:
  virtual ~Generator() = default;
  // Throws InvalidPrompt when every weight is zero, BackendUnavailable on
  // transport failure.
  virtual ImageArtifact generate(const GeneratorRequest& request) const = 0;
  // The default wraps generate() with the request's weights replaced.
  virtual ImageFn smooth_path(const GeneratorRequest& request) const;
  virtual std::string name() const = 0;
};

class PoseEstimator {
 public:
  virtual ~PoseEstimator() = default;
  virtual Pose estimate(const ImageArtifact& image) const = 0;
  virtual std::string name() const = 0;
};

class Captioner {
 public:
  virtual ~Captioner() = default;
  // Always returns one caption per aspect.
  virtual AspectCaptionSet extract(const ImageArtifact& image) const = 0;
  virtual std::string name() const = 0;
};

}  // namespace tdri::genbridge
