#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "tdri/core/aspect.hpp"

namespace tdri {

// Toy-backend constants. They live in the config so they are visible and
// overridable, but the defaults are the contract the tests pin.
struct ToyConstants {
  double context_weight = 0.3;
  double pose_weight = 0.1;
  double noise_scale = 0.05;
  int pose_keypoints = 17;
  int heatmap_height = 64;
  int heatmap_width = 64;
  double pose_sigma = 2.0;
  double ae_step = 0.5;
  double dpo_step = 0.1;

  friend bool operator==(const ToyConstants&, const ToyConstants&) = default;
};

struct SessionConfig {
  double ambiguity_threshold = 0.3;  // tau
  double ae_threshold = 0.70;        // k
  double lambda_combine = 1.0;       // lambda
  double recency_decay = 0.7;        // gamma
  double response_weight_ratio = 0.5;  // rho, mu_i = rho * lambda_i
  AspectArray<double> aspect_importance = {1, 1, 1, 1, 1, 1, 1};  // nu
  int max_rounds = 10;
  int dpo_batch = 40;
  int dpo_epochs = 3;
  int embedding_dim = 64;
  std::int64_t rng_seed = 0;
  ToyConstants toy;

  friend bool operator==(const SessionConfig&, const SessionConfig&) = default;
};

// Throws InvalidConfig naming the first out-of-range field.
void validate(const SessionConfig& config);

// Assigns one field from its textual form. Keys are the field names above;
// importance entries are "aspect_importance.<Aspect>" and toy constants
// "toy.<name>". Throws InvalidConfig for unknown keys or unparsable values.
// Does not range-check; call validate() after a batch of assignments.
void set_field(SessionConfig& config, std::string_view key, std::string_view value);

std::vector<std::string> config_field_names();

}  // namespace tdri
