#include "tdri/core/config.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <functional>
#include <map>
#include <string>

#include "tdri/core/error.hpp"

namespace tdri {

namespace {

[[noreturn]] void invalid(std::string_view field, const std::string& why) {
  throw Error(ErrorCode::InvalidConfig, std::string(field) + ": " + why, std::string(field));
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

double parse_real(std::string_view key, std::string_view raw) {
  const std::string text(trim(raw));
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size()) invalid(key, "not a number: '" + text + "'");
    return v;
  } catch (const std::logic_error&) {
    invalid(key, "not a number: '" + text + "'");
  }
}

template <class Int>
Int parse_int(std::string_view key, std::string_view raw) {
  const std::string_view text = trim(raw);
  Int v{};
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size())
    invalid(key, "not an integer: '" + std::string(text) + "'");
  return v;
}

using Setter = std::function<void(SessionConfig&, std::string_view key, std::string_view value)>;

template <class Field>
Setter real_field(Field field) {
  return [field](SessionConfig& c, std::string_view k, std::string_view v) {
    std::invoke(field, c) = parse_real(k, v);
  };
}

template <class Field>
Setter int_field(Field field) {
  return [field](SessionConfig& c, std::string_view k, std::string_view v) {
    auto& slot = std::invoke(field, c);
    slot = parse_int<std::decay_t<decltype(slot)>>(k, v);
  };
}

const std::map<std::string, Setter, std::less<>>& setters() {
  static const auto table = [] {
    std::map<std::string, Setter, std::less<>> t;
    t["ambiguity_threshold"] = real_field(&SessionConfig::ambiguity_threshold);
    t["ae_threshold"] = real_field(&SessionConfig::ae_threshold);
    t["lambda_combine"] = real_field(&SessionConfig::lambda_combine);
    t["recency_decay"] = real_field(&SessionConfig::recency_decay);
    t["response_weight_ratio"] = real_field(&SessionConfig::response_weight_ratio);
    t["max_rounds"] = int_field(&SessionConfig::max_rounds);
    t["dpo_batch"] = int_field(&SessionConfig::dpo_batch);
    t["dpo_epochs"] = int_field(&SessionConfig::dpo_epochs);
    t["embedding_dim"] = int_field(&SessionConfig::embedding_dim);
    t["rng_seed"] = int_field(&SessionConfig::rng_seed);
    for (Aspect a : kAllAspects) {
      t["aspect_importance." + std::string(to_string(a))] =
          [a](SessionConfig& c, std::string_view k, std::string_view v) {
            c.aspect_importance[index(a)] = parse_real(k, v);
          };
    }
    auto toy_real = [](double ToyConstants::*m) -> Setter {
      return [m](SessionConfig& c, std::string_view k, std::string_view v) {
        c.toy.*m = parse_real(k, v);
      };
    };
    auto toy_int = [](int ToyConstants::*m) -> Setter {
      return [m](SessionConfig& c, std::string_view k, std::string_view v) {
        c.toy.*m = parse_int<int>(k, v);
      };
    };
    t["toy.context_weight"] = toy_real(&ToyConstants::context_weight);
    t["toy.pose_weight"] = toy_real(&ToyConstants::pose_weight);
    t["toy.noise_scale"] = toy_real(&ToyConstants::noise_scale);
    t["toy.pose_keypoints"] = toy_int(&ToyConstants::pose_keypoints);
    t["toy.heatmap_height"] = toy_int(&ToyConstants::heatmap_height);
    t["toy.heatmap_width"] = toy_int(&ToyConstants::heatmap_width);
    t["toy.pose_sigma"] = toy_real(&ToyConstants::pose_sigma);
    t["toy.ae_step"] = toy_real(&ToyConstants::ae_step);
    t["toy.dpo_step"] = toy_real(&ToyConstants::dpo_step);
    return t;
  }();
  return table;
}

void require_open_unit(std::string_view name, double v) {
  if (!(v > 0.0 && v < 1.0)) invalid(name, "must lie in (0, 1), got " + std::to_string(v));
}

void require_nonnegative(std::string_view name, double v) {
  if (!(v >= 0.0) || !std::isfinite(v)) invalid(name, "must be a finite value >= 0");
}

void require_positive(std::string_view name, double v) {
  if (!(v > 0.0) || !std::isfinite(v)) invalid(name, "must be a finite value > 0");
}

}  // namespace

void validate(const SessionConfig& c) {
  require_open_unit("ambiguity_threshold", c.ambiguity_threshold);
  require_open_unit("ae_threshold", c.ae_threshold);
  require_nonnegative("lambda_combine", c.lambda_combine);
  if (!(c.recency_decay > 0.0 && c.recency_decay <= 1.0))
    invalid("recency_decay", "must lie in (0, 1]");
  require_nonnegative("response_weight_ratio", c.response_weight_ratio);
  for (Aspect a : kAllAspects)
    require_positive("aspect_importance." + std::string(to_string(a)),
                     c.aspect_importance[index(a)]);
  if (c.max_rounds < 1) invalid("max_rounds", "must be >= 1");
  if (c.dpo_batch < 1) invalid("dpo_batch", "must be >= 1");
  if (c.dpo_epochs < 1) invalid("dpo_epochs", "must be >= 1");
  // Toy embeddings reserve one coordinate block per aspect.
  if (c.embedding_dim < static_cast<int>(kAspectCount))
    invalid("embedding_dim", "must be >= 7");
  require_nonnegative("toy.context_weight", c.toy.context_weight);
  require_nonnegative("toy.pose_weight", c.toy.pose_weight);
  require_nonnegative("toy.noise_scale", c.toy.noise_scale);
  if (c.toy.pose_keypoints < 1) invalid("toy.pose_keypoints", "must be >= 1");
  if (c.toy.heatmap_height < 8) invalid("toy.heatmap_height", "must be >= 8");
  if (c.toy.heatmap_width < 8) invalid("toy.heatmap_width", "must be >= 8");
  require_positive("toy.pose_sigma", c.toy.pose_sigma);
  require_positive("toy.ae_step", c.toy.ae_step);
  require_positive("toy.dpo_step", c.toy.dpo_step);
}

void set_field(SessionConfig& config, std::string_view key, std::string_view value) {
  const auto& table = setters();
  auto it = table.find(key);
  if (it == table.end()) invalid(key, "unknown configuration key");
  it->second(config, key, value);
}

std::vector<std::string> config_field_names() {
  std::vector<std::string> names;
  for (const auto& [name, _] : setters()) names.push_back(name);
  return names;
}

}  // namespace tdri
