#pragma once

#include <cstdint>
#include <random>
#include <string_view>

#include "tdri/core/linalg.hpp"

namespace tdri {

// Stable 64-bit FNV-1a. Used to key per-token and per-aspect streams so that
// toy backends do not depend on std::hash.
std::uint64_t fnv1a(std::string_view bytes) noexcept;

// Mixes a base seed with a salt into an independent seed.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t salt) noexcept;

// Engine seeded from a single 64-bit value through std::seed_seq.
std::mt19937_64 make_engine(std::uint64_t seed);

// Standard-normal vector of the given dimension.
Vector gaussian_vector(std::uint64_t seed, Eigen::Index dim);

// Uniformly distributed unit vector.
Vector random_unit_vector(std::uint64_t seed, Eigen::Index dim);

// Counter-based draw stream. The full state is (seed, draws), so a stream
// can be persisted and resumed exactly.
class SeedStream {
 public:
  SeedStream() = default;
  explicit SeedStream(std::uint64_t seed, std::uint64_t draws = 0) noexcept
      : seed_(seed), draws_(draws) {}

  std::uint64_t next() noexcept { return derive_seed(seed_, ++draws_); }

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t draws() const noexcept { return draws_; }

  friend bool operator==(const SeedStream&, const SeedStream&) = default;

 private:
  std::uint64_t seed_ = 0;
  std::uint64_t draws_ = 0;
};

}  // namespace tdri
