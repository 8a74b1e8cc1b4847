#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>

namespace tdri {

// The seven caption dimensions. Order is the canonical iteration order used
// everywhere (serialization, reports, template tables).
enum class Aspect : std::size_t {
  Content = 0,
  Style,
  Background,
  Size,
  Color,
  Perspective,
  Others,
};

inline constexpr std::size_t kAspectCount = 7;

inline constexpr std::array<Aspect, kAspectCount> kAllAspects = {
    Aspect::Content, Aspect::Style,       Aspect::Background, Aspect::Size,
    Aspect::Color,   Aspect::Perspective, Aspect::Others,
};

template <class T>
using AspectArray = std::array<T, kAspectCount>;

constexpr std::size_t index(Aspect a) noexcept { return static_cast<std::size_t>(a); }

std::string_view to_string(Aspect a) noexcept;

// Case-insensitive. Returns nullopt for unknown names.
std::optional<Aspect> parse_aspect(std::string_view name) noexcept;

}  // namespace tdri
