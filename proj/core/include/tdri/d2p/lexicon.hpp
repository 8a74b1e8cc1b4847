#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tdri/core/aspect.hpp"

namespace tdri::d2p {

// Lowercased alphanumeric runs. Bytes >= 0x80 are kept inside tokens so
// UTF-8 words survive intact.
std::vector<std::string> tokenize(std::string_view text);

// keyword -> Aspect table. File format: UTF-8, one "keyword<TAB>Aspect"
// pair per line, '#' starts a comment. A "# version: <v>" comment sets the
// version string.
class Lexicon {
 public:
  static Lexicon parse(std::string_view tsv);
  static Lexicon load(const std::filesystem::path& path);
  // The lexicon shipped in core/data/lexicon.tsv, compiled in.
  static const Lexicon& builtin();

  std::optional<Aspect> lookup(std::string_view token) const;
  // Keywords of one aspect in file order.
  const std::vector<std::string>& words(Aspect aspect) const { return by_aspect_[index(aspect)]; }
  const std::string& version() const noexcept { return version_; }
  std::size_t size() const noexcept { return table_.size(); }

 private:
  std::map<std::string, Aspect, std::less<>> table_;
  AspectArray<std::vector<std::string>> by_aspect_{};
  std::string version_;
};

}  // namespace tdri::d2p
