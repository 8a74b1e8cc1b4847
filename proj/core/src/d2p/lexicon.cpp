#include "tdri/d2p/lexicon.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

#include "detail/builtin_data.hpp"
#include "detail/text.hpp"
#include "tdri/core/error.hpp"

namespace tdri::d2p {

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  for (char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    if (c >= 0x80 || std::isalnum(c)) {
      current.push_back(c < 0x80 ? static_cast<char>(std::tolower(c)) : ch);
    } else if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

Lexicon Lexicon::parse(std::string_view tsv) {
  Lexicon lex;
  int line_no = 0;
  for (std::string_view line : detail::split_lines(tsv)) {
    ++line_no;
    line = detail::trim(line);
    if (line.empty()) continue;
    if (line.front() == '#') {
      auto body = detail::trim(line.substr(1));
      constexpr std::string_view kVersion = "version:";
      if (body.substr(0, kVersion.size()) == kVersion)
        lex.version_ = std::string(detail::trim(body.substr(kVersion.size())));
      continue;
    }
    const auto tab = line.find('\t');
    if (tab == std::string_view::npos)
      throw Error(ErrorCode::BadLexicon,
                  "lexicon line " + std::to_string(line_no) + ": expected keyword<TAB>Aspect");
    const auto keyword_raw = detail::trim(line.substr(0, tab));
    const auto aspect_raw = detail::trim(line.substr(tab + 1));
    const auto aspect = parse_aspect(aspect_raw);
    if (!aspect)
      throw Error(ErrorCode::BadLexicon, "lexicon line " + std::to_string(line_no) +
                                             ": unknown aspect '" + std::string(aspect_raw) + "'");
    const auto tokens = tokenize(keyword_raw);
    if (tokens.size() != 1)
      throw Error(ErrorCode::BadLexicon, "lexicon line " + std::to_string(line_no) +
                                             ": keyword must be a single token");
    if (!lex.table_.emplace(tokens.front(), *aspect).second)
      throw Error(ErrorCode::BadLexicon, "lexicon line " + std::to_string(line_no) +
                                             ": duplicate keyword '" + tokens.front() + "'");
    lex.by_aspect_[index(*aspect)].push_back(tokens.front());
  }
  return lex;
}

Lexicon Lexicon::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::BadLexicon, "cannot open lexicon " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

const Lexicon& Lexicon::builtin() {
  static const Lexicon lex = parse(tdri::detail::kBuiltinLexicon);
  return lex;
}

std::optional<Aspect> Lexicon::lookup(std::string_view token) const {
  auto it = table_.find(token);
  if (it == table_.end()) return std::nullopt;
  return it->second;
}

}  // namespace tdri::d2p
