#pragma once

#include <string_view>

namespace tdri::detail {

extern const std::string_view kBuiltinLexicon;
extern const std::string_view kBuiltinClarifyTemplates;

}  // namespace tdri::detail
