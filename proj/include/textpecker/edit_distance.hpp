#pragma once

#include <cstddef>
#include <string>
#include <string_view>

namespace textpecker {

/// Unit-cost Levenshtein distance over scalar values.
std::size_t levenshtein(std::u32string_view a, std::u32string_view b);

/// levenshtein(a, b) / max(|a|, |b|); 0 when both are empty.
double ned(std::u32string_view a, std::u32string_view b);

/// UTF-8 convenience overload; lengths are counted in scalar values.
double ned(std::string_view a, std::string_view b);

}  // namespace textpecker
