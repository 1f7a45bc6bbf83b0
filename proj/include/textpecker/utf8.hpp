#pragma once

#include <string>
#include <string_view>

namespace textpecker::utf8 {

/// Decodes UTF-8 into scalar values. Invalid sequences throw ParseError with the byte offset.
std::u32string decode(std::string_view text);

std::string encode(std::u32string_view text);
void append(std::string& out, char32_t c);

/// Reads one scalar value starting at `pos` and advances `pos` past it.
char32_t next(std::string_view text, std::size_t& pos);

bool is_space(char32_t c) noexcept;

/// CJK unified ideographs (all planes) and compatibility ideographs.
bool is_cjk(char32_t c) noexcept;

}  // namespace textpecker::utf8
