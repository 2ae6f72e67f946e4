#pragma once

#include <string>
#include <string_view>

namespace filexpert::utf8 {

// Decodes UTF-8 into code points. Invalid bytes decode to U+FFFD one byte at
// a time, so every input has a decoding.
std::u32string decode(std::string_view text);
std::string encode(std::u32string_view text);

// Lowercases, folds Latin accented letters onto their base letter, drops
// punctuation and symbols, and collapses whitespace runs to one space.
std::u32string normalize_name(std::string_view name);

} // namespace filexpert::utf8
