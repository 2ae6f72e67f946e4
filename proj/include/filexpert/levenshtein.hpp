#pragma once

#include <cstddef>
#include <optional>
#include <string_view>

namespace filexpert {

// Edit distance with unit-cost insertions, deletions and substitutions.
// The string_view overload counts Unicode code points of UTF-8 text.
std::size_t levenshtein(std::u32string_view a, std::u32string_view b);
std::size_t levenshtein(std::string_view a, std::string_view b);

// Returns the distance when it is at most `limit`, nullopt otherwise. Only a
// diagonal band of width 2*limit+1 is evaluated, so long lines stay cheap.
std::optional<std::size_t> levenshtein_within(std::u32string_view a, std::u32string_view b,
                                              std::size_t limit);

} // namespace filexpert
