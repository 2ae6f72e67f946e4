#pragma once

#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace filexpert::diff {

// How a bare '?' is recognised as a ternary operator.
//   none:  never counted
//   c:     any '?' except in "??", "?.", "?>", "?:", "?[" and after '<' (generics, PHP tags)
//   ruby:  '?' preceded by whitespace, so predicate methods like empty? do not count
enum class TernaryStyle { none, c, ruby };

struct LanguageRules {
    std::vector<std::string> keywords;
    TernaryStyle ternary = TernaryStyle::none;
    std::vector<std::string> line_comments;
    // Block comments are only recognised when they open and close on one line.
    std::vector<std::pair<std::string, std::string>> block_comments;
    std::string quotes;
};

class KeywordTable {
public:
    // The bundled table (config/conditionals.json holds the same content).
    static const KeywordTable& defaults();

    // Languages in the file replace or extend the bundled ones.
    static KeywordTable from_json_file(const std::filesystem::path& path);
    static KeywordTable from_json_text(std::string_view text);

    bool has(std::string_view language) const;
    // Throws Error("diff", "UnknownLanguage").
    const LanguageRules& rules(std::string_view language) const;

    std::map<std::string, LanguageRules, std::less<>> languages;
};

std::size_t count_conditionals(std::string_view line, const LanguageRules& rules);
std::size_t count_conditionals(std::span<const std::string> lines, std::string_view language,
                               const KeywordTable& table = KeywordTable::defaults());

} // namespace filexpert::diff
