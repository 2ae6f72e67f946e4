#include "filexpert/conditionals.hpp"

#include <algorithm>
#include <fstream>
#include <iterator>

#include <json.hpp>

#include "filexpert/error.hpp"

namespace filexpert::diff {

namespace {

LanguageRules c_family(std::vector<std::string> keywords, std::string quotes = "\"'") {
    return {std::move(keywords), TernaryStyle::c, {"//"}, {{"/*", "*/"}}, std::move(quotes)};
}

KeywordTable make_defaults() {
    KeywordTable t;
    t.languages.emplace("C", c_family({"if", "case"}));
    t.languages.emplace("C++", c_family({"if", "case"}));
    t.languages.emplace("Java", c_family({"if", "case"}));
    t.languages.emplace("JavaScript", c_family({"if", "case"}, "\"'`"));
    auto php = c_family({"if", "elseif", "case"});
    php.line_comments.push_back("#");
    t.languages.emplace("PHP", std::move(php));
    t.languages.emplace("Python",
                        LanguageRules{{"if", "elif"}, TernaryStyle::none, {"#"}, {}, "\"'"});
    t.languages.emplace("Ruby", LanguageRules{{"if", "elsif", "unless", "when"},
                                              TernaryStyle::ruby, {"#"}, {}, "\"'"});
    return t;
}

TernaryStyle ternary_from_string(const std::string& s) {
    if (s == "c")
        return TernaryStyle::c;
    if (s == "ruby")
        return TernaryStyle::ruby;
    if (s == "none" || s.empty())
        return TernaryStyle::none;
    throw Error("diff", "InvalidKeywordTable", "unknown ternary style '" + s + "'");
}

bool is_ident_char(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
           c == '_' || c == '$' || static_cast<unsigned char>(c) >= 0x80;
}

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\f' || c == '\v'; }

bool is_ternary(std::string_view line, std::size_t i, TernaryStyle style) {
    char prev = i > 0 ? line[i - 1] : '\0';
    char next = i + 1 < line.size() ? line[i + 1] : '\0';
    switch (style) {
    case TernaryStyle::none:
        return false;
    case TernaryStyle::c:
        if (prev == '?' || prev == '<')
            return false;
        return next != '?' && next != '.' && next != '>' && next != ':' && next != '[';
    case TernaryStyle::ruby:
        return i > 0 && is_space(prev) && (next == '\0' || is_space(next));
    }
    return false;
}

} // namespace

const KeywordTable& KeywordTable::defaults() {
    static const KeywordTable table = make_defaults();
    return table;
}

KeywordTable KeywordTable::from_json_text(std::string_view text) {
    KeywordTable table = defaults();
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
        for (const auto& [lang, spec] : j.items()) {
            LanguageRules r;
            r.keywords = spec.value("keywords", std::vector<std::string>{});
            r.ternary = ternary_from_string(spec.value("ternary", std::string("none")));
            r.line_comments = spec.value("line_comments", std::vector<std::string>{});
            for (const auto& pair : spec.value("block_comments", nlohmann::json::array()))
                r.block_comments.emplace_back(pair.at(0).get<std::string>(),
                                              pair.at(1).get<std::string>());
            r.quotes = spec.value("quotes", std::string());
            table.languages.insert_or_assign(lang, std::move(r));
        }
    } catch (const nlohmann::json::exception& e) {
        throw Error("diff", "InvalidKeywordTable", e.what());
    }
    return table;
}

KeywordTable KeywordTable::from_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw Error("diff", "InvalidKeywordTable", "cannot open " + path.string());
    std::string text{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
    return from_json_text(text);
}

bool KeywordTable::has(std::string_view language) const {
    return languages.find(language) != languages.end();
}

const LanguageRules& KeywordTable::rules(std::string_view language) const {
    auto it = languages.find(language);
    if (it == languages.end())
        throw Error("diff", "UnknownLanguage", "no conditional keywords for '" +
                                                   std::string(language) + "'");
    return it->second;
}

std::size_t count_conditionals(std::string_view line, const LanguageRules& rules) {
    std::size_t count = 0;
    std::size_t i = 0;
    while (i < line.size()) {
        auto rest = line.substr(i);
        if (std::any_of(rules.line_comments.begin(), rules.line_comments.end(),
                        [&](const std::string& c) { return rest.starts_with(c); }))
            break;
        bool in_block = false;
        for (const auto& [open, close] : rules.block_comments) {
            if (rest.starts_with(open)) {
                auto end = line.find(close, i + open.size());
                i = end == std::string_view::npos ? line.size() : end + close.size();
                in_block = true;
                break;
            }
        }
        if (in_block)
            continue;

        char c = line[i];
        if (rules.quotes.find(c) != std::string::npos) {
            std::size_t j = i + 1;
            while (j < line.size() && line[j] != c)
                j += line[j] == '\\' ? 2 : 1;
            i = j + 1;
            continue;
        }
        if (is_ident_char(c)) {
            std::size_t j = i;
            while (j < line.size() && is_ident_char(line[j]))
                ++j;
            auto word = line.substr(i, j - i);
            if (std::find(rules.keywords.begin(), rules.keywords.end(), word) != rules.keywords.end())
                ++count;
            i = j;
            continue;
        }
        if (c == '?' && is_ternary(line, i, rules.ternary))
            ++count;
        ++i;
    }
    return count;
}

std::size_t count_conditionals(std::span<const std::string> lines, std::string_view language,
                               const KeywordTable& table) {
    const auto& rules = table.rules(language);
    std::size_t total = 0;
    for (const auto& l : lines)
        total += count_conditionals(std::string_view(l), rules);
    return total;
}

} // namespace filexpert::diff
