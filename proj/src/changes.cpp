#include "filexpert/changes.hpp"

#include <cmath>

#include "filexpert/error.hpp"
#include "filexpert/levenshtein.hpp"
#include "filexpert/utf8.hpp"

namespace filexpert::diff {

bool is_modification(std::string_view removed, std::string_view added, double threshold) {
    auto r = utf8::decode(removed);
    const double bound = threshold * static_cast<double>(r.size());
    if (bound <= 0.0)
        return false;
    auto a = utf8::decode(added);
    auto limit = static_cast<std::size_t>(std::ceil(bound));
    auto d = levenshtein_within(r, a, limit);
    return d && static_cast<double>(*d) < bound;
}

ChangeStats classify_changes(const std::vector<DiffHunk>& hunks, double mod_threshold,
                             const LanguageRules* rules) {
    if (!(mod_threshold >= 0.0 && mod_threshold <= 1.0))
        throw Error("diff", "InvalidThreshold", "modification threshold must lie in [0,1]");

    ChangeStats stats;
    auto count_added = [&](const std::string& line) {
        ++stats.adds;
        if (rules)
            stats.conds += static_cast<long>(count_conditionals(line, *rules));
    };
    for (const auto& h : hunks) {
        const std::size_t paired = std::min(h.removed.size(), h.added.size());
        for (std::size_t i = 0; i < paired; ++i) {
            if (is_modification(h.removed[i], h.added[i], mod_threshold)) {
                ++stats.mods;
            } else {
                ++stats.dels;
                count_added(h.added[i]);
            }
        }
        for (std::size_t i = paired; i < h.removed.size(); ++i)
            ++stats.dels;
        for (std::size_t i = paired; i < h.added.size(); ++i)
            count_added(h.added[i]);
    }
    return stats;
}

} // namespace filexpert::diff
