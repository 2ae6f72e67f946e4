#include "filexpert/levenshtein.hpp"

#include <algorithm>
#include <limits>
#include <vector>

#include "filexpert/utf8.hpp"

namespace filexpert {

std::size_t levenshtein(std::u32string_view a, std::u32string_view b) {
    if (a.size() < b.size())
        std::swap(a, b);
    // b is the shorter one; keep a single row of |b|+1 cells.
    std::vector<std::size_t> row(b.size() + 1);
    for (std::size_t j = 0; j <= b.size(); ++j)
        row[j] = j;
    for (std::size_t i = 1; i <= a.size(); ++i) {
        std::size_t diagonal = row[0];
        row[0] = i;
        for (std::size_t j = 1; j <= b.size(); ++j) {
            std::size_t above = row[j];
            std::size_t cost = a[i - 1] == b[j - 1] ? 0 : 1;
            row[j] = std::min({above + 1, row[j - 1] + 1, diagonal + cost});
            diagonal = above;
        }
    }
    return row[b.size()];
}

std::size_t levenshtein(std::string_view a, std::string_view b) {
    if (a == b)
        return 0;
    auto ua = utf8::decode(a);
    auto ub = utf8::decode(b);
    return levenshtein(std::u32string_view(ua), std::u32string_view(ub));
}

std::optional<std::size_t> levenshtein_within(std::u32string_view a, std::u32string_view b,
                                              std::size_t limit) {
    if (a.size() < b.size())
        std::swap(a, b);
    if (a.size() - b.size() > limit)
        return std::nullopt;
    if (b.empty())
        return a.size();

    constexpr std::size_t inf = std::numeric_limits<std::size_t>::max() / 2;
    const std::size_t n = a.size(), m = b.size();
    std::vector<std::size_t> prev(m + 1, inf), cur(m + 1, inf);
    for (std::size_t j = 0; j <= std::min(m, limit); ++j)
        prev[j] = j;

    for (std::size_t i = 1; i <= n; ++i) {
        std::size_t lo = i > limit ? i - limit : 0;
        std::size_t hi = std::min(m, i + limit);
        // Cells just outside the band are read by this row and the next.
        if (lo > 0)
            cur[lo - 1] = inf;
        if (hi + 1 <= m)
            cur[hi + 1] = inf;
        if (lo == 0)
            cur[0] = i;
        std::size_t best = lo == 0 ? cur[0] : inf;
        for (std::size_t j = std::max<std::size_t>(lo, 1); j <= hi; ++j) {
            std::size_t cost = a[i - 1] == b[j - 1] ? 0 : 1;
            std::size_t v = prev[j - 1] + cost;
            v = std::min(v, prev[j] + 1);
            v = std::min(v, cur[j - 1] + 1);
            cur[j] = v;
            best = std::min(best, v);
        }
        if (best > limit)
            return std::nullopt;
        std::swap(prev, cur);
    }
    if (prev[m] > limit)
        return std::nullopt;
    return prev[m];
}

} // namespace filexpert
