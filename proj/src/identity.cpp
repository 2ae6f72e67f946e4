#include "filexpert/identity.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "filexpert/csv.hpp"
#include "filexpert/error.hpp"
#include "filexpert/levenshtein.hpp"
#include "filexpert/utf8.hpp"

namespace filexpert::identity {

using history::lowercase_ascii;
using history::RawIdentity;

namespace {

class DisjointSets {
public:
    explicit DisjointSets(std::size_t n) : parent_(n) {
        std::iota(parent_.begin(), parent_.end(), std::size_t{0});
    }
    std::size_t find(std::size_t x) {
        while (parent_[x] != x) {
            parent_[x] = parent_[parent_[x]];
            x = parent_[x];
        }
        return x;
    }
    void unite(std::size_t a, std::size_t b) {
        a = find(a);
        b = find(b);
        if (a != b)
            parent_[std::max(a, b)] = std::min(a, b);
    }

private:
    std::vector<std::size_t> parent_;
};

std::string trim(std::string_view s) {
    auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos)
        return {};
    auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

bool within_threshold(std::u32string_view a, std::u32string_view b, double threshold) {
    auto longer = static_cast<double>(std::max(a.size(), b.size()));
    auto limit = static_cast<std::size_t>(std::floor(threshold * longer + 1e-9));
    auto d = levenshtein_within(a, b, limit);
    return d && static_cast<double>(*d) <= threshold * longer + 1e-9;
}

} // namespace

bool similar_names(std::string_view a, std::string_view b, double threshold) {
    auto na = utf8::normalize_name(a);
    auto nb = utf8::normalize_name(b);
    if (na.empty() || nb.empty())
        return false;
    return within_threshold(na, nb, threshold);
}

IdentityMap resolve_identities(const std::vector<RawIdentity>& identities,
                               const ResolveOptions& options) {
    if (options.alias_threshold < 0.0 || options.alias_threshold > 1.0)
        throw Error("identity", "InvalidThreshold", "alias threshold must lie in [0,1]");

    // Distinct identities in a canonical order so the result never depends on
    // input order.
    std::vector<RawIdentity> ids(identities.begin(), identities.end());
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());

    DisjointSets sets(ids.size());
    std::map<std::string, std::size_t> by_email;
    for (std::size_t i = 0; i < ids.size(); ++i) {
        auto email = lowercase_ascii(trim(ids[i].email));
        auto [it, inserted] = by_email.emplace(email, i);
        if (!inserted)
            sets.unite(it->second, i);
    }

    for (const auto& [a, b] : options.manual_aliases) {
        auto ia = by_email.find(lowercase_ascii(trim(a)));
        auto ib = by_email.find(lowercase_ascii(trim(b)));
        if (ia != by_email.end() && ib != by_email.end())
            sets.unite(ia->second, ib->second);
    }

    // Name stage: compare distinct normalized names, shortest first, so the
    // length bound lets the inner loop stop early.
    std::map<std::u32string, std::vector<std::size_t>> by_name;
    for (std::size_t i = 0; i < ids.size(); ++i) {
        auto n = utf8::normalize_name(ids[i].name);
        if (!n.empty())
            by_name[n].push_back(i);
    }
    std::vector<std::pair<std::u32string, std::size_t>> names;
    for (const auto& [n, members] : by_name) {
        for (std::size_t k = 1; k < members.size(); ++k)
            sets.unite(members[0], members[k]);
        names.emplace_back(n, members[0]);
    }
    std::stable_sort(names.begin(), names.end(), [](const auto& x, const auto& y) {
        return x.first.size() < y.first.size();
    });
    const double t = options.alias_threshold;
    for (std::size_t i = 0; i < names.size(); ++i) {
        for (std::size_t j = i + 1; j < names.size(); ++j) {
            auto li = static_cast<double>(names[i].first.size());
            auto lj = static_cast<double>(names[j].first.size());
            if (lj - li > t * lj + 1e-9)
                break;
            if (within_threshold(names[i].first, names[j].first, t))
                sets.unite(names[i].second, names[j].second);
        }
    }

    std::map<std::size_t, DeveloperId> groups;
    for (std::size_t i = 0; i < ids.size(); ++i) {
        auto& g = groups[sets.find(i)];
        g.emails.insert(lowercase_ascii(trim(ids[i].email)));
        g.names.insert(ids[i].name);
    }
    for (auto& [root, g] : groups) {
        g.canonical_key = *g.emails.begin();
        for (const auto& n : g.names)
            if (n.size() > g.display_name.size())
                g.display_name = n;
    }

    IdentityMap result;
    for (std::size_t i = 0; i < ids.size(); ++i)
        result.emplace(ids[i], groups.at(sets.find(i)));
    return result;
}

history::CommitHistory canonicalize_history(const history::CommitHistory& history,
                                            const ResolveOptions& options) {
    std::vector<RawIdentity> authors;
    for (const auto& c : history.commits)
        authors.push_back(c.author);
    auto map = resolve_identities(authors, options);
    auto out = history;
    for (auto& c : out.commits) {
        const auto& dev = map.at(c.author);
        c.author = {dev.display_name, dev.canonical_key};
    }
    return out;
}

AliasPairs read_alias_csv(const std::filesystem::path& path) {
    AliasPairs pairs;
    for (const auto& row : csv::read_file(path.string())) {
        if (row.size() < 2)
            throw Error("identity", "MalformedAliasMap", "alias rows need two emails");
        if (pairs.empty() && lowercase_ascii(row[0]).starts_with("email"))
            continue;
        pairs.emplace_back(row[0], row[1]);
    }
    return pairs;
}

} // namespace filexpert::identity
