#include "filexpert/features.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <set>

#include "filexpert/blame.hpp"
#include "filexpert/csv.hpp"
#include "filexpert/error.hpp"
#include "filexpert/lineage.hpp"

namespace filexpert::features {

using history::CommitHistory;
using history::Lineage;

namespace {

constexpr double seconds_per_day = 86400.0;

struct DeveloperActivity {
    diff::ChangeStats stats;
    std::vector<history::Timestamp> timestamps;
    std::size_t last_event = 0; // position in the lineage's event list
};

// Per-developer features for one live lineage, keyed by canonical key.
std::map<std::string, FeatureVector> lineage_features(const Lineage& lineage,
                                                      history::Timestamp reference_time,
                                                      const FeatureOptions& options) {
    const diff::LanguageRules* rules = nullptr;
    auto language = history::language_of(options.languages, lineage.path);
    if (options.keywords && !language.empty() && options.keywords->has(language))
        rules = &options.keywords->rules(language);

    std::map<std::string, DeveloperActivity> activity;
    diff::BlameTracker blame;
    for (std::size_t pos = 0; pos < lineage.events.size(); ++pos) {
        const auto& ev = lineage.events[pos];
        const auto& author = ev.commit->author.email;
        std::string_view before =
            ev.change->before_content ? std::string_view(*ev.change->before_content) : "";
        std::string_view after =
            ev.change->after_content ? std::string_view(*ev.change->after_content) : "";

        // On linear history the tracked version is the commit's parent
        // version, so the blame diff doubles as the change diff.
        std::string_view tracked = blame.text();
        bool same_base = tracked == before;
        auto hunks = blame.advance(after, author);
        if (!same_base)
            hunks = diff::line_diff(before, after);

        auto& act = activity[author];
        act.stats += diff::classify_changes(hunks, options.mod_threshold, rules);
        act.timestamps.push_back(ev.commit->timestamp);
        act.last_event = pos;
    }

    const auto counts = blame.state().line_counts();
    const long size = static_cast<long>(blame.state().loc());
    const auto& creator = lineage.creator();

    std::map<std::string, FeatureVector> out;
    for (auto& [dev, act] : activity) {
        FeatureVector f;
        f.adds = act.stats.adds;
        f.dels = act.stats.dels;
        f.mods = act.stats.mods;
        f.conds = act.stats.conds;
        f.amount = f.adds + f.dels;
        f.fa = dev == creator ? 1 : 0;
        if (auto it = counts.find(dev); it != counts.end())
            f.blame = it->second;
        f.num_commits = static_cast<long>(act.timestamps.size());

        auto sorted = act.timestamps;
        std::sort(sorted.begin(), sorted.end());
        auto age = static_cast<double>(reference_time - sorted.back());
        f.num_days = std::max(0.0, std::floor(age / seconds_per_day));
        if (sorted.size() > 1)
            f.avg_days_commits = static_cast<double>(sorted.back() - sorted.front()) /
                                 seconds_per_day / static_cast<double>(sorted.size() - 1);

        std::set<std::string> later;
        for (std::size_t pos = act.last_event + 1; pos < lineage.events.size(); ++pos) {
            const auto& other = lineage.events[pos].commit->author.email;
            if (other != dev)
                later.insert(other);
        }
        f.num_mod_devs = static_cast<long>(later.size());
        f.size = size;
        out.emplace(dev, f);
    }
    return out;
}

} // namespace

const FeatureRow* FeatureTable::find(std::string_view developer, std::string_view file) const {
    auto it = std::lower_bound(rows.begin(), rows.end(), std::pair(file, developer),
                               [](const FeatureRow& r, const auto& key) {
                                   return std::pair<std::string_view, std::string_view>(r.file, r.developer) < key;
                               });
    if (it != rows.end() && it->file == file && it->developer == developer)
        return &*it;
    return nullptr;
}

long FeatureTable::total_commits(std::string_view file) const {
    long total = 0;
    for (const auto& r : rows)
        if (r.file == file)
            total += r.features.num_commits;
    return total;
}

FeatureVector compute_features(const CommitHistory& history, std::string_view developer,
                               std::string_view file, const FeatureOptions& options) {
    auto index = history::build_lineages(history);
    const auto* lineage = index.find_live(file);
    if (lineage) {
        auto all = lineage_features(*lineage, history.reference_time, options);
        if (auto it = all.find(std::string(developer)); it != all.end())
            return it->second;
    }
    throw Error("features", "PairNotInHistory",
                "developer '" + std::string(developer) + "' has no commits on '" +
                    std::string(file) + "'");
}

FeatureTable compute_all(const CommitHistory& history, const FeatureOptions& options) {
    FeatureTable table;
    table.reference_time = history.reference_time;
    auto index = history::build_lineages(history);
    // `live` is ordered by path, and each per-lineage map by developer key.
    for (const auto& [path, li] : index.live) {
        for (auto& [dev, f] : lineage_features(index.lineages[li], history.reference_time, options))
            table.rows.push_back({dev, path, f});
    }
    return table;
}

std::string format_number(double value) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, ptr);
}

void write_csv(std::ostream& out, const FeatureTable& table) {
    out << csv_header << '\n';
    for (const auto& r : table.rows) {
        const auto& f = r.features;
        csv::write_row(out, {r.developer, r.file, std::to_string(f.adds), std::to_string(f.dels),
                             std::to_string(f.mods), std::to_string(f.conds),
                             std::to_string(f.amount), std::to_string(f.fa),
                             std::to_string(f.blame), std::to_string(f.num_commits),
                             format_number(f.num_days), std::to_string(f.num_mod_devs),
                             std::to_string(f.size), format_number(f.avg_days_commits)});
    }
}

FeatureTable read_csv(std::istream& in) {
    auto rows = csv::parse(in);
    if (rows.empty())
        throw Error("features", "MalformedFeatureCsv", "missing header");
    std::string header;
    for (std::size_t i = 0; i < rows[0].size(); ++i)
        header += (i ? "," : "") + rows[0][i];
    if (header != csv_header)
        throw Error("features", "MalformedFeatureCsv", "unexpected header: " + header);

    auto to_long = [](const std::string& s) {
        long v = 0;
        auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc() || p != s.data() + s.size())
            throw Error("features", "MalformedFeatureCsv", "bad integer '" + s + "'");
        return v;
    };
    auto to_double = [](const std::string& s) {
        double v = 0;
        auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc() || p != s.data() + s.size())
            throw Error("features", "MalformedFeatureCsv", "bad number '" + s + "'");
        return v;
    };

    FeatureTable table;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto& r = rows[i];
        if (r.size() != 14)
            throw Error("features", "MalformedFeatureCsv", "row " + std::to_string(i) + " has " +
                                                               std::to_string(r.size()) + " fields");
        FeatureVector f;
        f.adds = to_long(r[2]);
        f.dels = to_long(r[3]);
        f.mods = to_long(r[4]);
        f.conds = to_long(r[5]);
        f.amount = to_long(r[6]);
        f.fa = static_cast<int>(to_long(r[7]));
        f.blame = to_long(r[8]);
        f.num_commits = to_long(r[9]);
        f.num_days = to_double(r[10]);
        f.num_mod_devs = to_long(r[11]);
        f.size = to_long(r[12]);
        f.avg_days_commits = to_double(r[13]);
        table.rows.push_back({r[0], r[1], f});
    }
    std::sort(table.rows.begin(), table.rows.end(), [](const auto& a, const auto& b) {
        return std::tie(a.file, a.developer) < std::tie(b.file, b.developer);
    });
    return table;
}

} // namespace filexpert::features
