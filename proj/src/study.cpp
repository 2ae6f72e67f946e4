#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <memory>

#include <json.hpp>

#include "filexpert/csv.hpp"
#include "filexpert/error.hpp"
#include "filexpert/folds.hpp"
#include "filexpert/lineage.hpp"
#include "filexpert/study.hpp"

namespace filexpert::study {

RepoMetrics metrics_of(const std::string& repo, const history::CommitHistory& history) {
    std::set<std::string> authors;
    for (const auto& c : history.commits)
        authors.insert(c.author.email);
    auto index = history::build_lineages(history);
    return {repo, static_cast<long>(history.commits.size()), static_cast<long>(index.live.size()),
            static_cast<long>(authors.size())};
}

double quantile(std::vector<double> values, double q) {
    if (values.empty())
        throw Error("study", "EmptyDistribution", "quantile of an empty distribution");
    std::sort(values.begin(), values.end());
    const double h = q * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const auto hi = std::min(lo + 1, values.size() - 1);
    return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

std::vector<RepoMetrics> quartile_filter(const std::vector<RepoMetrics>& metrics) {
    if (metrics.size() < 4)
        throw Error("study", "TooFewRepos",
                    "quartile filtering needs at least 4 repositories, got " + std::to_string(metrics.size()));
    std::vector<double> commits, files, devs;
    for (const auto& m : metrics) {
        commits.push_back(static_cast<double>(m.commits));
        files.push_back(static_cast<double>(m.files));
        devs.push_back(static_cast<double>(m.developers));
    }
    const double qc = quantile(commits, 0.25), qf = quantile(files, 0.25), qd = quantile(devs, 0.25);
    std::vector<RepoMetrics> out;
    for (const auto& m : metrics)
        if (static_cast<double>(m.commits) >= qc && static_cast<double>(m.files) >= qf &&
            static_cast<double>(m.developers) >= qd)
            out.push_back(m);
    return out;
}

namespace {

long parse_long(const std::string& text, const std::string& what) {
    long value = 0;
    const auto* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc{} || ptr != end)
        throw Error("study", "MalformedMetrics", what + ": '" + text + "' is not an integer");
    return value;
}

std::size_t column_of(const csv::Row& header, const std::string& name) {
    auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end())
        throw Error("study", "MissingColumn", "no '" + name + "' column");
    return static_cast<std::size_t>(it - header.begin());
}

} // namespace

std::vector<RepoMetrics> read_metrics_csv(const std::string& path) {
    auto rows = csv::read_file(path);
    if (rows.empty())
        throw Error("study", "MissingColumn", path + " has no header");
    const auto& h = rows.front();
    const auto r = column_of(h, "repo"), c = column_of(h, "commits"), f = column_of(h, "files"),
               d = column_of(h, "developers");
    std::vector<RepoMetrics> out;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto& row = rows[i];
        if (row.size() < h.size())
            throw Error("study", "MalformedMetrics", "row " + std::to_string(i + 1) + " is short");
        out.push_back({row[r], parse_long(row[c], "commits"), parse_long(row[f], "files"),
                       parse_long(row[d], "developers")});
    }
    return out;
}

void write_metrics_csv(std::ostream& out, const std::vector<RepoMetrics>& metrics) {
    csv::write_row(out, {"repo", "commits", "files", "developers"});
    for (const auto& m : metrics)
        csv::write_row(out, {m.repo, std::to_string(m.commits), std::to_string(m.files),
                             std::to_string(m.developers)});
}

BulkImport detect_bulk_import(const history::CommitHistory& history) {
    BulkImport out;
    std::vector<std::pair<const history::CommitRecord*, long>> adding;
    for (const auto& c : history.commits) {
        long added = 0;
        for (const auto& ch : c.changes)
            added += ch.kind == history::ChangeKind::addition;
        if (added > 0)
            adding.emplace_back(&c, added);
        out.files_added += added;
    }
    if (adding.empty())
        return out;
    std::vector<double> counts;
    for (const auto& [c, n] : adding)
        counts.push_back(static_cast<double>(n));
    const double q1 = quantile(counts, 0.25), q3 = quantile(counts, 0.75);
    out.fence = q3 + 1.5 * (q3 - q1);
    for (const auto& [c, n] : adding)
        if (static_cast<double>(n) > out.fence) {
            out.outlier_commits.insert(c->id);
            out.outlier_files_added += n;
        }
    out.flagged = 2 * out.outlier_files_added > out.files_added;
    return out;
}

std::vector<SamplePair> generate_sample(const history::CommitHistory& history, std::size_t file_limit,
                                        std::uint64_t seed) {
    if (file_limit < 1)
        throw Error("study", "InvalidLimit", "file limit must be at least 1");
    auto index = history::build_lineages(history);
    // Live files in path order, each with its distinct developers.
    std::vector<std::pair<std::string, std::set<std::string>>> files;
    for (const auto& [path, i] : index.live) {
        std::set<std::string> devs;
        for (const auto& e : index.lineages[i].events)
            devs.insert(e.commit->author.email);
        files.emplace_back(path, std::move(devs));
    }
    SeededRng rng(seed);
    rng.shuffle(files);

    std::map<std::string, std::vector<std::string>> assigned;
    for (const auto& [path, devs] : files) {
        bool accept = std::all_of(devs.begin(), devs.end(), [&](const auto& d) {
            auto it = assigned.find(d);
            return it == assigned.end() || it->second.size() < file_limit;
        });
        if (!accept)
            continue;
        for (const auto& d : devs)
            assigned[d].push_back(path);
    }
    std::vector<SamplePair> out;
    for (auto& [dev, paths] : assigned) {
        std::sort(paths.begin(), paths.end());
        for (const auto& p : paths)
            out.push_back({dev, p});
    }
    return out;
}

ColumnMapping ColumnMapping::from_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw Error("study", "FileNotFound", "cannot open column mapping " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw Error("study", "MalformedMapping", path + ": " + e.what());
    }
    ColumnMapping m;
    auto take = [&](const char* key, std::string& field) {
        if (j.contains(key))
            field = j.at(key).get<std::string>();
    };
    take("repo", m.repo);
    take("developer_email", m.developer_email);
    take("file", m.file);
    take("knowledge", m.knowledge);
    return m;
}

std::vector<RawAnswer> read_ground_truth(const std::string& path, const ColumnMapping& mapping) {
    auto rows = csv::read_file(path);
    if (rows.empty())
        throw Error("study", "MissingColumn", path + " has no header");
    const auto& h = rows.front();
    const auto r = column_of(h, mapping.repo), e = column_of(h, mapping.developer_email),
               f = column_of(h, mapping.file), k = column_of(h, mapping.knowledge);
    std::vector<RawAnswer> out;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto& row = rows[i];
        if (row.size() < h.size())
            throw Error("study", "MalformedGroundTruth", "row " + std::to_string(i + 1) + " is short");
        long knowledge = 0;
        const auto& cell = row[k];
        const auto* end = cell.data() + cell.size();
        auto [ptr, ec] = std::from_chars(cell.data(), end, knowledge);
        if (cell.empty() || ec != std::errc{} || ptr != end)
            throw Error("study", "InvalidKnowledgeValue",
                        "row " + std::to_string(i + 1) + ": knowledge '" + cell + "' is not an integer");
        out.push_back({row[r], row[e], row[f], knowledge, i + 1});
    }
    return out;
}

Resolver email_resolver(const identity::IdentityMap& identities) {
    auto keys = std::make_shared<std::map<std::string, std::string>>();
    for (const auto& [raw, dev] : identities)
        for (const auto& email : dev.emails)
            keys->emplace(email, dev.canonical_key);
    return [keys](const std::string& email) -> std::optional<std::string> {
        auto it = keys->find(history::lowercase_ascii(email));
        if (it == keys->end())
            return std::nullopt;
        return it->second;
    };
}

AnswerReport process_answers(const std::vector<RawAnswer>& answers, const features::FeatureTable& table,
                             const Resolver& resolve) {
    for (const auto& a : answers)
        if (a.knowledge < 1 || a.knowledge > 5)
            throw Error("study", "InvalidKnowledgeValue",
                        "line " + std::to_string(a.line) + ": knowledge " + std::to_string(a.knowledge) +
                            " is outside 1..5");
    AnswerReport report;
    report.dataset = ml::make_expertise_dataset();
    for (const auto& a : answers) {
        const auto where = "line " + std::to_string(a.line) + ": " + a.developer_email + ", " + a.file;
        auto key = resolve(a.developer_email);
        const features::FeatureRow* row = key ? table.find(*key, a.file) : nullptr;
        if (!row) {
            report.unresolved.push_back(where);
            continue;
        }
        expertise::Pair pair{*key, a.file};
        if (report.oracle.declared_experts.count(pair) || report.oracle.declared_non_experts.count(pair)) {
            report.duplicates.push_back(where);
            continue;
        }
        const bool expert = is_expert_answer(a.knowledge);
        (expert ? report.oracle.declared_experts : report.oracle.declared_non_experts).insert(pair);
        report.entries.push_back({a.repo, *key, a.file, a.knowledge, expert});
        report.dataset.rows.push_back({ml::expertise_features(row->features), expert ? 1 : 0, *key, a.file});
        report.knowledge.push_back(static_cast<double>(a.knowledge));
    }
    return report;
}

} // namespace filexpert::study
