#pragma once

#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "filexpert/changes.hpp"
#include "filexpert/conditionals.hpp"
#include "filexpert/history.hpp"

namespace filexpert::features {

// Development variables of one developer on one file at the reference version.
struct FeatureVector {
    long adds = 0;
    long dels = 0;
    long mods = 0;
    long conds = 0;
    long amount = 0; // adds + dels
    int fa = 0;      // developer created the file
    long blame = 0;  // surviving lines authored by the developer
    long num_commits = 0;
    double num_days = 0.0; // whole days since the developer's last commit
    long num_mod_devs = 0; // distinct others committing after that commit
    long size = 0;         // lines at the reference version, blanks included
    double avg_days_commits = 0.0;

    bool operator==(const FeatureVector&) const = default;
};

struct FeatureRow {
    std::string developer; // canonical key
    std::string file;      // path at the reference version
    FeatureVector features;

    bool operator==(const FeatureRow&) const = default;
};

struct FeatureTable {
    std::vector<FeatureRow> rows; // ordered by (file, developer)
    history::Timestamp reference_time = 0;

    const FeatureRow* find(std::string_view developer, std::string_view file) const;
    // Commits on `file` by everyone, i.e. the sum of num_commits.
    long total_commits(std::string_view file) const;
};

struct FeatureOptions {
    double mod_threshold = diff::default_mod_threshold;
    const diff::KeywordTable* keywords = &diff::KeywordTable::defaults();
    history::LanguageMap languages = history::default_language_map();
};

// Throws Error("features", "PairNotInHistory") when the developer never
// touched the file's lineage or the file is gone at the reference version.
FeatureVector compute_features(const history::CommitHistory& history, std::string_view developer,
                               std::string_view file, const FeatureOptions& options = {});

FeatureTable compute_all(const history::CommitHistory& history, const FeatureOptions& options = {});

inline constexpr std::string_view csv_header =
    "developer,file,adds,dels,mods,conds,amount,fa,blame,num_commits,num_days,num_mod_devs,"
    "size,avg_days_commits";

void write_csv(std::ostream& out, const FeatureTable& table);
FeatureTable read_csv(std::istream& in);

// Shortest decimal form that reads back to the same double.
std::string format_number(double value);

} // namespace filexpert::features
