#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <vector>

#include "filexpert/expertise.hpp"
#include "filexpert/features.hpp"
#include "filexpert/history.hpp"
#include "filexpert/identity.hpp"
#include "filexpert/ml.hpp"

namespace filexpert::study {

struct RepoMetrics {
    std::string repo;
    long commits = 0;
    long files = 0;
    long developers = 0;
};

// Commits, live files at the reference version and distinct authors.
RepoMetrics metrics_of(const std::string& repo, const history::CommitHistory& history);

// Type-7 quantile (linear interpolation between order statistics), q in [0, 1].
double quantile(std::vector<double> values, double q);

// Drops every repo below the first quartile of any metric.
// Throws Error("study", "TooFewRepos") for fewer than 4 repos.
std::vector<RepoMetrics> quartile_filter(const std::vector<RepoMetrics>& metrics);

// repo,commits,files,developers
std::vector<RepoMetrics> read_metrics_csv(const std::string& path);
void write_metrics_csv(std::ostream& out, const std::vector<RepoMetrics>& metrics);

struct BulkImport {
    bool flagged = false;
    std::set<std::string> outlier_commits;
    double fence = 0.0;
    long files_added = 0;
    long outlier_files_added = 0;
};

// Tukey upper fence over files added per commit, counting commits that add
// at least one file. Flags the history when outliers added over half the files.
BulkImport detect_bulk_import(const history::CommitHistory& history);

struct SamplePair {
    std::string developer;
    std::string file;
    bool operator==(const SamplePair&) const = default;
};

// Visits live files in seeded random order and accepts a file only when all
// of its developers are still under `file_limit`. Output is grouped by developer.
// Throws Error("study", "InvalidLimit") for a limit below 1.
std::vector<SamplePair> generate_sample(const history::CommitHistory& history, std::size_t file_limit = 5,
                                        std::uint64_t seed = 0);

struct RawAnswer {
    std::string repo;
    std::string developer_email;
    std::string file;
    long knowledge = 0;
    std::size_t line = 0; // 1-based row in the source CSV
};

// Header names for the four ground-truth columns.
struct ColumnMapping {
    std::string repo = "repo";
    std::string developer_email = "developer_email";
    std::string file = "file";
    std::string knowledge = "knowledge";

    // {"repo": "...", "developer_email": "...", ...}; missing keys keep defaults.
    static ColumnMapping from_json_file(const std::string& path);
};

// Throws Error("study", "MissingColumn") or Error("study", "InvalidKnowledgeValue")
// when a knowledge cell is not an integer.
std::vector<RawAnswer> read_ground_truth(const std::string& path, const ColumnMapping& mapping = {});

struct GroundTruthEntry {
    std::string repo;
    std::string developer; // canonical key
    std::string file;
    long knowledge = 0;
    bool expert = false;
};

inline bool is_expert_answer(long knowledge) { return knowledge > 3; }

// Maps an answer's email to the developer key used in the feature table.
using Resolver = std::function<std::optional<std::string>(const std::string& email)>;
Resolver email_resolver(const identity::IdentityMap& identities);

struct AnswerReport {
    std::vector<GroundTruthEntry> entries;
    expertise::OracleSets oracle;
    ml::Dataset dataset;
    std::vector<double> knowledge; // aligned with dataset rows
    std::vector<std::string> unresolved; // "line N: email, file"
    std::vector<std::string> duplicates;
};

// Joins answers with their feature vectors. Unknown developers or files are
// reported in `unresolved`; a repeated pair keeps its first answer.
// Throws Error("study", "InvalidKnowledgeValue") for knowledge outside 1..5.
AnswerReport process_answers(const std::vector<RawAnswer>& answers, const features::FeatureTable& table,
                             const Resolver& resolve);

} // namespace filexpert::study
