#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace filexpert::history {

// Seconds since the Unix epoch, UTC.
using Timestamp = std::int64_t;

struct RawIdentity {
    std::string name;
    std::string email;

    // Emails compare case-insensitively; the name is informative only when
    // emails differ, so it still participates in ordering and equality.
    friend bool operator==(const RawIdentity& a, const RawIdentity& b);
    friend bool operator<(const RawIdentity& a, const RawIdentity& b);
};

std::string lowercase_ascii(std::string_view text);

enum class ChangeKind { addition, modification, rename, deletion };

std::string_view to_string(ChangeKind kind);
ChangeKind change_kind_from_string(std::string_view text);

struct FileChangeEvent {
    std::string path;
    ChangeKind kind = ChangeKind::modification;
    std::optional<std::string> old_path;
    std::optional<std::string> before_content;
    std::optional<std::string> after_content;

    bool operator==(const FileChangeEvent&) const = default;
};

struct CommitRecord {
    std::string id;
    RawIdentity author;
    Timestamp timestamp = 0;
    std::vector<FileChangeEvent> changes;

    bool operator==(const CommitRecord&) const = default;
};

struct CommitHistory {
    std::vector<CommitRecord> commits;
    std::string branch;
    Timestamp reference_time = 0;
    // Commit id of the branch tip the history was extracted from.
    std::string tip;
    // Similarity index git used for rename detection.
    int rename_similarity = 50;

    bool operator==(const CommitHistory&) const = default;
};

// Extracts every non-merge commit reachable from `branch`, oldest first
// (parents always precede children). An empty branch name means "master",
// falling back to the repository's current HEAD branch when master is absent.
//
// Throws Error with kinds RepositoryNotFound, BranchNotFound, CorruptHistory.
CommitHistory extract_history(const std::filesystem::path& repo_path, const std::string& branch);

// Extension (lowercase, with dot) -> language tag.
using LanguageMap = std::map<std::string, std::string>;

LanguageMap default_language_map();
std::vector<std::string> default_vendor_globs();

// Language tag for `path`, or empty when the extension is not mapped.
std::string language_of(const LanguageMap& languages, std::string_view path);

// Glob match over '/'-separated paths: '*' and '?' stay within a segment,
// '**' spans any number of segments.
bool glob_match(std::string_view pattern, std::string_view path);

struct SourceFilter {
    LanguageMap languages = default_language_map();
    std::vector<std::string> excluded_globs = default_vendor_globs();

    bool accepts(std::string_view path) const;
};

// Keeps only change events on source files. A rename that crosses the filter
// boundary becomes an addition (entering) or a deletion (leaving). Commits
// left without changes are removed.
CommitHistory filter_source_files(const CommitHistory& history, const SourceFilter& filter);

// Splits text into lines on '\n'. A trailing newline does not open an extra
// empty line, so "" has zero lines and "a\n" has one.
std::vector<std::string_view> split_lines(std::string_view text);

} // namespace filexpert::history
