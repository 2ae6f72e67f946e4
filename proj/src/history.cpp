#include "filexpert/history.hpp"

#include <algorithm>
#include <charconv>
#include <set>
#include <unordered_map>

#include "filexpert/error.hpp"
#include "filexpert/process.hpp"

namespace filexpert::history {

std::string lowercase_ascii(std::string_view text) {
    std::string out(text);
    for (char& c : out)
        if (c >= 'A' && c <= 'Z')
            c = static_cast<char>(c - 'A' + 'a');
    return out;
}

bool operator==(const RawIdentity& a, const RawIdentity& b) {
    return a.name == b.name && lowercase_ascii(a.email) == lowercase_ascii(b.email);
}

bool operator<(const RawIdentity& a, const RawIdentity& b) {
    auto ea = lowercase_ascii(a.email), eb = lowercase_ascii(b.email);
    if (ea != eb)
        return ea < eb;
    return a.name < b.name;
}

std::string_view to_string(ChangeKind kind) {
    switch (kind) {
    case ChangeKind::addition:
        return "addition";
    case ChangeKind::modification:
        return "modification";
    case ChangeKind::rename:
        return "rename";
    case ChangeKind::deletion:
        return "deletion";
    }
    return "modification";
}

ChangeKind change_kind_from_string(std::string_view text) {
    if (text == "addition")
        return ChangeKind::addition;
    if (text == "modification")
        return ChangeKind::modification;
    if (text == "rename")
        return ChangeKind::rename;
    if (text == "deletion")
        return ChangeKind::deletion;
    throw Error("history", "CorruptHistory", "unknown change kind '" + std::string(text) + "'");
}

std::vector<std::string_view> split_lines(std::string_view text) {
    std::vector<std::string_view> lines;
    std::size_t start = 0;
    while (start < text.size()) {
        auto nl = text.find('\n', start);
        if (nl == std::string_view::npos) {
            lines.push_back(text.substr(start));
            break;
        }
        lines.push_back(text.substr(start, nl - start));
        start = nl + 1;
    }
    return lines;
}

namespace {

constexpr std::string_view null_sha = "0000000000000000000000000000000000000000";

process::Result git(const std::filesystem::path& repo, std::vector<std::string> args,
                    std::string_view input = {}) {
    args.insert(args.begin(), {"git", "-c", "core.quotepath=off", "-C", repo.string()});
    return process::run(args, {}, input);
}

bool ref_exists(const std::filesystem::path& repo, const std::string& ref) {
    auto r = git(repo, {"rev-parse", "--verify", "--quiet", ref + "^{commit}"});
    return r.exit_code == 0;
}

std::string resolve_branch(const std::filesystem::path& repo, const std::string& branch) {
    if (!branch.empty()) {
        if (ref_exists(repo, branch))
            return branch;
        if (branch != "master")
            throw Error("history", "BranchNotFound", "branch '" + branch + "' not found");
    } else if (ref_exists(repo, "master")) {
        return "master";
    }
    auto head = git(repo, {"symbolic-ref", "--quiet", "--short", "HEAD"});
    std::string name = head.out;
    while (!name.empty() && (name.back() == '\n' || name.back() == '\r'))
        name.pop_back();
    if (head.exit_code != 0 || name.empty() || !ref_exists(repo, name))
        throw Error("history", "BranchNotFound",
                    "branch '" + (branch.empty() ? std::string("master") : branch) +
                        "' not found and no default branch to fall back to");
    return name;
}

Timestamp parse_timestamp(std::string_view text) {
    Timestamp value = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size())
        throw Error("history", "CorruptHistory", "bad timestamp '" + std::string(text) + "'");
    return value;
}

struct RawEntry {
    std::string src_mode, dst_mode, src_sha, dst_sha;
    char status = 'M';
    std::string path, old_path;
};

struct RawCommit {
    std::string id;
    RawIdentity author;
    Timestamp timestamp = 0;
    std::vector<RawEntry> entries;
};

std::vector<std::string_view> split_nul(std::string_view chunk) {
    std::vector<std::string_view> tokens;
    std::size_t start = 0;
    while (start <= chunk.size()) {
        auto pos = chunk.find('\0', start);
        if (pos == std::string_view::npos) {
            tokens.push_back(chunk.substr(start));
            break;
        }
        tokens.push_back(chunk.substr(start, pos - start));
        start = pos + 1;
    }
    return tokens;
}

std::string_view trim_newlines(std::string_view s) {
    while (!s.empty() && (s.front() == '\n' || s.front() == '\r'))
        s.remove_prefix(1);
    while (!s.empty() && (s.back() == '\n' || s.back() == '\r'))
        s.remove_suffix(1);
    return s;
}

std::vector<RawCommit> parse_log(std::string_view out) {
    std::vector<RawCommit> commits;
    std::size_t pos = 0;
    while (pos < out.size()) {
        auto start = out.find('\x01', pos);
        if (start == std::string_view::npos)
            break;
        auto end = out.find('\x01', start + 1);
        auto chunk = out.substr(start + 1, end == std::string_view::npos ? std::string_view::npos
                                                                           : end - start - 1);
        pos = end == std::string_view::npos ? out.size() : end;

        auto tokens = split_nul(chunk);
        if (tokens.size() < 5)
            throw Error("history", "CorruptHistory", "truncated commit header in git log output");
        RawCommit c;
        c.id = std::string(tokens[0]);
        c.author = {std::string(tokens[1]), std::string(tokens[2])};
        c.timestamp = parse_timestamp(tokens[3]);
        std::size_t i = 5;
        while (i < tokens.size()) {
            auto meta = trim_newlines(tokens[i]);
            if (meta.empty()) {
                ++i;
                continue;
            }
            if (meta.front() != ':' || i + 1 >= tokens.size())
                throw Error("history", "CorruptHistory",
                            "unexpected raw diff entry in commit " + c.id);
            // ":<src mode> <dst mode> <src sha> <dst sha> <status>"
            RawEntry e;
            std::string fields[5];
            std::size_t f = 0, from = 1;
            for (std::size_t k = 1; k <= meta.size() && f < 5; ++k) {
                if (k == meta.size() || meta[k] == ' ') {
                    fields[f++] = std::string(meta.substr(from, k - from));
                    from = k + 1;
                }
            }
            if (f != 5 || fields[4].empty())
                throw Error("history", "CorruptHistory", "malformed raw entry in commit " + c.id);
            e.src_mode = fields[0];
            e.dst_mode = fields[1];
            e.src_sha = fields[2];
            e.dst_sha = fields[3];
            e.status = fields[4][0];
            if (e.status == 'R' || e.status == 'C') {
                if (i + 2 >= tokens.size())
                    throw Error("history", "CorruptHistory", "truncated rename in commit " + c.id);
                e.old_path = std::string(tokens[i + 1]);
                e.path = std::string(tokens[i + 2]);
                i += 3;
            } else {
                e.path = std::string(tokens[i + 1]);
                i += 2;
            }
            c.entries.push_back(std::move(e));
        }
        commits.push_back(std::move(c));
    }
    return commits;
}

bool is_regular_file_mode(std::string_view mode) {
    return mode == "100644" || mode == "100755" || mode == "100664";
}

// Reads all requested blobs through a single `git cat-file --batch` call.
std::unordered_map<std::string, std::string> read_blobs(const std::filesystem::path& repo,
                                                        const std::set<std::string>& shas) {
    std::unordered_map<std::string, std::string> blobs;
    if (shas.empty())
        return blobs;
    std::string request;
    for (const auto& sha : shas) {
        request += sha;
        request += '\n';
    }
    auto r = git(repo, {"cat-file", "--batch"}, request);
    if (r.exit_code != 0)
        throw Error("history", "CorruptHistory", "git cat-file failed: " + r.err);

    std::string_view out = r.out;
    std::size_t pos = 0;
    for (std::size_t n = 0; n < shas.size(); ++n) {
        auto nl = out.find('\n', pos);
        if (nl == std::string_view::npos)
            throw Error("history", "CorruptHistory", "truncated cat-file output");
        auto header = out.substr(pos, nl - pos);
        pos = nl + 1;
        if (header.ends_with(" missing"))
            throw Error("history", "CorruptHistory",
                        "unreadable object " + std::string(header.substr(0, header.find(' '))));
        auto sp1 = header.find(' ');
        auto sp2 = header.rfind(' ');
        if (sp1 == std::string_view::npos || sp2 == sp1)
            throw Error("history", "CorruptHistory", "malformed cat-file header");
        std::size_t size = 0;
        auto size_text = header.substr(sp2 + 1);
        std::from_chars(size_text.data(), size_text.data() + size_text.size(), size);
        if (pos + size > out.size())
            throw Error("history", "CorruptHistory", "truncated blob in cat-file output");
        blobs.emplace(std::string(header.substr(0, sp1)), std::string(out.substr(pos, size)));
        pos += size + 1;
    }
    return blobs;
}

} // namespace

CommitHistory extract_history(const std::filesystem::path& repo_path, const std::string& branch) {
    std::error_code ec;
    if (!std::filesystem::is_directory(repo_path, ec))
        throw Error("history", "RepositoryNotFound", "no such directory: " + repo_path.string());
    auto probe = git(repo_path, {"rev-parse", "--git-dir"});
    if (probe.exit_code != 0)
        throw Error("history", "RepositoryNotFound", "not a git repository: " + repo_path.string());

    CommitHistory history;
    history.branch = resolve_branch(repo_path, branch);

    auto tip = git(repo_path, {"log", "-1", "--format=%H%x00%at", history.branch, "--"});
    if (tip.exit_code != 0)
        throw Error("history", "CorruptHistory", "cannot read branch tip: " + tip.err);
    auto tip_fields = split_nul(trim_newlines(tip.out));
    if (tip_fields.size() != 2)
        throw Error("history", "CorruptHistory", "cannot read branch tip");
    history.tip = std::string(tip_fields[0]);
    history.reference_time = parse_timestamp(tip_fields[1]);

    auto log = git(repo_path, {"log", "--no-merges", "--topo-order", "--reverse", "--root", "-M",
                               "--raw", "-z", "--no-abbrev", "--no-color",
                               "--format=%x01%H%x00%an%x00%ae%x00%at%x00%P", history.tip, "--"});
    if (log.exit_code != 0)
        throw Error("history", "CorruptHistory", "git log failed: " + log.err);
    auto raw = parse_log(log.out);

    std::set<std::string> wanted;
    for (const auto& c : raw) {
        for (const auto& e : c.entries) {
            if (e.src_sha != null_sha && is_regular_file_mode(e.src_mode))
                wanted.insert(e.src_sha);
            if (e.dst_sha != null_sha && is_regular_file_mode(e.dst_mode))
                wanted.insert(e.dst_sha);
        }
    }
    auto blobs = read_blobs(repo_path, wanted);
    auto blob = [&](const std::string& sha) -> std::optional<std::string> {
        auto it = blobs.find(sha);
        if (it == blobs.end())
            return std::nullopt;
        return it->second;
    };

    for (auto& rc : raw) {
        CommitRecord record;
        record.id = std::move(rc.id);
        record.author = std::move(rc.author);
        if (record.author.email.find_first_not_of(" \t") == std::string::npos)
            record.author.email = "unknown+" + lowercase_ascii(record.author.name);
        record.timestamp = rc.timestamp;
        for (auto& e : rc.entries) {
            bool src_file = is_regular_file_mode(e.src_mode);
            bool dst_file = is_regular_file_mode(e.dst_mode);
            FileChangeEvent ev;
            ev.path = e.path;
            switch (e.status) {
            case 'A':
                if (!dst_file)
                    continue;
                ev.kind = ChangeKind::addition;
                ev.after_content = blob(e.dst_sha);
                break;
            case 'D':
                if (!src_file)
                    continue;
                ev.kind = ChangeKind::deletion;
                ev.before_content = blob(e.src_sha);
                break;
            case 'R':
                if (!dst_file)
                    continue;
                ev.kind = ChangeKind::rename;
                ev.old_path = e.old_path;
                ev.before_content = blob(e.src_sha);
                ev.after_content = blob(e.dst_sha);
                break;
            case 'C':
                if (!dst_file)
                    continue;
                ev.kind = ChangeKind::addition;
                ev.after_content = blob(e.dst_sha);
                break;
            default:
                // M and T; a symlink or submodule turning into a file is an addition.
                if (!dst_file && !src_file)
                    continue;
                if (!dst_file) {
                    ev.kind = ChangeKind::deletion;
                    ev.before_content = blob(e.src_sha);
                } else if (!src_file) {
                    ev.kind = ChangeKind::addition;
                    ev.after_content = blob(e.dst_sha);
                } else {
                    ev.kind = ChangeKind::modification;
                    ev.before_content = blob(e.src_sha);
                    ev.after_content = blob(e.dst_sha);
                }
            }
            record.changes.push_back(std::move(ev));
        }
        history.commits.push_back(std::move(record));
    }

    for (const auto& c : history.commits)
        history.reference_time = std::max(history.reference_time, c.timestamp);
    return history;
}

LanguageMap default_language_map() {
    return {
        {".py", "Python"},      {".pyw", "Python"},     {".java", "Java"},
        {".rb", "Ruby"},        {".rake", "Ruby"},      {".js", "JavaScript"},
        {".jsx", "JavaScript"}, {".mjs", "JavaScript"}, {".cjs", "JavaScript"},
        {".php", "PHP"},        {".cpp", "C++"},        {".cc", "C++"},
        {".cxx", "C++"},        {".c++", "C++"},        {".hpp", "C++"},
        {".hh", "C++"},         {".hxx", "C++"},        {".h++", "C++"},
        {".ipp", "C++"},        {".c", "C"},            {".h", "C"},
    };
}

std::vector<std::string> default_vendor_globs() {
    return {"vendor/**", "node_modules/**", "third_party/**"};
}

std::string language_of(const LanguageMap& languages, std::string_view path) {
    auto slash = path.rfind('/');
    auto name = slash == std::string_view::npos ? path : path.substr(slash + 1);
    auto dot = name.rfind('.');
    if (dot == std::string_view::npos || dot == 0)
        return {};
    auto it = languages.find(lowercase_ascii(name.substr(dot)));
    return it == languages.end() ? std::string() : it->second;
}

bool glob_match(std::string_view pattern, std::string_view path) {
    if (pattern.empty())
        return path.empty();
    if (pattern.starts_with("**")) {
        auto rest = pattern.substr(2);
        if (rest.starts_with('/'))
            rest.remove_prefix(1);
        if (rest.empty())
            return true;
        // '**/' matches zero or more leading segments.
        if (glob_match(rest, path))
            return true;
        for (std::size_t i = 0; i < path.size(); ++i)
            if (path[i] == '/' && glob_match(rest, path.substr(i + 1)))
                return true;
        return false;
    }
    if (pattern.front() == '*') {
        for (std::size_t i = 0; i <= path.size(); ++i) {
            if (glob_match(pattern.substr(1), path.substr(i)))
                return true;
            if (i < path.size() && path[i] == '/')
                break;
        }
        return false;
    }
    if (path.empty())
        return false;
    if (pattern.front() == '?')
        return path.front() != '/' && glob_match(pattern.substr(1), path.substr(1));
    return pattern.front() == path.front() && glob_match(pattern.substr(1), path.substr(1));
}

bool SourceFilter::accepts(std::string_view path) const {
    if (language_of(languages, path).empty())
        return false;
    for (const auto& g : excluded_globs) {
        if (glob_match(g, path))
            return false;
        // Vendored directories nested anywhere, e.g. "web/node_modules/x.js".
        if (!g.starts_with("**/") && glob_match("**/" + g, path))
            return false;
    }
    return true;
}

CommitHistory filter_source_files(const CommitHistory& history, const SourceFilter& filter) {
    CommitHistory out;
    out.branch = history.branch;
    out.reference_time = history.reference_time;
    out.tip = history.tip;
    out.rename_similarity = history.rename_similarity;
    for (const auto& commit : history.commits) {
        CommitRecord kept{commit.id, commit.author, commit.timestamp, {}};
        for (const auto& ev : commit.changes) {
            bool keep_new = filter.accepts(ev.path);
            if (ev.kind != ChangeKind::rename) {
                if (keep_new)
                    kept.changes.push_back(ev);
                continue;
            }
            bool keep_old = filter.accepts(*ev.old_path);
            if (keep_new && keep_old) {
                kept.changes.push_back(ev);
            } else if (keep_new) {
                kept.changes.push_back(
                    {ev.path, ChangeKind::addition, std::nullopt, std::nullopt, ev.after_content});
            } else if (keep_old) {
                kept.changes.push_back(
                    {*ev.old_path, ChangeKind::deletion, std::nullopt, ev.before_content, std::nullopt});
            }
        }
        if (!kept.changes.empty())
            out.commits.push_back(std::move(kept));
    }
    return out;
}

} // namespace filexpert::history
