#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace fixture {

namespace fs = std::filesystem;

// A directory removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& prefix = "filexpert");
    ~TempDir();
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const fs::path& path() const { return path_; }

private:
    fs::path path_;
};

struct Op {
    enum Kind { write, rename, remove } kind = write;
    std::string path;
    std::string content;  // write
    std::string new_path; // rename
};

inline Op write(std::string path, std::string content) { return {Op::write, std::move(path), std::move(content), {}}; }
inline Op rename(std::string from, std::string to) { return {Op::rename, std::move(from), {}, std::move(to)}; }
inline Op remove(std::string path) { return {Op::remove, std::move(path), {}, {}}; }

struct Author {
    std::string name;
    std::string email;
};

// Builds a repository through one `git fast-import` run, so dates are exact
// and nothing depends on the working tree.
class RepoBuilder {
public:
    explicit RepoBuilder(fs::path dir, std::string default_branch = "master");

    // Returns the commit's mark. A new branch starts from `start_from`'s head.
    int commit(const Author& who, std::int64_t time, const std::vector<Op>& ops,
               const std::string& branch = "master", const std::string& start_from = {},
               const std::string& message = "change");
    // Merge commit on `into` joining the head of `from`; `ops` are applied on top.
    int merge(const Author& who, std::int64_t time, const std::string& into, const std::string& from,
              const std::vector<Op>& ops = {});

    // Runs fast-import. Throws std::runtime_error on failure.
    void finish();

    const fs::path& dir() const { return dir_; }

private:
    fs::path dir_;
    std::string stream_;
    std::map<std::string, int> heads_;
    int next_mark_ = 1;

    int emit(const Author& who, std::int64_t time, const std::vector<Op>& ops, const std::string& branch,
             const std::vector<int>& parents, const std::string& message);
};

// Runs git with the given arguments in `dir`; throws on a nonzero exit.
std::string git(const fs::path& dir, const std::vector<std::string>& args, const std::string& input = {});

} // namespace fixture
