#include "fixture.hpp"

#include <cstdlib>
#include <stdexcept>

#include "filexpert/process.hpp"

namespace fixture {

TempDir::TempDir(const std::string& prefix) {
    auto pattern = (fs::temp_directory_path() / (prefix + "-XXXXXX")).string();
    if (!::mkdtemp(pattern.data()))
        throw std::runtime_error("mkdtemp failed for " + pattern);
    path_ = pattern;
}

TempDir::~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
}

std::string git(const fs::path& dir, const std::vector<std::string>& args, const std::string& input) {
    std::vector<std::string> argv{"git"};
    argv.insert(argv.end(), args.begin(), args.end());
    auto r = filexpert::process::run(argv, dir.string(), input);
    if (r.exit_code != 0)
        throw std::runtime_error("git " + (args.empty() ? std::string() : args.front()) + " failed: " + r.err);
    return r.out;
}

RepoBuilder::RepoBuilder(fs::path dir, std::string default_branch) : dir_(std::move(dir)) {
    fs::create_directories(dir_);
    git(dir_, {"init", "-q", "-b", default_branch});
}

namespace {

void data(std::string& out, const std::string& payload) {
    out += "data " + std::to_string(payload.size()) + "\n" + payload + "\n";
}

} // namespace

int RepoBuilder::emit(const Author& who, std::int64_t time, const std::vector<Op>& ops, const std::string& branch,
                      const std::vector<int>& parents, const std::string& message) {
    const int mark = next_mark_++;
    const auto ident = who.name + " <" + who.email + "> " + std::to_string(time) + " +0000\n";
    stream_ += "commit refs/heads/" + branch + "\n";
    stream_ += "mark :" + std::to_string(mark) + "\n";
    stream_ += "author " + ident;
    stream_ += "committer " + ident;
    data(stream_, message);
    for (std::size_t i = 0; i < parents.size(); ++i)
        stream_ += (i == 0 ? "from :" : "merge :") + std::to_string(parents[i]) + "\n";
    for (const auto& op : ops) {
        switch (op.kind) {
        case Op::write:
            stream_ += "M 100644 inline " + op.path + "\n";
            data(stream_, op.content);
            break;
        case Op::rename:
            stream_ += "R \"" + op.path + "\" \"" + op.new_path + "\"\n";
            break;
        case Op::remove:
            stream_ += "D " + op.path + "\n";
            break;
        }
    }
    stream_ += "\n";
    heads_[branch] = mark;
    return mark;
}

int RepoBuilder::commit(const Author& who, std::int64_t time, const std::vector<Op>& ops, const std::string& branch,
                        const std::string& start_from, const std::string& message) {
    std::vector<int> parents;
    if (auto it = heads_.find(branch); it != heads_.end())
        parents.push_back(it->second);
    else if (!start_from.empty())
        parents.push_back(heads_.at(start_from));
    return emit(who, time, ops, branch, parents, message);
}

int RepoBuilder::merge(const Author& who, std::int64_t time, const std::string& into, const std::string& from,
                       const std::vector<Op>& ops) {
    return emit(who, time, ops, into, {heads_.at(into), heads_.at(from)}, "merge " + from);
}

void RepoBuilder::finish() {
    stream_ += "done\n";
    git(dir_, {"fast-import", "--quiet", "--done"}, stream_);
    stream_.clear();
}

} // namespace fixture
