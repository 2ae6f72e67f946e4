#pragma once

#include <map>
#include <string>
#include <vector>

#include "filexpert/history.hpp"

namespace filexpert::history {

struct LineageEvent {
    std::size_t commit_index = 0;
    const CommitRecord* commit = nullptr;
    const FileChangeEvent* change = nullptr;
};

// The rename-connected identity of one file. Events point into the history
// the lineage was built from, which must outlive it.
struct Lineage {
    // Current path: the path at the reference version for live lineages,
    // the last path before deletion otherwise.
    std::string path;
    std::vector<std::string> former_paths;
    bool alive = true;
    std::vector<LineageEvent> events;

    const std::string& creator() const { return events.front().commit->author.email; }
};

struct LineageIndex {
    std::vector<Lineage> lineages;
    // Path at the reference version -> index into lineages.
    std::map<std::string, std::size_t, std::less<>> live;

    const Lineage* find_live(std::string_view path) const;
};

// Walks the commits in order. Within one commit, deletions and rename
// sources are detached before additions and rename targets attach, so a
// path freed and reused in the same commit starts a fresh lineage.
LineageIndex build_lineages(const CommitHistory& history);

} // namespace filexpert::history
