#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "filexpert/history.hpp"
#include "filexpert/line_diff.hpp"

namespace filexpert::diff {

struct BlameLine {
    std::string text;
    std::string author; // canonical developer key
};

struct BlameState {
    std::vector<BlameLine> lines;

    std::size_t loc() const { return lines.size(); }
    std::map<std::string, long> line_counts() const;
};

// Per-line authorship carried from one version of a file to the next. Lines
// kept by the alignment keep their author; every other line of the new
// version, modified or new, belongs to the committing author.
class BlameTracker {
public:
    // Returns the hunks between the previous version and `content`.
    std::vector<DiffHunk> advance(std::string_view content, const std::string& author);

    const BlameState& state() const { return state_; }
    const std::string& text() const { return text_; }

private:
    BlameState state_;
    std::string text_;
};

// Replays every commit on the lineage of `file` (a path at the reference
// version). Throws Error("diff", "FileNotInHistory").
BlameState replay_blame(const history::CommitHistory& history, std::string_view file);

} // namespace filexpert::diff
