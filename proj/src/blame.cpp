#include "filexpert/blame.hpp"

#include "filexpert/error.hpp"
#include "filexpert/lineage.hpp"

namespace filexpert::diff {

std::map<std::string, long> BlameState::line_counts() const {
    std::map<std::string, long> counts;
    for (const auto& l : lines)
        ++counts[l.author];
    return counts;
}

std::vector<DiffHunk> BlameTracker::advance(std::string_view content, const std::string& author) {
    auto old_lines = history::split_lines(text_);
    auto new_lines = history::split_lines(content);
    auto hunks = line_diff(std::span<const std::string_view>(old_lines),
                           std::span<const std::string_view>(new_lines));

    BlameState next;
    next.lines.reserve(new_lines.size());
    std::size_t i = 0, j = 0;
    auto keep_until = [&](std::size_t old_end) {
        while (i < old_end) {
            next.lines.push_back(std::move(state_.lines[i]));
            ++i;
            ++j;
        }
    };
    for (const auto& h : hunks) {
        keep_until(h.before_start);
        i += h.removed.size();
        for (std::size_t k = 0; k < h.added.size(); ++k, ++j)
            next.lines.push_back({std::string(new_lines[j]), author});
    }
    keep_until(old_lines.size());

    state_ = std::move(next);
    text_.assign(content);
    return hunks;
}

BlameState replay_blame(const history::CommitHistory& history, std::string_view file) {
    auto index = history::build_lineages(history);
    const auto* lineage = index.find_live(file);
    if (!lineage)
        throw Error("diff", "FileNotInHistory",
                    "'" + std::string(file) + "' does not exist at the reference version");
    BlameTracker tracker;
    for (const auto& ev : lineage->events) {
        const auto& after = ev.change->after_content;
        tracker.advance(after ? std::string_view(*after) : std::string_view(),
                        ev.commit->author.email);
    }
    return tracker.state();
}

} // namespace filexpert::diff
