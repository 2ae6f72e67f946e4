#include "filexpert/lineage.hpp"

namespace filexpert::history {

const Lineage* LineageIndex::find_live(std::string_view path) const {
    auto it = live.find(path);
    return it == live.end() ? nullptr : &lineages[it->second];
}

LineageIndex build_lineages(const CommitHistory& history) {
    LineageIndex index;
    auto& live = index.live;
    auto& lineages = index.lineages;

    auto start = [&](const std::string& path) {
        if (auto it = live.find(path); it != live.end())
            lineages[it->second].alive = false;
        lineages.push_back(Lineage{path, {}, true, {}});
        live.insert_or_assign(path, lineages.size() - 1);
        return lineages.size() - 1;
    };

    for (std::size_t ci = 0; ci < history.commits.size(); ++ci) {
        const auto& commit = history.commits[ci];
        std::map<const FileChangeEvent*, std::size_t> detached;

        for (const auto& ev : commit.changes) {
            if (ev.kind == ChangeKind::deletion) {
                auto it = live.find(ev.path);
                if (it == live.end())
                    continue;
                auto& l = lineages[it->second];
                l.events.push_back({ci, &commit, &ev});
                l.alive = false;
                live.erase(it);
            } else if (ev.kind == ChangeKind::rename && ev.old_path) {
                auto it = live.find(*ev.old_path);
                if (it == live.end())
                    continue;
                detached.emplace(&ev, it->second);
                live.erase(it);
            }
        }

        for (const auto& ev : commit.changes) {
            std::size_t li = 0;
            switch (ev.kind) {
            case ChangeKind::deletion:
                continue;
            case ChangeKind::rename:
                if (auto d = detached.find(&ev); d != detached.end()) {
                    li = d->second;
                    if (auto it = live.find(ev.path); it != live.end())
                        lineages[it->second].alive = false;
                    auto& l = lineages[li];
                    l.former_paths.push_back(l.path);
                    l.path = ev.path;
                    live.insert_or_assign(ev.path, li);
                } else {
                    li = start(ev.path);
                }
                break;
            case ChangeKind::addition:
            case ChangeKind::modification:
                if (auto it = live.find(ev.path); it != live.end())
                    li = it->second;
                else
                    li = start(ev.path);
                break;
            }
            lineages[li].events.push_back({ci, &commit, &ev});
        }
    }
    return index;
}

} // namespace filexpert::history
