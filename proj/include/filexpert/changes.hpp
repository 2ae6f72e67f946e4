#pragma once

#include <string_view>
#include <vector>

#include "filexpert/conditionals.hpp"
#include "filexpert/line_diff.hpp"

namespace filexpert::diff {

inline constexpr double default_mod_threshold = 0.40;

struct ChangeStats {
    long adds = 0;
    long dels = 0;
    long mods = 0;
    long conds = 0;

    ChangeStats& operator+=(const ChangeStats& o) {
        adds += o.adds;
        dels += o.dels;
        mods += o.mods;
        conds += o.conds;
        return *this;
    }
    bool operator==(const ChangeStats&) const = default;
};

// True when `added` is a modification of `removed`: their edit distance is
// strictly below threshold * (code points of removed).
bool is_modification(std::string_view removed, std::string_view added, double threshold);

// Within each hunk, removed and added lines pair up by position. A pair is
// one modification or, failing the distance test, one delete plus one add.
// Unpaired lines are plain adds or dels. Conditionals are counted over the
// lines that end up as adds, using `rules` when given.
//
// Throws Error("diff", "InvalidThreshold") unless 0 <= mod_threshold <= 1.
ChangeStats classify_changes(const std::vector<DiffHunk>& hunks,
                             double mod_threshold = default_mod_threshold,
                             const LanguageRules* rules = nullptr);

} // namespace filexpert::diff
