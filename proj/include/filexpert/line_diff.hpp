#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace filexpert::diff {

// A maximal run of removed and added lines between two unchanged lines.
struct DiffHunk {
    std::vector<std::string> removed;
    std::vector<std::string> added;
    // Line offsets of the run in the old and new version.
    std::size_t before_start = 0;
    std::size_t after_start = 0;

    bool operator==(const DiffHunk&) const = default;
};

// Index pairs (i, j) with a[i] == b[j] forming a longest common subsequence,
// increasing in both components. Linear-space Myers divide and conquer.
std::vector<std::pair<std::size_t, std::size_t>> lcs_alignment(std::span<const int> a,
                                                                std::span<const int> b);

std::vector<DiffHunk> line_diff(std::span<const std::string_view> before,
                                std::span<const std::string_view> after);
std::vector<DiffHunk> line_diff(std::string_view before, std::string_view after);

} // namespace filexpert::diff
