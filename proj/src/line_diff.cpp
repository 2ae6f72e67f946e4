#include "filexpert/line_diff.hpp"

#include <algorithm>
#include <unordered_map>

#include "filexpert/history.hpp"

namespace filexpert::diff {

namespace {

struct Snake {
    std::ptrdiff_t d;
    std::ptrdiff_t x, y, u, v;
};

class Aligner {
public:
    Aligner(std::span<const int> a, std::span<const int> b) : a_(a), b_(b) {
        std::size_t span = a.size() + b.size() + 3;
        forward_.resize(2 * span + 1);
        backward_.resize(2 * span + 1);
        offset_ = static_cast<std::ptrdiff_t>(span);
    }

    void run() { compare(0, a_.size(), 0, b_.size()); }

    std::vector<std::pair<std::size_t, std::size_t>> matches;

private:
    std::span<const int> a_, b_;
    std::vector<std::ptrdiff_t> forward_, backward_;
    std::ptrdiff_t offset_ = 0;

    std::ptrdiff_t& fwd(std::ptrdiff_t k) { return forward_[static_cast<std::size_t>(k + offset_)]; }
    std::ptrdiff_t& bwd(std::ptrdiff_t k) { return backward_[static_cast<std::size_t>(k + offset_)]; }

    // Diagonals reachable with d edits inside an n-by-m grid.
    static std::ptrdiff_t kmin(std::ptrdiff_t d, std::ptrdiff_t m) {
        return -(d - 2 * std::max<std::ptrdiff_t>(0, d - m));
    }
    static std::ptrdiff_t kmax(std::ptrdiff_t d, std::ptrdiff_t n) {
        return d - 2 * std::max<std::ptrdiff_t>(0, d - n);
    }

    Snake middle_snake(std::size_t a0, std::size_t a1, std::size_t b0, std::size_t b1) {
        const auto n = static_cast<std::ptrdiff_t>(a1 - a0);
        const auto m = static_cast<std::ptrdiff_t>(b1 - b0);
        const std::ptrdiff_t delta = n - m;
        const bool odd = (delta & 1) != 0;
        const std::ptrdiff_t max_d = (n + m + 1) / 2;
        auto A = [&](std::ptrdiff_t i) { return a_[a0 + static_cast<std::size_t>(i)]; };
        auto B = [&](std::ptrdiff_t j) { return b_[b0 + static_cast<std::size_t>(j)]; };

        fwd(1) = 0;
        bwd(1) = 0;
        for (std::ptrdiff_t d = 0; d <= max_d; ++d) {
            for (std::ptrdiff_t k = kmin(d, m); k <= kmax(d, n); k += 2) {
                std::ptrdiff_t x = (k == -d || (k != d && fwd(k - 1) < fwd(k + 1))) ? fwd(k + 1)
                                                                                    : fwd(k - 1) + 1;
                std::ptrdiff_t y = x - k;
                const std::ptrdiff_t xs = x, ys = y;
                while (x < n && y < m && A(x) == B(y)) {
                    ++x;
                    ++y;
                }
                fwd(k) = x;
                const std::ptrdiff_t kr = delta - k;
                if (odd && d >= 1 && kr >= kmin(d - 1, m) && kr <= kmax(d - 1, n) &&
                    fwd(k) + bwd(kr) >= n)
                    return {2 * d - 1, xs, ys, x, y};
            }
            for (std::ptrdiff_t k = kmin(d, m); k <= kmax(d, n); k += 2) {
                std::ptrdiff_t x = (k == -d || (k != d && bwd(k - 1) < bwd(k + 1))) ? bwd(k + 1)
                                                                                    : bwd(k - 1) + 1;
                std::ptrdiff_t y = x - k;
                const std::ptrdiff_t xs = x, ys = y;
                while (x < n && y < m && A(n - 1 - x) == B(m - 1 - y)) {
                    ++x;
                    ++y;
                }
                bwd(k) = x;
                const std::ptrdiff_t kf = delta - k;
                if (!odd && kf >= kmin(d, m) && kf <= kmax(d, n) && bwd(k) + fwd(kf) >= n)
                    return {2 * d, n - x, m - y, n - xs, m - ys};
            }
        }
        // Unreachable for well-formed input: the paths always meet by max_d.
        return {n + m, 0, 0, 0, 0};
    }

    void compare(std::size_t a0, std::size_t a1, std::size_t b0, std::size_t b1) {
        while (a0 < a1 && b0 < b1 && a_[a0] == b_[b0])
            matches.emplace_back(a0++, b0++);
        std::size_t suffix = 0;
        while (a0 < a1 && b0 < b1 && a_[a1 - 1] == b_[b1 - 1]) {
            --a1;
            --b1;
            ++suffix;
        }
        if (a0 < a1 && b0 < b1) {
            auto s = middle_snake(a0, a1, b0, b1);
            auto ux = static_cast<std::size_t>(s.x), uy = static_cast<std::size_t>(s.y);
            auto uu = static_cast<std::size_t>(s.u), uv = static_cast<std::size_t>(s.v);
            compare(a0, a0 + ux, b0, b0 + uy);
            for (std::size_t i = 0; i < uu - ux; ++i)
                matches.emplace_back(a0 + ux + i, b0 + uy + i);
            compare(a0 + uu, a1, b0 + uv, b1);
        }
        for (std::size_t i = 0; i < suffix; ++i)
            matches.emplace_back(a1 + i, b1 + i);
    }
};

} // namespace

std::vector<std::pair<std::size_t, std::size_t>> lcs_alignment(std::span<const int> a,
                                                                std::span<const int> b) {
    Aligner aligner(a, b);
    aligner.run();
    return std::move(aligner.matches);
}

std::vector<DiffHunk> line_diff(std::span<const std::string_view> before,
                                std::span<const std::string_view> after) {
    std::unordered_map<std::string_view, int> ids;
    auto intern = [&](std::span<const std::string_view> lines) {
        std::vector<int> out;
        out.reserve(lines.size());
        for (auto l : lines)
            out.push_back(ids.emplace(l, static_cast<int>(ids.size())).first->second);
        return out;
    };
    auto a = intern(before);
    auto b = intern(after);
    auto matches = lcs_alignment(a, b);
    matches.emplace_back(before.size(), after.size()); // sentinel

    std::vector<DiffHunk> hunks;
    std::size_t i = 0, j = 0;
    for (auto [mi, mj] : matches) {
        if (mi > i || mj > j) {
            DiffHunk h;
            h.before_start = i;
            h.after_start = j;
            for (; i < mi; ++i)
                h.removed.emplace_back(before[i]);
            for (; j < mj; ++j)
                h.added.emplace_back(after[j]);
            hunks.push_back(std::move(h));
        }
        i = mi + 1;
        j = mj + 1;
    }
    return hunks;
}

std::vector<DiffHunk> line_diff(std::string_view before, std::string_view after) {
    auto a = history::split_lines(before);
    auto b = history::split_lines(after);
    return line_diff(std::span<const std::string_view>(a), std::span<const std::string_view>(b));
}

} // namespace filexpert::diff
