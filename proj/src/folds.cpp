#include "filexpert/folds.hpp"

#include <limits>
#include <map>

namespace filexpert {

std::uint64_t SeededRng::below(std::uint64_t bound) {
    if (bound <= 1)
        return 0;
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % bound;
    std::uint64_t r;
    do {
        r = engine_();
    } while (r >= limit);
    return r % bound;
}

double SeededRng::unit() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

std::vector<std::vector<std::size_t>> stratified_folds(std::span<const int> labels,
                                                        std::size_t folds, std::uint64_t seed) {
    std::map<int, std::vector<std::size_t>> by_class;
    for (std::size_t i = 0; i < labels.size(); ++i)
        by_class[labels[i]].push_back(i);

    SeededRng rng(seed);
    std::vector<std::vector<std::size_t>> out(folds);
    std::size_t slot = 0;
    for (auto& [label, members] : by_class) {
        rng.shuffle(members);
        for (auto idx : members) {
            out[slot % folds].push_back(idx);
            ++slot;
        }
    }
    return out;
}

} // namespace filexpert
