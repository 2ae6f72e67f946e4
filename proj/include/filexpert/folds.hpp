#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace filexpert {

// Fisher-Yates over a 64-bit Mersenne Twister with explicit rejection
// sampling, so a seed yields the same permutation on every standard library.
class SeededRng {
public:
    explicit SeededRng(std::uint64_t seed) : engine_(seed) {}

    // Uniform in [0, bound).
    std::uint64_t below(std::uint64_t bound);
    double unit(); // uniform in [0, 1)

    template <typename T>
    void shuffle(std::vector<T>& items) {
        for (std::size_t i = items.size(); i > 1; --i) {
            auto j = static_cast<std::size_t>(below(i));
            std::swap(items[i - 1], items[j]);
        }
    }

    std::mt19937_64& engine() { return engine_; }

private:
    std::mt19937_64 engine_;
};

// Splits indices 0..n-1 into `folds` groups. Each class is shuffled and dealt
// round-robin, continuing the rotation across classes, so fold sizes differ
// by at most one and each fold's class counts are within one of an even share.
std::vector<std::vector<std::size_t>> stratified_folds(std::span<const int> labels,
                                                        std::size_t folds, std::uint64_t seed);

} // namespace filexpert
