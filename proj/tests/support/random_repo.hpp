#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "fixture.hpp"

namespace fixture {

// Expected values for one developer on one file, recomputed by naive replay
// of the edits the generator made (no git, no LCS).
struct ExpectedFeatures {
    long adds = 0, dels = 0, mods = 0, conds = 0, amount = 0;
    int fa = 0;
    long blame = 0, num_commits = 0;
    double num_days = 0;
    long num_mod_devs = 0, size = 0;
    double avg_days_commits = 0;
};

struct RandomRepoParams {
    int max_commits = 20;
    int max_files = 5;
    int developers = 4;
    double rename_rate = 0.15;
    double delete_rate = 0.08;
};

struct GeneratedRepo {
    std::int64_t reference_time = 0;
    // (email, path at the tip) -> expected features
    std::map<std::pair<std::string, std::string>, ExpectedFeatures> expected;
    // path at the tip -> distinct developer emails who touched its lineage
    std::map<std::string, std::vector<std::string>> developers;
    int commits = 0;
    int renames = 0;
    int deletions = 0;
};

// Writes a random linear repository into `dir` and returns the oracle.
GeneratedRepo generate_random_repo(const fs::path& dir, std::uint64_t seed, const RandomRepoParams& params = {});

const std::vector<Author>& fixture_authors();

// Plain O(nm) edit distance over bytes (fixture text is ASCII).
std::size_t naive_levenshtein(const std::string& a, const std::string& b);

} // namespace fixture
