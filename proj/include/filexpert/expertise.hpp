#pragma once

#include <array>
#include <cstdint>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "filexpert/features.hpp"

namespace filexpert::expertise {

enum class Technique { doa, blame, num_commits };

std::string_view to_string(Technique t);
Technique technique_from_string(std::string_view text);
inline constexpr std::array<Technique, 3> all_techniques = {Technique::doa, Technique::num_commits,
                                                            Technique::blame};

// Degree of authorship from first authorship, own commits (deliveries) and
// other developers' commits (acceptances):
//   3.293 + 1.098*fa + 0.164*dl - 0.321*ln(1 + ac)
// Throws Error("expertise", "NegativeInput") for negative dl or ac, or fa outside {0,1}.
double doa(int fa, double dl, double ac);

struct ExpertiseScore {
    std::string developer;
    std::string file;
    Technique technique = Technique::doa;
    double raw = 0.0;
    double normalized = 0.0;
};

// Raw technique values divided by the file's maximum. A file whose maximum
// is zero (or below) normalizes to all zeros.
std::vector<ExpertiseScore> technique_scores(const features::FeatureTable& table, Technique technique);

// (developer, file)
using Pair = std::pair<std::string, std::string>;
using PairSet = std::set<Pair>;

// Experts at threshold k: normalized > 0 when k == 0, normalized >= k otherwise.
// Throws Error("expertise", "InvalidThreshold") unless 0 <= k <= 1.
PairSet classify(const std::vector<ExpertiseScore>& scores, double k);
bool is_expert(double normalized, double k);

struct OracleSets {
    PairSet declared_experts;
    PairSet declared_non_experts;

    PairSet labeled() const;
};

struct Metrics {
    double precision = 0.0;
    double recall = 0.0;
    double f_measure = 0.0;
};

double f_measure(double precision, double recall);

// Precision counts only predicted pairs that carry a label.
// Throws Error("expertise", "EmptyOracle") when there are no declared experts.
Metrics evaluate(const PairSet& predicted, const OracleSets& oracle);

// Classifies at k and evaluates. Every labeled pair must have a score,
// otherwise Error("expertise", "UnscoredOraclePair").
Metrics evaluate(const std::vector<ExpertiseScore>& scores, const OracleSets& oracle, double k);

struct CurvePoint {
    double k = 0.0;
    double precision = 0.0;
    double recall = 0.0;
    double f_measure = 0.0;
};

struct ThresholdCurve {
    Technique technique = Technique::doa;
    std::vector<CurvePoint> points; // k = 0.0, 0.1, ..., 1.0
    double best_k = 0.0;
};

// The 11-point threshold grid, k = i/10.
std::vector<double> threshold_grid();

// For each k, averages held-out fold metrics over stratified seeded folds of
// the labeled pairs. Folds without declared experts have no recall and are
// left out of the averages. best_k maximizes mean F (smallest k on ties).
// Throws Error("expertise", "TooFewSamples") when labeled pairs < folds.
ThresholdCurve calibrate(const std::vector<ExpertiseScore>& scores, const OracleSets& oracle,
                         std::size_t folds = 10, std::uint64_t seed = 0);

} // namespace filexpert::expertise
