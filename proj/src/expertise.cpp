#include "filexpert/expertise.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "filexpert/error.hpp"
#include "filexpert/folds.hpp"

namespace filexpert::expertise {

std::string_view to_string(Technique t) {
    switch (t) {
    case Technique::doa:
        return "doa";
    case Technique::blame:
        return "blame";
    case Technique::num_commits:
        return "num_commits";
    }
    return "doa";
}

Technique technique_from_string(std::string_view text) {
    if (text == "doa")
        return Technique::doa;
    if (text == "blame")
        return Technique::blame;
    if (text == "num_commits" || text == "numcommits" || text == "commits")
        return Technique::num_commits;
    throw Error("expertise", "UnknownTechnique", "unknown technique '" + std::string(text) + "'");
}

double doa(int fa, double dl, double ac) {
    if (dl < 0 || ac < 0 || (fa != 0 && fa != 1) || std::isnan(dl) || std::isnan(ac))
        throw Error("expertise", "NegativeInput", "doa inputs must be non-negative");
    return 3.293 + 1.098 * fa + 0.164 * dl - 0.321 * std::log1p(ac);
}

std::vector<ExpertiseScore> technique_scores(const features::FeatureTable& table, Technique technique) {
    std::map<std::string, long> file_commits;
    for (const auto& r : table.rows)
        file_commits[r.file] += r.features.num_commits;

    std::vector<ExpertiseScore> scores;
    scores.reserve(table.rows.size());
    std::map<std::string, double> file_max;
    for (const auto& r : table.rows) {
        const auto& f = r.features;
        double raw = 0.0;
        switch (technique) {
        case Technique::doa: {
            auto dl = static_cast<double>(f.num_commits);
            auto ac = static_cast<double>(file_commits[r.file] - f.num_commits);
            raw = doa(f.fa, dl, ac);
            break;
        }
        case Technique::blame:
            raw = static_cast<double>(f.blame);
            break;
        case Technique::num_commits:
            raw = static_cast<double>(f.num_commits);
            break;
        }
        scores.push_back({r.developer, r.file, technique, raw, 0.0});
        auto [it, inserted] = file_max.emplace(r.file, raw);
        if (!inserted)
            it->second = std::max(it->second, raw);
    }
    for (auto& s : scores) {
        double max = file_max[s.file];
        s.normalized = max > 0.0 ? std::clamp(s.raw / max, 0.0, 1.0) : 0.0;
    }
    return scores;
}

bool is_expert(double normalized, double k) {
    return k == 0.0 ? normalized > 0.0 : normalized >= k;
}

PairSet classify(const std::vector<ExpertiseScore>& scores, double k) {
    if (!(k >= 0.0 && k <= 1.0))
        throw Error("expertise", "InvalidThreshold", "threshold must lie in [0,1]");
    PairSet experts;
    for (const auto& s : scores)
        if (is_expert(s.normalized, k))
            experts.emplace(s.developer, s.file);
    return experts;
}

PairSet OracleSets::labeled() const {
    PairSet all = declared_experts;
    all.insert(declared_non_experts.begin(), declared_non_experts.end());
    return all;
}

double f_measure(double precision, double recall) {
    if (precision + recall <= 0.0)
        return 0.0;
    return 2.0 * precision * recall / (precision + recall);
}

Metrics evaluate(const PairSet& predicted, const OracleSets& oracle) {
    if (oracle.declared_experts.empty())
        throw Error("expertise", "EmptyOracle", "no declared experts to evaluate against");
    std::size_t hits = 0, predicted_labeled = 0;
    for (const auto& p : predicted) {
        if (oracle.declared_experts.count(p)) {
            ++hits;
            ++predicted_labeled;
        } else if (oracle.declared_non_experts.count(p)) {
            ++predicted_labeled;
        }
    }
    Metrics m;
    m.precision = predicted_labeled ? static_cast<double>(hits) / static_cast<double>(predicted_labeled) : 0.0;
    m.recall = static_cast<double>(hits) / static_cast<double>(oracle.declared_experts.size());
    m.f_measure = f_measure(m.precision, m.recall);
    return m;
}

namespace {

std::map<Pair, double> index_scores(const std::vector<ExpertiseScore>& scores) {
    std::map<Pair, double> by_pair;
    for (const auto& s : scores)
        by_pair.emplace(Pair{s.developer, s.file}, s.normalized);
    return by_pair;
}

void require_scored(const std::map<Pair, double>& by_pair, const OracleSets& oracle) {
    for (const auto* set : {&oracle.declared_experts, &oracle.declared_non_experts})
        for (const auto& p : *set)
            if (!by_pair.count(p))
                throw Error("expertise", "UnscoredOraclePair",
                            "no score for (" + p.first + ", " + p.second + ")");
}

} // namespace

Metrics evaluate(const std::vector<ExpertiseScore>& scores, const OracleSets& oracle, double k) {
    require_scored(index_scores(scores), oracle);
    return evaluate(classify(scores, k), oracle);
}

std::vector<double> threshold_grid() {
    std::vector<double> grid;
    for (int i = 0; i <= 10; ++i)
        grid.push_back(i / 10.0);
    return grid;
}

ThresholdCurve calibrate(const std::vector<ExpertiseScore>& scores, const OracleSets& oracle,
                         std::size_t folds, std::uint64_t seed) {
    if (folds < 2)
        throw Error("expertise", "InvalidFolds", "at least two folds are required");
    auto by_pair = index_scores(scores);
    require_scored(by_pair, oracle);

    std::vector<Pair> pairs;
    std::vector<int> labels;
    for (const auto& p : oracle.labeled()) {
        pairs.push_back(p);
        labels.push_back(oracle.declared_experts.count(p) ? 1 : 0);
    }
    if (pairs.size() < folds)
        throw Error("expertise", "TooFewSamples",
                    std::to_string(pairs.size()) + " labeled pairs for " + std::to_string(folds) +
                        " folds");
    if (oracle.declared_experts.empty())
        throw Error("expertise", "EmptyOracle", "no declared experts to calibrate against");

    auto split = stratified_folds(labels, folds, seed);

    ThresholdCurve curve;
    curve.technique = scores.empty() ? Technique::doa : scores.front().technique;
    double best_f = -1.0;
    for (double k : threshold_grid()) {
        CurvePoint point{k, 0.0, 0.0, 0.0};
        std::size_t used = 0;
        for (const auto& fold : split) {
            std::size_t experts = 0, predicted = 0, hits = 0;
            for (auto idx : fold) {
                bool expert = is_expert(by_pair.at(pairs[idx]), k);
                experts += static_cast<std::size_t>(labels[idx]);
                predicted += expert ? 1 : 0;
                hits += (expert && labels[idx]) ? 1 : 0;
            }
            if (experts == 0)
                continue;
            double p = predicted ? static_cast<double>(hits) / static_cast<double>(predicted) : 0.0;
            double r = static_cast<double>(hits) / static_cast<double>(experts);
            point.precision += p;
            point.recall += r;
            point.f_measure += f_measure(p, r);
            ++used;
        }
        point.precision /= static_cast<double>(used);
        point.recall /= static_cast<double>(used);
        point.f_measure /= static_cast<double>(used);
        curve.points.push_back(point);
        if (point.f_measure > best_f) {
            best_f = point.f_measure;
            curve.best_k = k;
        }
    }
    return curve;
}

} // namespace filexpert::expertise
