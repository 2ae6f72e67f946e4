#include <optional>

#include <json.hpp>

#include "filexpert/csv.hpp"
#include "filexpert/error.hpp"
#include "filexpert/expertise.hpp"
#include "filexpert/folds.hpp"
#include "filexpert/ml.hpp"

namespace filexpert::ml {

CVReport cross_validate(const ClassifierSpec& spec, const Dataset& data, std::size_t folds,
                        std::uint64_t seed) {
    if (folds < 2)
        throw Error("ml", "TooFewSamples", "cross-validation needs at least 2 folds");
    if (data.rows.size() < folds)
        throw Error("ml", "TooFewSamples",
                    std::to_string(data.rows.size()) + " rows cannot fill " + std::to_string(folds) + " folds");
    const auto labels = data.labels();
    std::size_t positives = 0;
    for (int l : labels)
        positives += static_cast<std::size_t>(l);
    if (positives == 0 || positives == labels.size())
        throw Error("ml", "SingleClassData", "cross-validation needs both classes");

    const auto parts = stratified_folds(labels, folds, seed);
    CVReport report{spec, {}, 0.0, 0.0, 0.0};
    for (std::size_t f = 0; f < parts.size(); ++f) {
        std::vector<std::size_t> train_idx;
        for (std::size_t g = 0; g < parts.size(); ++g)
            if (g != f)
                train_idx.insert(train_idx.end(), parts[g].begin(), parts[g].end());
        auto [train_set, scaling] = standardize(data.subset(train_idx));
        auto model = train(spec, train_set, seed + f);

        std::size_t tp = 0, fp = 0, fn = 0;
        for (auto i : parts[f]) {
            const auto x = scaling.apply(data.rows[i].x);
            const int predicted = model->predict(x);
            const int actual = data.rows[i].label;
            tp += static_cast<std::size_t>(predicted && actual);
            fp += static_cast<std::size_t>(predicted && !actual);
            fn += static_cast<std::size_t>(!predicted && actual);
        }
        FoldMetrics m;
        m.precision = tp + fp ? static_cast<double>(tp) / static_cast<double>(tp + fp) : 0.0;
        m.recall = tp + fn ? static_cast<double>(tp) / static_cast<double>(tp + fn) : 0.0;
        m.f_measure = expertise::f_measure(m.precision, m.recall);
        report.per_fold.push_back(m);
    }
    for (const auto& m : report.per_fold) {
        report.mean_precision += m.precision;
        report.mean_recall += m.recall;
        report.mean_f += m.f_measure;
    }
    const auto n = static_cast<double>(report.per_fold.size());
    report.mean_precision /= n;
    report.mean_recall /= n;
    report.mean_f /= n;
    return report;
}

Grid default_grid(const std::string& kind) {
    if (kind == "knn")
        return {{"k", {1.0, 3.0, 5.0, 7.0, 9.0, 11.0}},
                {"distance", {std::string("euclidean"), std::string("manhattan")}}};
    if (kind == "random_forest")
        return {{"trees", {50.0, 100.0, 200.0}},
                {"max_depth", {4.0, 8.0, 16.0, std::string("unbounded")}},
                {"max_features", {2.0, 4.0}}};
    if (kind == "logistic_regression")
        return {{"l2", {0.001, 0.01, 0.1, 1.0, 10.0}}};
    throw Error("ml", "UnknownClassifier", "no default grid for '" + kind + "'");
}

std::vector<ClassifierSpec> expand_grid(const std::string& kind, const Grid& grid) {
    std::vector<ClassifierSpec> out;
    if (grid.empty())
        return out;
    for (const auto& [name, values] : grid)
        if (values.empty())
            return out;
    out.push_back({kind, {}});
    for (const auto& [name, values] : grid) {
        std::vector<ClassifierSpec> next;
        for (const auto& partial : out)
            for (const auto& v : values) {
                auto spec = partial;
                spec.hyperparameters[name] = v;
                next.push_back(std::move(spec));
            }
        out = std::move(next);
    }
    return out;
}

std::pair<ClassifierSpec, CVReport> grid_search(const std::string& kind, const Dataset& data,
                                                const Grid& grid, std::size_t folds, std::uint64_t seed) {
    const auto specs = expand_grid(kind, grid);
    if (specs.empty())
        throw Error("ml", "EmptyGrid", "grid for '" + kind + "' has no combinations");
    std::optional<CVReport> best;
    for (const auto& spec : specs) {
        auto report = cross_validate(spec, data, folds, seed);
        if (!best || report.mean_f > best->mean_f)
            best = std::move(report);
    }
    return {best->spec, *best};
}

namespace {

nlohmann::json param_json(const Param& p) {
    return std::visit([](const auto& v) { return nlohmann::json(v); }, p);
}

} // namespace

void write_report_json(std::ostream& out, const std::vector<CVReport>& reports) {
    auto arr = nlohmann::json::array();
    for (const auto& r : reports) {
        nlohmann::json hp = nlohmann::json::object();
        for (const auto& [name, value] : r.spec.hyperparameters)
            hp[name] = param_json(value);
        auto folds = nlohmann::json::array();
        for (const auto& m : r.per_fold)
            folds.push_back({{"precision", m.precision}, {"recall", m.recall}, {"f_measure", m.f_measure}});
        arr.push_back({{"classifier", r.spec.kind},
                       {"hyperparameters", hp},
                       {"per_fold", folds},
                       {"mean_precision", r.mean_precision},
                       {"mean_recall", r.mean_recall},
                       {"mean_f", r.mean_f}});
    }
    out << arr.dump(2) << '\n';
}

void write_report_csv(std::ostream& out, const std::vector<CVReport>& reports) {
    csv::write_row(out, {"classifier", "hyperparams", "mean_p", "mean_r", "mean_f"});
    for (const auto& r : reports)
        csv::write_row(out, {r.spec.kind, r.spec.describe(), features::format_number(r.mean_precision),
                             features::format_number(r.mean_recall), features::format_number(r.mean_f)});
}

} // namespace filexpert::ml
