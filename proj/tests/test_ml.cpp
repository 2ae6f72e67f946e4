#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "filexpert/error.hpp"
#include "filexpert/folds.hpp"
#include "filexpert/ml.hpp"

using namespace filexpert;
using ml::ClassifierSpec;
using ml::Dataset;

namespace {

std::string code(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    return "no error";
}

// Two continuous features, label = x + y > 0, nothing within `margin` of the line.
Dataset separable(std::size_t n, double margin, std::uint64_t seed) {
    Dataset d{{"x", "y"}, {true, true}, {}};
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-5, 5);
    while (d.rows.size() < n) {
        double x = u(rng), y = u(rng);
        double s = (x + y) / std::sqrt(2.0);
        if (std::abs(s) < margin)
            continue;
        d.rows.push_back({{x, y}, s > 0 ? 1 : 0, "d", "f" + std::to_string(d.rows.size())});
    }
    return d;
}

// Expertise-shaped rows: experts add many lines and committed recently.
Dataset expertise_separable(std::size_t n, std::uint64_t seed) {
    Dataset d = ml::make_expertise_dataset();
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0, 1);
    for (std::size_t i = 0; i < n; ++i) {
        const int label = i % 2 == 0;
        double adds = label ? 200 + 300 * u(rng) : 100 * u(rng);
        double size = 50 + 500 * u(rng);
        double days = label ? 30 * u(rng) : 200 + 300 * u(rng);
        double fa = u(rng) < (label ? 0.7 : 0.3);
        d.rows.push_back({{adds, fa, size, std::floor(days)}, label, "d" + std::to_string(i % 13), "f" + std::to_string(i)});
    }
    return d;
}

Dataset permuted(Dataset d, std::uint64_t seed) {
    auto labels = d.labels();
    SeededRng rng(seed);
    rng.shuffle(labels);
    for (std::size_t i = 0; i < labels.size(); ++i)
        d.rows[i].label = labels[i];
    return d;
}

const std::vector<ClassifierSpec> fixed_specs{
    {"knn", {{"k", 5.0}}},
    {"logistic_regression", {{"l2", 0.01}}},
    {"random_forest", {{"trees", 50.0}, {"max_depth", 8.0}, {"max_features", 2.0}}},
};

} // namespace

TEST_CASE("standardize") {
    Dataset d{{"a", "flag", "c"}, {true, false, true}, {}};
    d.rows.push_back({{0, 1, 3}, 0, "", ""});
    d.rows.push_back({{10, 0, 3}, 1, "", ""});
    auto [s, scaling] = ml::standardize(d);
    CHECK(s.rows[0].x[0] == -1.0);
    CHECK(s.rows[1].x[0] == 1.0);
    CHECK(s.rows[0].x[1] == 1.0); // binary column untouched
    CHECK(s.rows[0].x[2] == 3.0); // constant column passes through
    REQUIRE(scaling.warnings.size() == 1);
    CHECK(scaling.warnings[0].rfind("ZeroVariance", 0) == 0);
    CHECK(code([] { ml::standardize(Dataset{{"a"}, {true}, {}}); }) == "ml.EmptyDataset");

    auto big = separable(300, 0, 3);
    auto [z, sc] = ml::standardize(big);
    for (std::size_t j = 0; j < 2; ++j) {
        double mean = 0, var = 0;
        for (const auto& r : z.rows)
            mean += r.x[j];
        mean /= double(z.rows.size());
        for (const auto& r : z.rows)
            var += (r.x[j] - mean) * (r.x[j] - mean);
        CHECK(std::abs(mean) < 1e-9);
        CHECK(std::abs(var / double(z.rows.size()) - 1.0) < 1e-9);
    }
}

TEST_CASE("knn k=1 reproduces training labels") {
    auto d = ml::standardize(separable(60, 0, 1)).first;
    auto model = ml::train({"knn", {{"k", 1.0}}}, d);
    for (const auto& r : d.rows)
        CHECK(model->predict(r.x) == r.label);
    Dataset one{{"x"}, {true}, {{{1.0}, 1, "", ""}, {{2.0}, 1, "", ""}}};
    CHECK(ml::train({"knn", {}}, one)->predict_score(std::vector<double>{0.0}) == 1.0);
}

TEST_CASE("logistic regression fits a separable set") {
    auto d = ml::standardize(separable(200, 0.5, 2)).first;
    auto model = ml::train({"logistic_regression", {{"l2", 0.001}}}, d);
    std::size_t correct = 0;
    for (const auto& r : d.rows)
        correct += static_cast<std::size_t>(model->predict(r.x) == r.label);
    CHECK(double(correct) / double(d.rows.size()) >= 0.99);
}

TEST_CASE("logistic gradient matches central differences") {
    std::mt19937_64 rng(13);
    std::normal_distribution<double> g(0, 1);
    for (int iter = 0; iter < 20; ++iter) {
        Dataset d{{"a", "b", "c"}, {true, true, true}, {}};
        for (int i = 0; i < 15; ++i)
            d.rows.push_back({{g(rng), g(rng), g(rng)}, int(g(rng) > 0), "", ""});
        std::vector<double> params{g(rng), g(rng), g(rng), g(rng)};
        const double l2 = 0.1 * (iter % 4);
        std::vector<double> grad;
        ml::logistic_loss(params, d, l2, &grad);
        for (std::size_t j = 0; j < params.size(); ++j) {
            const double h = 1e-5;
            auto plus = params, minus = params;
            plus[j] += h;
            minus[j] -= h;
            const double fd = (ml::logistic_loss(plus, d, l2) - ml::logistic_loss(minus, d, l2)) / (2 * h);
            const double rel = std::abs(fd - grad[j]) / std::max(1e-8, std::max(std::abs(fd), std::abs(grad[j])));
            CHECK(rel <= 1e-5);
        }
    }
}

TEST_CASE("random forest stump predicts the majority") {
    Dataset d{{"x", "y"}, {true, true}, {}};
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(-1, 1);
    for (int i = 0; i < 100; ++i)
        d.rows.push_back({{u(rng), u(rng)}, i < 70 ? 1 : 0, "", ""});
    for (const char* bootstrap : {"false", "true"}) {
        auto model = ml::train(
            {"random_forest", {{"trees", 1.0}, {"max_depth", 0.0}, {"bootstrap", std::string(bootstrap)}}}, d, 9);
        for (int i = 0; i < 50; ++i)
            CHECK(model->predict(std::vector<double>{u(rng), u(rng)}) == 1);
    }
}

TEST_CASE("scores stay in [0,1]") {
    auto d = ml::standardize(expertise_separable(80, 5)).first;
    std::mt19937_64 rng(8);
    std::normal_distribution<double> g(0, 10);
    for (const auto& spec : fixed_specs) {
        auto model = ml::train(spec, d, 1);
        for (int i = 0; i < 200; ++i) {
            std::vector<double> x{g(rng), double(i % 2), g(rng), g(rng)};
            double s = model->predict_score(x);
            CHECK(s >= 0.0);
            CHECK(s <= 1.0);
            CHECK(model->predict(x) == (s >= 0.5 ? 1 : 0));
        }
    }
}

TEST_CASE("training errors") {
    auto d = separable(20, 0, 1);
    Dataset single = d;
    for (auto& r : single.rows)
        r.label = 1;
    CHECK(code([&] { ml::train({"svm", {}}, d); }) == "ml.UnknownClassifier");
    CHECK(code([&] { ml::train({"logistic_regression", {}}, single); }) == "ml.SingleClassData");
    CHECK(code([&] { ml::train({"random_forest", {}}, single); }) == "ml.SingleClassData");
    CHECK(code([&] { ml::train({"knn", {}}, single); }) == "no error");
    CHECK(code([&] { ml::train({"knn", {{"k", 0.0}}}, d); }) == "ml.InvalidHyperparameter");
    CHECK(code([&] { ml::train({"knn", {{"distance", std::string("cosine")}}}, d); }) == "ml.InvalidHyperparameter");
    CHECK(code([&] { ml::train({"knn", {{"kk", 3.0}}}, d); }) == "ml.InvalidHyperparameter");
    CHECK(code([&] { ml::train({"random_forest", {{"max_depth", std::string("deep")}}}, d); }) ==
          "ml.InvalidHyperparameter");
    CHECK(code([&] { ml::cross_validate({"knn", {}}, single, 10, 0); }) == "ml.SingleClassData");
    CHECK(code([&] { ml::cross_validate({"knn", {}}, separable(9, 0, 1), 10, 0); }) == "ml.TooFewSamples");
}

TEST_CASE("cross validation on separable data") {
    auto d = expertise_separable(200, 11);
    for (const auto& spec : fixed_specs) {
        CAPTURE(spec.kind);
        auto r = ml::cross_validate(spec, d, 10, 0);
        REQUIRE(r.per_fold.size() == 10);
        double sum = 0;
        for (const auto& f : r.per_fold)
            sum += f.f_measure;
        CHECK(r.mean_f == doctest::Approx(sum / 10));
        CHECK(r.mean_f >= 0.95);
        CHECK(ml::cross_validate(spec, d, 10, 0).mean_f == r.mean_f);
    }
    auto hundred = expertise_separable(100, 1);
    for (const auto& fold : stratified_folds(hundred.labels(), 10, 0))
        CHECK(fold.size() == 10);
}

TEST_CASE("cross validation on permuted labels is near chance") {
    auto d = expertise_separable(200, 17);
    for (const auto& spec : fixed_specs) {
        CAPTURE(spec.kind);
        double total = 0;
        for (std::uint64_t s = 0; s < 20; ++s)
            total += ml::cross_validate(spec, permuted(d, 100 + s), 10, s).mean_f;
        const double mean = total / 20;
        CHECK(mean >= 0.35);
        CHECK(mean <= 0.65);
    }
}

TEST_CASE("grid expansion and search") {
    auto specs = ml::expand_grid("knn", {{"distance", {std::string("euclidean"), std::string("manhattan")}},
                                         {"k", {1.0, 3.0}}});
    REQUIRE(specs.size() == 4);
    CHECK(specs[0].describe() == "distance=euclidean;k=1");
    CHECK(specs[1].describe() == "distance=euclidean;k=3");
    CHECK(specs[2].describe() == "distance=manhattan;k=1");
    CHECK(ml::expand_grid("knn", ml::default_grid("knn")).size() == 12);
    CHECK(ml::expand_grid("random_forest", ml::default_grid("random_forest")).size() == 24);
    CHECK(ml::expand_grid("logistic_regression", ml::default_grid("logistic_regression")).size() == 5);

    auto d = expertise_separable(60, 2);
    auto [best, report] = ml::grid_search("knn", d, {{"k", {3.0}}}, 10, 0);
    CHECK(best == ClassifierSpec{"knn", {{"k", 3.0}}});
    CHECK(report.spec == best);
    CHECK(code([&] { ml::grid_search("knn", d, {}, 10, 0); }) == "ml.EmptyGrid");
    CHECK(code([&] { ml::grid_search("knn", d, {{"k", {}}}, 10, 0); }) == "ml.EmptyGrid");
}

TEST_CASE("grid search prefers smoothing on noisy labels") {
    // Two well separated clusters with 20% of labels flipped: one neighbour
    // copies the noise, five neighbours vote it away.
    Dataset d{{"x", "y"}, {true, true}, {}};
    std::mt19937_64 rng(31);
    std::normal_distribution<double> g(0, 1);
    std::uniform_real_distribution<double> u(0, 1);
    for (int i = 0; i < 200; ++i) {
        const int cls = i % 2;
        int label = cls;
        if (u(rng) < 0.2)
            label = 1 - cls;
        d.rows.push_back({{g(rng) + 6 * cls, g(rng)}, label, "", ""});
    }
    auto k1 = ml::cross_validate({"knn", {{"k", 1.0}}}, d, 10, 0);
    auto k5 = ml::cross_validate({"knn", {{"k", 5.0}}}, d, 10, 0);
    CHECK(k5.mean_f > k1.mean_f);
    auto [best, report] = ml::grid_search("knn", d, {{"k", {1.0, 5.0}}}, 10, 0);
    CHECK(best.number("k", 0) == 5.0);
    CHECK(report.mean_f == k5.mean_f);
}

TEST_CASE("pluggable classifiers") {
    class Constant final : public ml::Model {
    public:
        double predict_score(std::span<const double>) const override { return 1.0; }
    };
    ml::register_classifier("always_expert", [](const ClassifierSpec&, const Dataset&, std::uint64_t) {
        return std::make_unique<Constant>();
    });
    auto kinds = ml::registered_classifiers();
    CHECK(std::find(kinds.begin(), kinds.end(), "always_expert") != kinds.end());
    auto r = ml::cross_validate({"always_expert", {}}, expertise_separable(40, 3), 10, 0);
    CHECK(r.mean_recall == 1.0);
    CHECK(r.mean_precision == doctest::Approx(0.5));
}

TEST_CASE("report writers") {
    ml::CVReport r{{"knn", {{"k", 5.0}, {"distance", std::string("euclidean")}}}, {{1, 0.5, 2.0 / 3}}, 1, 0.5, 2.0 / 3};
    std::ostringstream csv, json;
    ml::write_report_csv(csv, {r});
    CHECK(csv.str() == "classifier,hyperparams,mean_p,mean_r,mean_f\nknn,distance=euclidean;k=5,1,0.5,"
                       "0.6666666666666666\n");
    ml::write_report_json(json, {r});
    CHECK(json.str().find("\"mean_f\"") != std::string::npos);
    CHECK(json.str().find("\"per_fold\"") != std::string::npos);
}
