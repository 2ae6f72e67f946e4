#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <ostream>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "filexpert/features.hpp"

namespace filexpert::ml {

struct Sample {
    std::vector<double> x;
    int label = 0; // 1 = expert
    std::string developer;
    std::string file;
};

struct Dataset {
    std::vector<std::string> feature_names;
    // Columns standardized before fitting; binary indicators stay as they are.
    std::vector<bool> continuous;
    std::vector<Sample> rows;

    std::size_t dimension() const { return feature_names.size(); }
    std::vector<int> labels() const;
    Dataset subset(std::span<const std::size_t> indices) const;
};

// The expertise feature set: adds, fa, size, num_days (fa is binary).
Dataset make_expertise_dataset();
std::vector<double> expertise_features(const features::FeatureVector& f);

struct Scaling {
    std::vector<double> mean;
    std::vector<double> scale; // population standard deviation, 1 when not scaled
    std::vector<std::string> warnings;

    std::vector<double> apply(std::span<const double> x) const;
    Dataset apply(const Dataset& data) const;
};

// Fits zero-mean/unit-variance scaling on the continuous columns. A constant
// column passes through unscaled and adds a ZeroVariance warning.
// Throws Error("ml", "EmptyDataset").
std::pair<Dataset, Scaling> standardize(const Dataset& data);
Scaling fit_scaling(const Dataset& data);

using Param = std::variant<double, std::string>;
using Hyperparameters = std::map<std::string, Param>;

struct ClassifierSpec {
    std::string kind;
    Hyperparameters hyperparameters;

    double number(const std::string& name, double fallback) const;
    std::string text(const std::string& name, const std::string& fallback) const;
    std::string describe() const; // "k=5;distance=euclidean"
    bool operator==(const ClassifierSpec&) const = default;
};

class Model {
public:
    virtual ~Model() = default;
    // Estimated probability of the expert class, in [0, 1].
    virtual double predict_score(std::span<const double> x) const = 0;
    int predict(std::span<const double> x) const { return predict_score(x) >= 0.5 ? 1 : 0; }
};

using Trainer = std::function<std::unique_ptr<Model>(const ClassifierSpec&, const Dataset&,
                                                     std::uint64_t seed)>;

// Classifier kinds are looked up in a registry; knn, logistic_regression and
// random_forest are registered up front.
void register_classifier(const std::string& kind, Trainer trainer);
std::vector<std::string> registered_classifiers();

// Throws Error("ml", "UnknownClassifier"), Error("ml", "SingleClassData")
// (logistic_regression and random_forest need both classes), or
// Error("ml", "InvalidHyperparameter").
std::unique_ptr<Model> train(const ClassifierSpec& spec, const Dataset& data, std::uint64_t seed = 0);

// Mean log-loss plus (l2/2)*|w|^2 (bias unpenalized) and its gradient with
// respect to (w..., bias). Exposed for gradient checks.
double logistic_loss(std::span<const double> params, const Dataset& data, double l2,
                     std::vector<double>* gradient = nullptr);

struct FoldMetrics {
    double precision = 0.0;
    double recall = 0.0;
    double f_measure = 0.0;
};

struct CVReport {
    ClassifierSpec spec;
    std::vector<FoldMetrics> per_fold;
    double mean_precision = 0.0;
    double mean_recall = 0.0;
    double mean_f = 0.0;
};

// Stratified seeded folds; scaling is fit on each training split only.
// Throws Error("ml", "TooFewSamples") or Error("ml", "SingleClassData").
CVReport cross_validate(const ClassifierSpec& spec, const Dataset& data, std::size_t folds = 10,
                        std::uint64_t seed = 0);

// Hyperparameter name -> candidate values.
using Grid = std::map<std::string, std::vector<Param>>;

Grid default_grid(const std::string& kind);
// Cartesian product in map-key order, last key varying fastest.
std::vector<ClassifierSpec> expand_grid(const std::string& kind, const Grid& grid);

// Best mean F over the grid, first combination on ties.
// Throws Error("ml", "EmptyGrid").
std::pair<ClassifierSpec, CVReport> grid_search(const std::string& kind, const Dataset& data,
                                                const Grid& grid, std::size_t folds = 10,
                                                std::uint64_t seed = 0);

void write_report_json(std::ostream& out, const std::vector<CVReport>& reports);
// classifier,hyperparams,mean_p,mean_r,mean_f
void write_report_csv(std::ostream& out, const std::vector<CVReport>& reports);

} // namespace filexpert::ml
