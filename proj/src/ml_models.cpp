#include <algorithm>
#include <cmath>
#include <mutex>
#include <numeric>
#include <string_view>

#include "filexpert/error.hpp"
#include "filexpert/folds.hpp"
#include "filexpert/ml.hpp"

namespace filexpert::ml {

namespace {

bool has_both_classes(const Dataset& data) {
    bool pos = false, neg = false;
    for (const auto& r : data.rows)
        (r.label ? pos : neg) = true;
    return pos && neg;
}

void check_names(const ClassifierSpec& spec, std::initializer_list<std::string_view> known) {
    for (const auto& [name, value] : spec.hyperparameters)
        if (std::find(known.begin(), known.end(), name) == known.end())
            throw Error("ml", "InvalidHyperparameter", spec.kind + ": unknown hyperparameter '" + name + "'");
}

void require_both_classes(const ClassifierSpec& spec, const Dataset& data) {
    if (!has_both_classes(data))
        throw Error("ml", "SingleClassData", spec.kind + " needs both classes in the training data");
}

// --- k nearest neighbours --------------------------------------------------

class KnnModel final : public Model {
public:
    KnnModel(const Dataset& data, std::size_t k, bool manhattan)
        : rows_(data.rows), k_(k), manhattan_(manhattan) {}

    double predict_score(std::span<const double> x) const override {
        std::vector<std::pair<double, std::size_t>> dist;
        dist.reserve(rows_.size());
        for (std::size_t i = 0; i < rows_.size(); ++i) {
            double d = 0.0;
            for (std::size_t j = 0; j < x.size(); ++j) {
                double diff = x[j] - rows_[i].x[j];
                d += manhattan_ ? std::abs(diff) : diff * diff;
            }
            dist.emplace_back(d, i);
        }
        std::size_t k = std::min(k_, dist.size());
        std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k), dist.end());
        std::size_t positive = 0;
        for (std::size_t i = 0; i < k; ++i)
            positive += static_cast<std::size_t>(rows_[dist[i].second].label);
        return static_cast<double>(positive) / static_cast<double>(k);
    }

private:
    std::vector<Sample> rows_;
    std::size_t k_;
    bool manhattan_;
};

std::unique_ptr<Model> train_knn(const ClassifierSpec& spec, const Dataset& data, std::uint64_t) {
    check_names(spec, {"k", "distance"});
    double k = spec.number("k", 5);
    if (k < 1 || k != std::floor(k))
        throw Error("ml", "InvalidHyperparameter", "knn: k must be a positive integer");
    auto distance = spec.text("distance", "euclidean");
    if (distance != "euclidean" && distance != "manhattan")
        throw Error("ml", "InvalidHyperparameter", "knn: unknown distance '" + distance + "'");
    if (data.rows.empty())
        throw Error("ml", "EmptyDataset", "knn needs at least one training row");
    return std::make_unique<KnnModel>(data, static_cast<std::size_t>(k), distance == "manhattan");
}

// --- logistic regression ---------------------------------------------------

double sigmoid(double z) {
    if (z >= 0)
        return 1.0 / (1.0 + std::exp(-z));
    double e = std::exp(z);
    return e / (1.0 + e);
}

double softplus(double z) { return std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z))); }

class LogisticModel final : public Model {
public:
    explicit LogisticModel(std::vector<double> params) : params_(std::move(params)) {}

    double predict_score(std::span<const double> x) const override {
        double z = params_.back();
        for (std::size_t j = 0; j < x.size(); ++j)
            z += params_[j] * x[j];
        return sigmoid(z);
    }

private:
    std::vector<double> params_; // weights..., bias
};

std::unique_ptr<Model> train_logistic(const ClassifierSpec& spec, const Dataset& data, std::uint64_t) {
    check_names(spec, {"l2", "tolerance", "max_iter"});
    require_both_classes(spec, data);
    const double l2 = spec.number("l2", 0.01);
    const double tolerance = spec.number("tolerance", 1e-6);
    const auto max_iter = static_cast<long>(spec.number("max_iter", 10000));
    if (l2 < 0 || tolerance <= 0 || max_iter < 1)
        throw Error("ml", "InvalidHyperparameter", "logistic_regression: bad l2/tolerance/max_iter");

    std::vector<double> params(data.dimension() + 1, 0.0), grad, trial(params.size()), trial_grad;
    double loss = logistic_loss(params, data, l2, &grad);
    double step = 1.0;
    for (long iter = 0; iter < max_iter; ++iter) {
        double gmax = 0.0, gnorm2 = 0.0;
        for (double g : grad) {
            gmax = std::max(gmax, std::abs(g));
            gnorm2 += g * g;
        }
        if (gmax < tolerance)
            break;
        // Backtracking line search on the Armijo condition.
        double trial_loss = 0.0;
        for (int halvings = 0; halvings < 60; ++halvings) {
            for (std::size_t j = 0; j < params.size(); ++j)
                trial[j] = params[j] - step * grad[j];
            trial_loss = logistic_loss(trial, data, l2, &trial_grad);
            if (trial_loss <= loss - 0.5 * step * gnorm2)
                break;
            step *= 0.5;
        }
        if (!(trial_loss < loss))
            break;
        params.swap(trial);
        grad.swap(trial_grad);
        loss = trial_loss;
        step = std::min(step * 2.0, 1e6);
    }
    return std::make_unique<LogisticModel>(std::move(params));
}

// --- random forest ---------------------------------------------------------

struct TreeNode {
    int feature = -1; // -1 for leaves
    double threshold = 0.0;
    std::size_t left = 0, right = 0;
    double value = 0.0; // fraction of positives reaching the node
};

class TreeBuilder {
public:
    TreeBuilder(const Dataset& data, long max_depth, std::size_t max_features, SeededRng& rng)
        : data_(data), max_depth_(max_depth), max_features_(max_features), rng_(rng) {}

    std::vector<TreeNode> build(std::vector<std::size_t> sample) {
        grow(sample, 0);
        return std::move(nodes_);
    }

private:
    const Dataset& data_;
    long max_depth_;
    std::size_t max_features_;
    SeededRng& rng_;
    std::vector<TreeNode> nodes_;

    std::size_t grow(std::vector<std::size_t>& idx, long depth) {
        std::size_t id = nodes_.size();
        nodes_.push_back({});
        std::size_t pos = 0;
        for (auto i : idx)
            pos += static_cast<std::size_t>(data_.rows[i].label);
        const double n = static_cast<double>(idx.size());
        nodes_[id].value = idx.empty() ? 0.0 : static_cast<double>(pos) / n;
        if (pos == 0 || pos == idx.size() || (max_depth_ >= 0 && depth >= max_depth_) || idx.size() < 2)
            return id;

        std::vector<std::size_t> features(data_.dimension());
        std::iota(features.begin(), features.end(), std::size_t{0});
        const std::size_t tried = std::min(max_features_, features.size());
        for (std::size_t i = 0; i < tried; ++i) {
            auto j = i + static_cast<std::size_t>(rng_.below(features.size() - i));
            std::swap(features[i], features[j]);
        }

        auto gini_sum = [](double p, double total) {
            // total * gini impurity
            if (total <= 0)
                return 0.0;
            double q = p / total;
            return total * 2.0 * q * (1.0 - q);
        };
        const double parent = gini_sum(static_cast<double>(pos), n);
        double best = parent - 1e-12;
        int best_feature = -1;
        double best_threshold = 0.0;

        std::vector<std::pair<double, int>> column(idx.size());
        for (std::size_t f = 0; f < tried; ++f) {
            const auto feature = features[f];
            for (std::size_t i = 0; i < idx.size(); ++i)
                column[i] = {data_.rows[idx[i]].x[feature], data_.rows[idx[i]].label};
            std::sort(column.begin(), column.end());
            double left_pos = 0.0;
            for (std::size_t i = 1; i < column.size(); ++i) {
                left_pos += column[i - 1].second;
                if (column[i].first == column[i - 1].first)
                    continue;
                double nl = static_cast<double>(i);
                double impurity = gini_sum(left_pos, nl) +
                                  gini_sum(static_cast<double>(pos) - left_pos, n - nl);
                if (impurity < best) {
                    best = impurity;
                    best_feature = static_cast<int>(feature);
                    best_threshold = column[i - 1].first + (column[i].first - column[i - 1].first) / 2.0;
                }
            }
        }
        if (best_feature < 0)
            return id;

        std::vector<std::size_t> left, right;
        for (auto i : idx)
            (data_.rows[i].x[static_cast<std::size_t>(best_feature)] <= best_threshold ? left : right)
                .push_back(i);
        idx.clear();
        idx.shrink_to_fit();
        nodes_[id].feature = best_feature;
        nodes_[id].threshold = best_threshold;
        std::size_t l = grow(left, depth + 1);
        std::size_t r = grow(right, depth + 1);
        nodes_[id].left = l;
        nodes_[id].right = r;
        return id;
    }
};

class ForestModel final : public Model {
public:
    explicit ForestModel(std::vector<std::vector<TreeNode>> trees) : trees_(std::move(trees)) {}

    double predict_score(std::span<const double> x) const override {
        double sum = 0.0;
        for (const auto& tree : trees_) {
            std::size_t node = 0;
            while (tree[node].feature >= 0)
                node = x[static_cast<std::size_t>(tree[node].feature)] <= tree[node].threshold
                           ? tree[node].left
                           : tree[node].right;
            sum += tree[node].value;
        }
        return sum / static_cast<double>(trees_.size());
    }

private:
    std::vector<std::vector<TreeNode>> trees_;
};

long depth_param(const ClassifierSpec& spec) {
    auto it = spec.hyperparameters.find("max_depth");
    if (it == spec.hyperparameters.end())
        return -1;
    if (const auto* s = std::get_if<std::string>(&it->second)) {
        if (*s == "unbounded" || *s == "none")
            return -1;
        throw Error("ml", "InvalidHyperparameter", "random_forest: bad max_depth '" + *s + "'");
    }
    double d = std::get<double>(it->second);
    if (d < 0 || d != std::floor(d))
        throw Error("ml", "InvalidHyperparameter", "random_forest: max_depth must be a non-negative integer");
    return static_cast<long>(d);
}

std::unique_ptr<Model> train_forest(const ClassifierSpec& spec, const Dataset& data, std::uint64_t seed) {
    check_names(spec, {"trees", "max_depth", "max_features", "bootstrap"});
    require_both_classes(spec, data);
    const double trees = spec.number("trees", 100);
    const double max_features = spec.number("max_features", 2);
    const bool bootstrap = spec.text("bootstrap", "true") != "false";
    if (trees < 1 || trees != std::floor(trees) || max_features < 1 ||
        max_features != std::floor(max_features))
        throw Error("ml", "InvalidHyperparameter", "random_forest: trees and max_features must be positive integers");
    const long max_depth = depth_param(spec);

    std::vector<std::vector<TreeNode>> forest;
    const auto n = data.rows.size();
    for (std::size_t t = 0; t < static_cast<std::size_t>(trees); ++t) {
        SeededRng rng(seed ^ (0x9E3779B97F4A7C15ULL * (t + 1)));
        std::vector<std::size_t> sample(n);
        if (bootstrap) {
            for (auto& s : sample)
                s = static_cast<std::size_t>(rng.below(n));
        } else {
            std::iota(sample.begin(), sample.end(), std::size_t{0});
        }
        TreeBuilder builder(data, max_depth, static_cast<std::size_t>(max_features), rng);
        forest.push_back(builder.build(std::move(sample)));
    }
    return std::make_unique<ForestModel>(std::move(forest));
}

struct Registry {
    std::mutex mutex;
    std::map<std::string, Trainer> trainers{
        {"knn", train_knn},
        {"logistic_regression", train_logistic},
        {"random_forest", train_forest},
    };
};

Registry& registry() {
    static Registry r;
    return r;
}

} // namespace

double logistic_loss(std::span<const double> params, const Dataset& data, double l2,
                     std::vector<double>* gradient) {
    const std::size_t dim = data.dimension();
    const auto n = static_cast<double>(data.rows.size());
    if (gradient)
        gradient->assign(dim + 1, 0.0);
    double loss = 0.0;
    for (const auto& r : data.rows) {
        double z = params[dim];
        for (std::size_t j = 0; j < dim; ++j)
            z += params[j] * r.x[j];
        loss += softplus(z) - r.label * z;
        if (gradient) {
            double g = sigmoid(z) - r.label;
            for (std::size_t j = 0; j < dim; ++j)
                (*gradient)[j] += g * r.x[j];
            (*gradient)[dim] += g;
        }
    }
    loss /= n;
    double penalty = 0.0;
    for (std::size_t j = 0; j < dim; ++j)
        penalty += params[j] * params[j];
    loss += 0.5 * l2 * penalty;
    if (gradient) {
        for (auto& g : *gradient)
            g /= n;
        for (std::size_t j = 0; j < dim; ++j)
            (*gradient)[j] += l2 * params[j];
    }
    return loss;
}

void register_classifier(const std::string& kind, Trainer trainer) {
    auto& r = registry();
    std::lock_guard lock(r.mutex);
    r.trainers.insert_or_assign(kind, std::move(trainer));
}

std::vector<std::string> registered_classifiers() {
    auto& r = registry();
    std::lock_guard lock(r.mutex);
    std::vector<std::string> kinds;
    for (const auto& [k, t] : r.trainers)
        kinds.push_back(k);
    return kinds;
}

std::unique_ptr<Model> train(const ClassifierSpec& spec, const Dataset& data, std::uint64_t seed) {
    Trainer trainer;
    {
        auto& r = registry();
        std::lock_guard lock(r.mutex);
        auto it = r.trainers.find(spec.kind);
        if (it == r.trainers.end())
            throw Error("ml", "UnknownClassifier", "unknown classifier '" + spec.kind + "'");
        trainer = it->second;
    }
    return trainer(spec, data, seed);
}

} // namespace filexpert::ml
