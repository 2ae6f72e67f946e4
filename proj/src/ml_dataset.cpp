#include <cmath>
#include <sstream>

#include "filexpert/error.hpp"
#include "filexpert/ml.hpp"

namespace filexpert::ml {

std::vector<int> Dataset::labels() const {
    std::vector<int> out;
    out.reserve(rows.size());
    for (const auto& r : rows)
        out.push_back(r.label);
    return out;
}

Dataset Dataset::subset(std::span<const std::size_t> indices) const {
    Dataset out{feature_names, continuous, {}};
    out.rows.reserve(indices.size());
    for (auto i : indices)
        out.rows.push_back(rows[i]);
    return out;
}

Dataset make_expertise_dataset() {
    return {{"adds", "fa", "size", "num_days"}, {true, false, true, true}, {}};
}

std::vector<double> expertise_features(const features::FeatureVector& f) {
    return {static_cast<double>(f.adds), static_cast<double>(f.fa), static_cast<double>(f.size),
            f.num_days};
}

std::vector<double> Scaling::apply(std::span<const double> x) const {
    std::vector<double> out(x.begin(), x.end());
    for (std::size_t j = 0; j < out.size() && j < mean.size(); ++j)
        out[j] = (out[j] - mean[j]) / scale[j];
    return out;
}

Dataset Scaling::apply(const Dataset& data) const {
    Dataset out = data;
    for (auto& r : out.rows)
        r.x = apply(r.x);
    return out;
}

Scaling fit_scaling(const Dataset& data) {
    if (data.rows.empty())
        throw Error("ml", "EmptyDataset", "cannot standardize an empty dataset");
    const std::size_t dim = data.dimension();
    Scaling s;
    s.mean.assign(dim, 0.0);
    s.scale.assign(dim, 1.0);
    const auto n = static_cast<double>(data.rows.size());
    for (std::size_t j = 0; j < dim; ++j) {
        if (j < data.continuous.size() && !data.continuous[j])
            continue;
        double sum = 0.0;
        for (const auto& r : data.rows)
            sum += r.x[j];
        double mean = sum / n;
        double ss = 0.0;
        for (const auto& r : data.rows)
            ss += (r.x[j] - mean) * (r.x[j] - mean);
        double sd = std::sqrt(ss / n);
        if (!(sd > 0.0) || !std::isfinite(sd)) {
            s.warnings.push_back("ZeroVariance: feature '" + data.feature_names[j] +
                                 "' is constant and passes through unscaled");
            continue;
        }
        s.mean[j] = mean;
        s.scale[j] = sd;
    }
    return s;
}

std::pair<Dataset, Scaling> standardize(const Dataset& data) {
    auto scaling = fit_scaling(data);
    return {scaling.apply(data), std::move(scaling)};
}

double ClassifierSpec::number(const std::string& name, double fallback) const {
    auto it = hyperparameters.find(name);
    if (it == hyperparameters.end())
        return fallback;
    if (const auto* d = std::get_if<double>(&it->second))
        return *d;
    throw Error("ml", "InvalidHyperparameter", kind + ": '" + name + "' must be numeric");
}

std::string ClassifierSpec::text(const std::string& name, const std::string& fallback) const {
    auto it = hyperparameters.find(name);
    if (it == hyperparameters.end())
        return fallback;
    if (const auto* s = std::get_if<std::string>(&it->second))
        return *s;
    std::ostringstream os;
    os << std::get<double>(it->second);
    return os.str();
}

std::string ClassifierSpec::describe() const {
    std::ostringstream os;
    bool first = true;
    for (const auto& [name, value] : hyperparameters) {
        os << (first ? "" : ";") << name << '=';
        std::visit([&](const auto& v) { os << v; }, value);
        first = false;
    }
    return os.str();
}

} // namespace filexpert::ml
