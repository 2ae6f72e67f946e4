#pragma once

#include <cstddef>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "filexpert/features.hpp"

namespace filexpert::analytics {

struct CorrelationResult {
    std::string variable;
    double rho = 0.0;
    double p_value = 1.0;
    std::size_t n = 0;
};

enum class PValueMethod { t_approximation, exact_permutation };

// Average ranks (1-based), ties share the mean of their positions.
std::vector<double> average_ranks(std::span<const double> values);

// Spearman's rho with a two-sided p-value.
// Throws Error("analytics", "LengthMismatch" | "TooFewSamples" | "ConstantInput"),
// and "TooManyForExact" when the exact test is asked for more than 10 samples.
CorrelationResult spearman(std::span<const double> x, std::span<const double> y,
                           PValueMethod method = PValueMethod::t_approximation,
                           std::string variable = {});

// Named numeric columns of equal length.
struct VariableTable {
    std::vector<std::string> names;
    std::vector<std::vector<double>> columns;

    std::size_t rows() const { return columns.empty() ? 0 : columns.front().size(); }
    void add(std::string name, std::vector<double> column);
};

inline const std::vector<std::string>& variable_names() {
    static const std::vector<std::string> names{
        "adds",        "dels",     "mods",     "conds",        "amount", "fa",
        "blame",       "num_commits", "num_days", "num_mod_devs", "size", "avg_days_commits"};
    return names;
}

std::vector<double> variable_values(const features::FeatureVector& f);
VariableTable variables_of(const features::FeatureTable& table);

// One cell of a correlation matrix or ranking: either a result or the error code.
struct Cell {
    std::optional<CorrelationResult> result;
    std::string error; // "analytics.ConstantInput" etc. when result is empty
};

struct CorrelationMatrix {
    std::vector<std::string> variables;
    std::vector<std::vector<Cell>> cells;
};

// Throws Error("analytics", "TooFewSamples") below 3 rows.
CorrelationMatrix correlation_matrix(const VariableTable& table);

// Each variable against `target`, e.g. declared knowledge.
std::vector<Cell> correlate_with(const VariableTable& table, std::span<const double> target,
                                 PValueMethod method = PValueMethod::t_approximation);

// dataset,variable,rho,p,n sorted by rho ascending; failed cells trail with the error code.
void write_correlations_csv(std::ostream& out, const std::string& dataset, std::vector<Cell> cells,
                            bool header = true);
void write_matrix_csv(std::ostream& out, const CorrelationMatrix& matrix);

} // namespace filexpert::analytics
