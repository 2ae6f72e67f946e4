#include <algorithm>
#include <cmath>
#include <numeric>

#include <boost/math/distributions/students_t.hpp>

#include "filexpert/analytics.hpp"
#include "filexpert/csv.hpp"
#include "filexpert/error.hpp"

namespace filexpert::analytics {

namespace {

double pearson(std::span<const double> a, std::span<const double> b) {
    const auto n = static_cast<double>(a.size());
    double ma = std::accumulate(a.begin(), a.end(), 0.0) / n;
    double mb = std::accumulate(b.begin(), b.end(), 0.0) / n;
    double sab = 0.0, saa = 0.0, sbb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        sab += (a[i] - ma) * (b[i] - mb);
        saa += (a[i] - ma) * (a[i] - ma);
        sbb += (b[i] - mb) * (b[i] - mb);
    }
    return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

bool constant(std::span<const double> v) {
    return std::all_of(v.begin(), v.end(), [&](double x) { return x == v.front(); });
}

double t_p_value(double rho, std::size_t n) {
    if (std::abs(rho) >= 1.0)
        return 0.0;
    const double df = static_cast<double>(n - 2);
    const double t = rho * std::sqrt(df / (1.0 - rho * rho));
    boost::math::students_t dist(df);
    return std::min(1.0, 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(t))));
}

// Share of the n! rearrangements of y whose |rho| reaches the observed one.
double exact_p_value(const std::vector<double>& rx, std::vector<double> ry, double rho) {
    std::sort(ry.begin(), ry.end());
    const double target = std::abs(rho) - 1e-12;
    std::size_t hits = 0, total = 0;
    // Permute indices rather than values so tied ranks keep their multiplicity.
    std::vector<std::size_t> order(ry.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::vector<double> perm(ry.size());
    do {
        for (std::size_t i = 0; i < order.size(); ++i)
            perm[i] = ry[order[i]];
        ++total;
        if (std::abs(pearson(rx, perm)) >= target)
            ++hits;
    } while (std::next_permutation(order.begin(), order.end()));
    return static_cast<double>(hits) / static_cast<double>(total);
}

} // namespace

std::vector<double> average_ranks(std::span<const double> values) {
    std::vector<std::size_t> order(values.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return values[a] < values[b]; });
    std::vector<double> ranks(values.size());
    for (std::size_t i = 0; i < order.size();) {
        std::size_t j = i;
        while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]])
            ++j;
        const double rank = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
        for (std::size_t k = i; k <= j; ++k)
            ranks[order[k]] = rank;
        i = j + 1;
    }
    return ranks;
}

CorrelationResult spearman(std::span<const double> x, std::span<const double> y, PValueMethod method,
                           std::string variable) {
    if (x.size() != y.size())
        throw Error("analytics", "LengthMismatch",
                    std::to_string(x.size()) + " vs " + std::to_string(y.size()) + " values");
    if (x.size() < 3)
        throw Error("analytics", "TooFewSamples", "spearman needs at least 3 pairs");
    if (constant(x) || constant(y))
        throw Error("analytics", "ConstantInput",
                    (variable.empty() ? std::string("input") : variable) + " is constant; rho is undefined");
    if (method == PValueMethod::exact_permutation && x.size() > 10)
        throw Error("analytics", "TooManyForExact", "exact permutation test is limited to 10 samples");

    const auto rx = average_ranks(x);
    const auto ry = average_ranks(y);
    CorrelationResult r;
    r.variable = std::move(variable);
    r.n = x.size();
    r.rho = pearson(rx, ry);
    r.p_value = method == PValueMethod::exact_permutation ? exact_p_value(rx, ry, r.rho)
                                                          : t_p_value(r.rho, r.n);
    return r;
}

void VariableTable::add(std::string name, std::vector<double> column) {
    if (!columns.empty() && column.size() != rows())
        throw Error("analytics", "LengthMismatch", "column '" + name + "' has a different length");
    names.push_back(std::move(name));
    columns.push_back(std::move(column));
}

std::vector<double> variable_values(const features::FeatureVector& f) {
    return {static_cast<double>(f.adds),   static_cast<double>(f.dels),
            static_cast<double>(f.mods),   static_cast<double>(f.conds),
            static_cast<double>(f.amount), static_cast<double>(f.fa),
            static_cast<double>(f.blame),  static_cast<double>(f.num_commits),
            f.num_days,                    static_cast<double>(f.num_mod_devs),
            static_cast<double>(f.size),   f.avg_days_commits};
}

VariableTable variables_of(const features::FeatureTable& table) {
    const auto& names = variable_names();
    std::vector<std::vector<double>> columns(names.size());
    for (const auto& row : table.rows) {
        auto v = variable_values(row.features);
        for (std::size_t j = 0; j < v.size(); ++j)
            columns[j].push_back(v[j]);
    }
    VariableTable out;
    for (std::size_t j = 0; j < names.size(); ++j)
        out.add(names[j], std::move(columns[j]));
    return out;
}

namespace {

Cell make_cell(std::span<const double> a, std::span<const double> b, PValueMethod method,
               const std::string& name) {
    try {
        return {spearman(a, b, method, name), {}};
    } catch (const Error& e) {
        return {std::nullopt, e.code()};
    }
}

} // namespace

CorrelationMatrix correlation_matrix(const VariableTable& table) {
    if (table.rows() < 3)
        throw Error("analytics", "TooFewSamples", "correlation matrix needs at least 3 rows");
    const auto m = table.names.size();
    CorrelationMatrix out{table.names, std::vector<std::vector<Cell>>(m, std::vector<Cell>(m))};
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = i; j < m; ++j) {
            auto cell = make_cell(table.columns[i], table.columns[j], PValueMethod::t_approximation,
                                  table.names[i] + "~" + table.names[j]);
            out.cells[i][j] = cell;
            out.cells[j][i] = std::move(cell);
        }
    return out;
}

std::vector<Cell> correlate_with(const VariableTable& table, std::span<const double> target,
                                 PValueMethod method) {
    std::vector<Cell> out;
    for (std::size_t j = 0; j < table.names.size(); ++j) {
        auto cell = make_cell(table.columns[j], target, method, table.names[j]);
        if (!cell.result)
            cell.result = CorrelationResult{table.names[j], 0.0, 1.0, target.size()};
        out.push_back(std::move(cell));
    }
    return out;
}

void write_correlations_csv(std::ostream& out, const std::string& dataset, std::vector<Cell> cells,
                            bool header) {
    std::stable_sort(cells.begin(), cells.end(), [](const Cell& a, const Cell& b) {
        bool fa = !a.error.empty(), fb = !b.error.empty();
        if (fa != fb)
            return fb;
        return !fa && a.result->rho < b.result->rho;
    });
    if (header)
        csv::write_row(out, {"dataset", "variable", "rho", "p", "n"});
    for (const auto& c : cells) {
        const auto& r = *c.result;
        if (c.error.empty())
            csv::write_row(out, {dataset, r.variable, features::format_number(r.rho),
                                 features::format_number(r.p_value), std::to_string(r.n)});
        else
            csv::write_row(out, {dataset, r.variable, c.error, "", std::to_string(r.n)});
    }
}

void write_matrix_csv(std::ostream& out, const CorrelationMatrix& matrix) {
    csv::write_row(out, {"row", "column", "rho", "p", "n"});
    for (std::size_t i = 0; i < matrix.variables.size(); ++i)
        for (std::size_t j = 0; j < matrix.variables.size(); ++j) {
            const auto& c = matrix.cells[i][j];
            if (c.result)
                csv::write_row(out, {matrix.variables[i], matrix.variables[j],
                                     features::format_number(c.result->rho),
                                     features::format_number(c.result->p_value),
                                     std::to_string(c.result->n)});
            else
                csv::write_row(out, {matrix.variables[i], matrix.variables[j], c.error, "", ""});
        }
}

} // namespace filexpert::analytics
