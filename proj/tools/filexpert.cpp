// filexpert: mine repositories and identify source code file experts.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include <CLI11.hpp>
#include <json.hpp>

#include "filexpert/analytics.hpp"
#include "filexpert/conditionals.hpp"
#include "filexpert/csv.hpp"
#include "filexpert/error.hpp"
#include "filexpert/expertise.hpp"
#include "filexpert/features.hpp"
#include "filexpert/history.hpp"
#include "filexpert/history_io.hpp"
#include "filexpert/identity.hpp"
#include "filexpert/ml.hpp"
#include "filexpert/process.hpp"
#include "filexpert/study.hpp"

namespace fs = std::filesystem;
using namespace filexpert;
using nlohmann::json;

namespace {

struct RunConfig {
    std::vector<std::string> repos;
    std::string branch;
    std::uint64_t seed = 0;
    std::string out;
    std::string format = "csv";
    double alias_threshold = 0.30;
    double mod_threshold = diff::default_mod_threshold;
    std::optional<history::Timestamp> reference_time;
    std::size_t folds = 10;
    std::string aliases;
    std::string conditionals;
    std::string cache;
    std::string history_in;
};

// --- output ---------------------------------------------------------------

// Writes to stdout, or to `path` via a temporary file renamed into place.
void emit(const RunConfig& cfg, const std::string& content) {
    if (cfg.out.empty() || cfg.out == "-") {
        std::cout << content << std::flush;
        return;
    }
    fs::path target(cfg.out);
    if (target.has_parent_path())
        fs::create_directories(target.parent_path());
    fs::path tmp = target;
    tmp += ".tmp." + std::to_string(::getpid());
    {
        std::ofstream f(tmp, std::ios::binary);
        if (!f)
            throw Error("cli", "OutputFailed", "cannot write " + tmp.string());
        f << content;
        f.flush();
        if (!f)
            throw Error("cli", "OutputFailed", "cannot write " + tmp.string());
    }
    fs::rename(tmp, target);
}

void require_format(const RunConfig& cfg) {
    if (cfg.format != "csv" && cfg.format != "json")
        throw Error("cli", "InvalidFormat", "format must be csv or json");
}

std::string num(double v) { return features::format_number(v); }

// --- corpus loading ---------------------------------------------------------

struct Repo {
    std::string name;
    fs::path path;
    history::CommitHistory raw;       // source files only, raw identities
    history::CommitHistory canonical; // authors replaced by developer keys
    identity::IdentityMap identities;
    features::FeatureTable table;
};

// "name=path" or a bare path named after its last component.
std::pair<std::string, fs::path> split_repo_arg(const std::string& arg) {
    auto eq = arg.find('=');
    if (eq != std::string::npos && eq > 0 && !fs::exists(arg))
        return {arg.substr(0, eq), fs::path(arg.substr(eq + 1))};
    fs::path p(arg);
    auto name = fs::weakly_canonical(p).filename().string();
    if (name.empty())
        name = p.string();
    return {name, p};
}

std::optional<std::string> tip_of(const fs::path& repo, const std::string& branch) {
    std::vector<std::string> candidates;
    if (branch.empty())
        candidates = {"master", "HEAD"};
    else
        candidates = {branch};
    for (const auto& c : candidates) {
        try {
            auto r = process::run({"git", "rev-parse", "--verify", "--quiet", c + "^{commit}"}, repo.string());
            if (r.exit_code == 0 && r.out.size() >= 40)
                return r.out.substr(0, 40) + "-" + c;
        } catch (const Error&) {
            return std::nullopt;
        }
    }
    return std::nullopt;
}

history::CommitHistory mine_history(const RunConfig& cfg, const fs::path& repo) {
    std::optional<fs::path> cached;
    if (!cfg.cache.empty()) {
        if (auto tip = tip_of(repo, cfg.branch)) {
            auto key = *tip;
            std::replace(key.begin(), key.end(), '/', '_');
            cached = fs::path(cfg.cache) / (key + ".ndjson");
            if (fs::exists(*cached)) {
                std::ifstream in(*cached, std::ios::binary);
                return history::read_ndjson(in);
            }
        }
    }
    auto h = history::extract_history(repo, cfg.branch);
    if (cached) {
        fs::create_directories(cached->parent_path());
        std::ostringstream os;
        history::write_ndjson(os, h);
        RunConfig sub;
        sub.out = cached->string();
        emit(sub, os.str());
    }
    return h;
}

class Pipeline {
public:
    explicit Pipeline(const RunConfig& cfg) : cfg_(cfg) {
        if (cfg.alias_threshold < 0 || cfg.alias_threshold > 1)
            throw Error("cli", "InvalidConfig", "--alias-threshold must be in [0,1]");
        if (cfg.mod_threshold < 0 || cfg.mod_threshold > 1)
            throw Error("cli", "InvalidConfig", "--mod-threshold must be in [0,1]");
        if (cfg.folds < 2)
            throw Error("cli", "InvalidConfig", "--folds must be at least 2");
        require_format(cfg);
        if (!cfg.aliases.empty())
            resolve_.manual_aliases = identity::read_alias_csv(cfg.aliases);
        resolve_.alias_threshold = cfg.alias_threshold;
        if (!cfg.conditionals.empty())
            keywords_ = diff::KeywordTable::from_json_file(cfg.conditionals);
        options_.mod_threshold = cfg.mod_threshold;
        options_.keywords = &keywords_;
    }

    std::vector<Repo>& repos() {
        if (!loaded_)
            load();
        return repos_;
    }

    // All repositories' features; with several repositories files become "repo:path".
    features::FeatureTable pooled_table() {
        auto& rs = repos();
        if (rs.size() == 1)
            return rs.front().table;
        features::FeatureTable out;
        for (const auto& r : rs) {
            out.reference_time = std::max(out.reference_time, r.table.reference_time);
            for (auto row : r.table.rows) {
                row.file = qualify(r.name, row.file);
                out.rows.push_back(std::move(row));
            }
        }
        std::sort(out.rows.begin(), out.rows.end(), [](const auto& a, const auto& b) {
            return std::tie(a.file, a.developer) < std::tie(b.file, b.developer);
        });
        return out;
    }

    std::string qualify(const std::string& repo, const std::string& file) {
        return repos().size() == 1 ? file : repo + ":" + file;
    }

    const RunConfig& config() const { return cfg_; }

private:
    const RunConfig& cfg_;
    identity::ResolveOptions resolve_;
    diff::KeywordTable keywords_ = diff::KeywordTable::defaults();
    features::FeatureOptions options_;
    std::vector<Repo> repos_;
    bool loaded_ = false;

    void finish(Repo& r, history::CommitHistory raw) {
        r.raw = history::filter_source_files(raw, history::SourceFilter{});
        if (cfg_.reference_time)
            r.raw.reference_time = *cfg_.reference_time;
        std::vector<history::RawIdentity> ids;
        for (const auto& c : r.raw.commits)
            ids.push_back(c.author);
        r.identities = identity::resolve_identities(ids, resolve_);
        r.canonical = identity::canonicalize_history(r.raw, resolve_);
        r.table = features::compute_all(r.canonical, options_);
    }

    void load() {
        loaded_ = true;
        if (!cfg_.history_in.empty()) {
            std::ifstream in(cfg_.history_in, std::ios::binary);
            if (!in)
                throw Error("cli", "FileNotFound", "cannot open " + cfg_.history_in);
            Repo r;
            r.name = fs::path(cfg_.history_in).stem().string();
            finish(r, history::read_ndjson(in));
            repos_.push_back(std::move(r));
            return;
        }
        if (cfg_.repos.empty())
            throw Error("cli", "MissingInput", "no --repo given");
        for (const auto& arg : cfg_.repos) {
            Repo r;
            std::tie(r.name, r.path) = split_repo_arg(arg);
            finish(r, mine_history(cfg_, r.path));
            repos_.push_back(std::move(r));
        }
    }
};

// --- ground truth -------------------------------------------------------------

struct Truth {
    study::AnswerReport report; // files qualified like Pipeline::pooled_table
    std::map<std::string, study::AnswerReport> per_repo;
};

Truth load_truth(Pipeline& p, const std::string& path, const std::string& mapping_path) {
    if (path.empty())
        throw Error("cli", "MissingInput", "--truth is required");
    auto mapping = mapping_path.empty() ? study::ColumnMapping{} : study::ColumnMapping::from_json_file(mapping_path);
    auto answers = study::read_ground_truth(path, mapping);
    auto& repos = p.repos();
    Truth t;
    t.report.dataset = ml::make_expertise_dataset();
    std::vector<bool> used(answers.size(), false);
    for (const auto& r : repos) {
        std::vector<study::RawAnswer> mine;
        for (std::size_t i = 0; i < answers.size(); ++i)
            if (repos.size() == 1 || answers[i].repo == r.name) {
                mine.push_back(answers[i]);
                used[i] = true;
            }
        auto rep = study::process_answers(mine, r.table, study::email_resolver(r.identities));
        for (const auto& pair : rep.oracle.declared_experts)
            t.report.oracle.declared_experts.insert({pair.first, p.qualify(r.name, pair.second)});
        for (const auto& pair : rep.oracle.declared_non_experts)
            t.report.oracle.declared_non_experts.insert({pair.first, p.qualify(r.name, pair.second)});
        for (auto e : rep.entries) {
            e.file = p.qualify(r.name, e.file);
            t.report.entries.push_back(std::move(e));
        }
        for (auto row : rep.dataset.rows) {
            row.file = p.qualify(r.name, row.file);
            t.report.dataset.rows.push_back(std::move(row));
        }
        t.report.knowledge.insert(t.report.knowledge.end(), rep.knowledge.begin(), rep.knowledge.end());
        for (const auto& u : rep.unresolved)
            t.report.unresolved.push_back(r.name + ": " + u);
        for (const auto& d : rep.duplicates)
            t.report.duplicates.push_back(r.name + ": " + d);
        t.per_repo.emplace(r.name, std::move(rep));
    }
    for (std::size_t i = 0; i < answers.size(); ++i)
        if (!used[i])
            t.report.unresolved.push_back("line " + std::to_string(answers[i].line) + ": repository '" +
                                          answers[i].repo + "' not loaded");
    return t;
}

void warn_unresolved(const study::AnswerReport& r) {
    if (r.unresolved.empty() && r.duplicates.empty())
        return;
    json w{{"warning", "study.UnresolvedPair"}, {"unresolved", r.unresolved}, {"duplicates", r.duplicates}};
    std::cerr << w.dump() << '\n';
}

// --- subcommands ------------------------------------------------------------

void cmd_features(Pipeline& p) {
    auto table = p.pooled_table();
    std::ostringstream os;
    if (p.config().format == "json") {
        auto rows = json::array();
        for (const auto& r : table.rows) {
            const auto& f = r.features;
            rows.push_back({{"developer", r.developer}, {"file", r.file}, {"adds", f.adds}, {"dels", f.dels},
                            {"mods", f.mods}, {"conds", f.conds}, {"amount", f.amount}, {"fa", f.fa},
                            {"blame", f.blame}, {"num_commits", f.num_commits}, {"num_days", f.num_days},
                            {"num_mod_devs", f.num_mod_devs}, {"size", f.size},
                            {"avg_days_commits", f.avg_days_commits}});
        }
        os << json{{"reference_time", table.reference_time}, {"rows", rows}}.dump(2) << '\n';
    } else {
        features::write_csv(os, table);
    }
    emit(p.config(), os.str());
}

void cmd_mine(Pipeline& p, const std::string& history_out) {
    if (!history_out.empty()) {
        auto& repos = p.repos();
        if (repos.size() != 1)
            throw Error("cli", "InvalidConfig", "--history-out needs exactly one repository");
        std::ostringstream os;
        history::write_ndjson(os, repos.front().raw);
        RunConfig sub;
        sub.out = history_out;
        emit(sub, os.str());
    }
    cmd_features(p);
}

void cmd_rank(Pipeline& p, const std::string& technique_name, const std::string& file,
              std::optional<double> k) {
    auto technique = expertise::technique_from_string(technique_name);
    auto table = p.pooled_table();
    auto scores = expertise::technique_scores(table, technique);
    if (!file.empty()) {
        std::erase_if(scores, [&](const auto& s) { return s.file != file; });
        if (scores.empty())
            throw Error("cli", "FileNotFound", "no developers for '" + file + "'");
    }
    if (k && (*k < 0 || *k > 1))
        throw Error("expertise", "InvalidThreshold", "k must be in [0,1]");
    std::stable_sort(scores.begin(), scores.end(), [](const auto& a, const auto& b) {
        if (a.file != b.file)
            return a.file < b.file;
        if (a.normalized != b.normalized)
            return a.normalized > b.normalized;
        return a.developer < b.developer;
    });
    std::ostringstream os;
    if (p.config().format == "json") {
        auto rows = json::array();
        for (const auto& s : scores) {
            json row{{"developer", s.developer}, {"file", s.file}, {"technique", expertise::to_string(technique)},
                     {"raw", s.raw}, {"normalized", s.normalized}};
            if (k)
                row["expert"] = expertise::is_expert(s.normalized, *k);
            rows.push_back(row);
        }
        os << rows.dump(2) << '\n';
    } else {
        csv::Row header{"developer", "file", "technique", "raw", "normalized"};
        if (k)
            header.push_back("expert");
        csv::write_row(os, header);
        for (const auto& s : scores) {
            csv::Row row{s.developer, s.file, std::string(expertise::to_string(technique)), num(s.raw),
                         num(s.normalized)};
            if (k)
                row.push_back(expertise::is_expert(s.normalized, *k) ? "1" : "0");
            csv::write_row(os, row);
        }
    }
    emit(p.config(), os.str());
}

void cmd_calibrate(Pipeline& p, const std::string& truth, const std::string& mapping,
                   const std::vector<std::string>& technique_names) {
    auto t = load_truth(p, truth, mapping);
    warn_unresolved(t.report);
    auto table = p.pooled_table();
    std::vector<expertise::Technique> techniques;
    if (technique_names.empty())
        techniques.assign(expertise::all_techniques.begin(), expertise::all_techniques.end());
    for (const auto& n : technique_names)
        techniques.push_back(expertise::technique_from_string(n));
    const auto& cfg = p.config();
    std::ostringstream os;
    auto all = json::array();
    if (cfg.format == "csv")
        csv::write_row(os, {"technique", "k", "precision", "recall", "f_measure", "best"});
    for (auto tech : techniques) {
        auto curve = expertise::calibrate(expertise::technique_scores(table, tech), t.report.oracle, cfg.folds,
                                          cfg.seed);
        auto points = json::array();
        for (const auto& pt : curve.points) {
            const bool best = pt.k == curve.best_k;
            if (cfg.format == "csv")
                csv::write_row(os, {std::string(expertise::to_string(tech)), num(pt.k), num(pt.precision),
                                    num(pt.recall), num(pt.f_measure), best ? "1" : "0"});
            points.push_back({{"k", pt.k}, {"precision", pt.precision}, {"recall", pt.recall},
                              {"f_measure", pt.f_measure}});
        }
        all.push_back({{"technique", expertise::to_string(tech)}, {"best_k", curve.best_k}, {"points", points}});
    }
    if (cfg.format == "json")
        os << all.dump(2) << '\n';
    emit(cfg, os.str());
}

void cmd_evaluate(Pipeline& p, const std::string& truth, const std::string& mapping, const std::string& classifier,
                  const std::string& grid) {
    if (grid != "default" && grid != "none")
        throw Error("cli", "InvalidConfig", "--grid must be 'default' or 'none'");
    auto t = load_truth(p, truth, mapping);
    warn_unresolved(t.report);
    const auto& cfg = p.config();
    std::vector<std::string> kinds;
    if (classifier == "all")
        kinds = {"knn", "logistic_regression", "random_forest"};
    else
        kinds = {classifier};
    std::vector<ml::CVReport> reports;
    for (const auto& kind : kinds) {
        if (grid == "default")
            reports.push_back(ml::grid_search(kind, t.report.dataset, ml::default_grid(kind), cfg.folds, cfg.seed).second);
        else
            reports.push_back(ml::cross_validate({kind, {}}, t.report.dataset, cfg.folds, cfg.seed));
    }
    std::ostringstream os;
    if (cfg.format == "json")
        ml::write_report_json(os, reports);
    else
        ml::write_report_csv(os, reports);
    emit(cfg, os.str());
}

void cmd_correlate(Pipeline& p, const std::string& truth, const std::string& mapping, bool matrix) {
    const auto& cfg = p.config();
    std::ostringstream os;
    if (matrix) {
        auto m = analytics::correlation_matrix(analytics::variables_of(p.pooled_table()));
        if (cfg.format == "json") {
            auto cells = json::array();
            for (std::size_t i = 0; i < m.variables.size(); ++i)
                for (std::size_t j = 0; j < m.variables.size(); ++j) {
                    const auto& c = m.cells[i][j];
                    json cell{{"row", m.variables[i]}, {"column", m.variables[j]}};
                    if (c.result)
                        cell.update({{"rho", c.result->rho}, {"p", c.result->p_value}, {"n", c.result->n}});
                    else
                        cell["error"] = c.error;
                    cells.push_back(cell);
                }
            os << cells.dump(2) << '\n';
        } else {
            analytics::write_matrix_csv(os, m);
        }
        emit(cfg, os.str());
        return;
    }
    auto t = load_truth(p, truth, mapping);
    warn_unresolved(t.report);
    auto& repos = p.repos();
    // Rows of each dataset as variable columns plus knowledge.
    auto variables = [&](const study::AnswerReport& r, const features::FeatureTable& table) {
        analytics::VariableTable v;
        std::vector<std::vector<double>> cols(analytics::variable_names().size());
        for (const auto& e : r.entries) {
            const auto* row = table.find(e.developer, e.file);
            auto vals = analytics::variable_values(row->features);
            for (std::size_t j = 0; j < vals.size(); ++j)
                cols[j].push_back(vals[j]);
        }
        for (std::size_t j = 0; j < cols.size(); ++j)
            v.add(analytics::variable_names()[j], std::move(cols[j]));
        return v;
    };
    auto pooled = p.pooled_table();
    std::vector<std::pair<std::string, std::vector<analytics::Cell>>> sets;
    if (repos.size() > 1)
        for (const auto& r : repos) {
            const auto& rep = t.per_repo.at(r.name);
            if (rep.entries.size() < 3)
                continue;
            sets.emplace_back(r.name, analytics::correlate_with(variables(rep, r.table), rep.knowledge));
        }
    sets.emplace_back(repos.size() > 1 ? "pooled" : repos.front().name,
                      analytics::correlate_with(variables(t.report, pooled), t.report.knowledge));
    if (cfg.format == "json") {
        auto out = json::array();
        for (const auto& [name, cells] : sets)
            for (const auto& c : cells) {
                json row{{"dataset", name}, {"variable", c.result->variable}, {"n", c.result->n}};
                if (c.error.empty())
                    row.update({{"rho", c.result->rho}, {"p", c.result->p_value}});
                else
                    row["error"] = c.error;
                out.push_back(row);
            }
        os << out.dump(2) << '\n';
    } else {
        bool header = true;
        for (const auto& [name, cells] : sets) {
            analytics::write_correlations_csv(os, name, cells, header);
            header = false;
        }
    }
    emit(cfg, os.str());
}

void cmd_sample(Pipeline& p, std::size_t limit) {
    auto& repos = p.repos();
    const auto& cfg = p.config();
    std::ostringstream os;
    auto rows = json::array();
    if (cfg.format == "csv")
        csv::write_row(os, repos.size() > 1 ? csv::Row{"repo", "developer_email", "file"}
                                            : csv::Row{"developer_email", "file"});
    for (const auto& r : repos) {
        for (const auto& s : study::generate_sample(r.canonical, limit, cfg.seed)) {
            if (cfg.format == "json")
                rows.push_back({{"repo", r.name}, {"developer_email", s.developer}, {"file", s.file}});
            else if (repos.size() > 1)
                csv::write_row(os, {r.name, s.developer, s.file});
            else
                csv::write_row(os, {s.developer, s.file});
        }
    }
    if (cfg.format == "json")
        os << rows.dump(2) << '\n';
    emit(cfg, os.str());
}

void cmd_filter_corpus(Pipeline& p, const std::string& metrics_csv) {
    const auto& cfg = p.config();
    std::vector<study::RepoMetrics> metrics;
    json bulk = json::array();
    if (!metrics_csv.empty()) {
        metrics = study::read_metrics_csv(metrics_csv);
    } else {
        for (const auto& r : p.repos()) {
            auto b = study::detect_bulk_import(r.canonical);
            if (b.flagged) {
                bulk.push_back({{"repo", r.name},
                                {"outlier_commits", b.outlier_commits},
                                {"outlier_files_added", b.outlier_files_added},
                                {"files_added", b.files_added}});
                continue;
            }
            metrics.push_back(study::metrics_of(r.name, r.canonical));
        }
    }
    if (!bulk.empty())
        std::cerr << json{{"warning", "study.BulkImport"}, {"removed", bulk}}.dump() << '\n';
    auto kept = study::quartile_filter(metrics);
    std::ostringstream os;
    if (cfg.format == "json") {
        auto arr = json::array();
        for (const auto& m : kept)
            arr.push_back({{"repo", m.repo}, {"commits", m.commits}, {"files", m.files}, {"developers", m.developers}});
        os << arr.dump(2) << '\n';
    } else {
        study::write_metrics_csv(os, kept);
    }
    emit(cfg, os.str());
}

void cmd_ingest_truth(Pipeline& p, const std::string& truth, const std::string& mapping) {
    auto t = load_truth(p, truth, mapping);
    const auto& cfg = p.config();
    std::ostringstream os;
    if (cfg.format == "json") {
        auto entries = json::array();
        for (const auto& e : t.report.entries)
            entries.push_back({{"repo", e.repo}, {"developer", e.developer}, {"file", e.file},
                               {"knowledge", e.knowledge}, {"label", e.expert ? "expert" : "non_expert"}});
        os << json{{"entries", entries},
                   {"experts", t.report.oracle.declared_experts.size()},
                   {"non_experts", t.report.oracle.declared_non_experts.size()},
                   {"unresolved", t.report.unresolved},
                   {"duplicates", t.report.duplicates}}
                  .dump(2)
           << '\n';
    } else {
        warn_unresolved(t.report);
        csv::write_row(os, {"repo", "developer", "file", "knowledge", "label"});
        for (const auto& e : t.report.entries)
            csv::write_row(os, {e.repo, e.developer, e.file, std::to_string(e.knowledge),
                                e.expert ? "expert" : "non_expert"});
    }
    emit(cfg, os.str());
}

int fail(const std::string& code, const std::string& message) {
    std::cerr << json{{"error", code}, {"message", message}}.dump(-1, ' ', false, json::error_handler_t::replace)
              << '\n';
    return 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Identify source code file experts from version control history"};
    app.fallthrough();
    app.require_subcommand(1);

    RunConfig cfg;
    std::optional<history::Timestamp> reference_time;
    app.add_option("--repo", cfg.repos, "Repository path, or name=path (repeatable)");
    app.add_option("--branch", cfg.branch, "Branch to mine (default master, else HEAD's branch)");
    app.add_option("--seed", cfg.seed, "Seed for every random choice");
    app.add_option("--out", cfg.out, "Output file (default stdout)");
    app.add_option("--format", cfg.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    app.add_option("--alias-threshold", cfg.alias_threshold, "Name similarity threshold for alias merging");
    app.add_option("--mod-threshold", cfg.mod_threshold, "Edit-distance ratio below which a line pair is a modification");
    app.add_option("--reference-time", reference_time, "Unix time used as 'now' for day counts");
    app.add_option("--folds", cfg.folds, "Cross-validation folds");
    app.add_option("--aliases", cfg.aliases, "CSV of email pairs naming one developer");
    app.add_option("--conditionals", cfg.conditionals, "JSON overriding conditional keywords per language");
    app.add_option("--cache", cfg.cache, "Directory caching mined histories by tip hash");
    app.add_option("--history", cfg.history_in, "Read a mined history (NDJSON) instead of a repository");

    std::string history_out, technique = "doa", file, truth, mapping, classifier = "all", grid = "default",
                                  metrics_csv;
    std::vector<std::string> techniques;
    std::optional<double> k;
    std::size_t limit = 5;
    bool matrix = false;

    auto* mine = app.add_subcommand("mine", "Mine repositories and write the features CSV");
    mine->add_option("--history-out", history_out, "Also save the mined history as NDJSON");
    auto* feats = app.add_subcommand("features", "Write the features CSV");
    auto* rank = app.add_subcommand("rank", "Score developers per file with a linear technique");
    rank->add_option("--technique", technique, "doa, blame or num_commits");
    rank->add_option("--file", file, "Only this file");
    rank->add_option("--k", k, "Also mark experts at this threshold");
    auto* calib = app.add_subcommand("calibrate", "Threshold curves of the linear techniques against ground truth");
    calib->add_option("--truth", truth, "Ground-truth CSV")->required();
    calib->add_option("--mapping", mapping, "JSON column mapping for the ground-truth CSV");
    calib->add_option("--technique", techniques, "Techniques to calibrate (default all)");
    auto* eval = app.add_subcommand("evaluate", "Cross-validate classifiers on the ground truth");
    eval->add_option("--truth", truth, "Ground-truth CSV")->required();
    eval->add_option("--mapping", mapping, "JSON column mapping for the ground-truth CSV");
    eval->add_option("--classifier", classifier, "knn, logistic_regression, random_forest or all");
    eval->add_option("--grid", grid, "default (grid search) or none (default hyperparameters)");
    auto* corr = app.add_subcommand("correlate", "Spearman correlation of the variables with declared knowledge");
    corr->add_option("--truth", truth, "Ground-truth CSV");
    corr->add_option("--mapping", mapping, "JSON column mapping for the ground-truth CSV");
    corr->add_flag("--matrix", matrix, "Inter-variable matrix over all developer-file pairs instead");
    auto* sample = app.add_subcommand("sample", "Draw developer-file pairs for a survey");
    sample->add_option("--limit", limit, "Files per developer at most");
    auto* filter = app.add_subcommand("filter-corpus", "Drop repositories below the first quartile of any metric");
    filter->add_option("metrics", metrics_csv, "CSV repo,commits,files,developers (default: measure --repo list)");
    auto* ingest = app.add_subcommand("ingest-truth", "Join ground-truth answers with mined developers and files");
    ingest->add_option("truth", truth, "Ground-truth CSV")->required();
    ingest->add_option("--mapping", mapping, "JSON column mapping for the ground-truth CSV");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }
    cfg.reference_time = reference_time;

    try {
        Pipeline p(cfg);
        if (mine->parsed())
            cmd_mine(p, history_out);
        else if (feats->parsed())
            cmd_features(p);
        else if (rank->parsed())
            cmd_rank(p, technique, file, k);
        else if (calib->parsed())
            cmd_calibrate(p, truth, mapping, techniques);
        else if (eval->parsed())
            cmd_evaluate(p, truth, mapping, classifier, grid);
        else if (corr->parsed()) {
            if (!matrix && truth.empty())
                throw Error("cli", "MissingInput", "correlate needs --truth or --matrix");
            cmd_correlate(p, truth, mapping, matrix);
        } else if (sample->parsed())
            cmd_sample(p, limit);
        else if (filter->parsed())
            cmd_filter_corpus(p, metrics_csv);
        else if (ingest->parsed())
            cmd_ingest_truth(p, truth, mapping);
    } catch (const Error& e) {
        return fail(e.code(), e.what());
    } catch (const fs::filesystem_error& e) {
        return fail("cli.FilesystemError", e.what());
    } catch (const std::exception& e) {
        return fail("cli.InternalError", e.what());
    }
    return 0;
}
