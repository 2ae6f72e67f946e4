#include <doctest.h>

#include <algorithm>
#include <fstream>
#include <random>
#include <map>
#include <set>

#include "filexpert/error.hpp"
#include "filexpert/identity.hpp"
#include "filexpert/study.hpp"
#include "fixture.hpp"
#include "random_repo.hpp"

using namespace filexpert;
using history::ChangeKind;

namespace {

std::string code(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    return "no error";
}

history::CommitHistory adding_history(const std::vector<int>& files_per_commit) {
    history::CommitHistory h;
    int n = 0;
    for (std::size_t c = 0; c < files_per_commit.size(); ++c) {
        history::CommitRecord rec{"c" + std::to_string(c), {"A", "a@x"}, static_cast<history::Timestamp>(c), {}};
        for (int i = 0; i < files_per_commit[c]; ++i)
            rec.changes.push_back({"f" + std::to_string(n++) + ".c", ChangeKind::addition, {}, {}, "x\n"});
        h.commits.push_back(std::move(rec));
    }
    return h;
}

// Files touched by each developer, built as a history of additions and edits.
history::CommitHistory touch_history(const std::vector<std::pair<std::string, std::vector<std::string>>>& files) {
    history::CommitHistory h;
    history::Timestamp t = 0;
    for (const auto& [file, devs] : files) {
        bool first = true;
        for (const auto& d : devs) {
            history::FileChangeEvent e{file, first ? ChangeKind::addition : ChangeKind::modification, {},
                                       first ? std::optional<std::string>() : std::optional<std::string>("a\n"),
                                       first ? "a\n" : "a\n" + d + "\n"};
            h.commits.push_back({"c" + std::to_string(t), {d, d}, t, {e}});
            ++t;
            first = false;
        }
    }
    return h;
}

} // namespace

TEST_CASE("type-7 quantile") {
    CHECK(study::quantile({10, 20, 30, 40}, 0.25) == 17.5);
    CHECK(study::quantile({10, 20, 30, 40}, 0.75) == 32.5);
    CHECK(study::quantile({5}, 0.25) == 5);
    CHECK(study::quantile({3, 1, 2}, 0.5) == 2);
}

TEST_CASE("quartile filter") {
    std::vector<study::RepoMetrics> m{{"a", 10, 100, 10}, {"b", 20, 100, 10}, {"c", 30, 100, 10}, {"d", 40, 100, 10}};
    auto kept = study::quartile_filter(m);
    REQUIRE(kept.size() == 3);
    CHECK(kept[0].repo == "b");

    std::vector<study::RepoMetrics> same(5, {"r", 5, 5, 5});
    CHECK(study::quartile_filter(same).size() == 5);

    // Below Q1 on files only.
    std::vector<study::RepoMetrics> mixed{{"a", 100, 1, 10}, {"b", 50, 50, 10}, {"c", 60, 60, 10}, {"d", 70, 70, 10}};
    kept = study::quartile_filter(mixed);
    CHECK(std::none_of(kept.begin(), kept.end(), [](const auto& r) { return r.repo == "a"; }));
    CHECK(code([] { study::quartile_filter({{"a", 1, 1, 1}}); }) == "study.TooFewRepos");
}

TEST_CASE("quartile filter recomputation oracle") {
    std::mt19937_64 rng(6);
    std::uniform_int_distribution<long> u(1, 100);
    for (int iter = 0; iter < 50; ++iter) {
        std::vector<study::RepoMetrics> m;
        for (int i = 0; i < 4 + iter % 10; ++i)
            m.push_back({"r" + std::to_string(i), u(rng), u(rng), u(rng)});
        auto kept = study::quartile_filter(m);
        // Recompute Q1 by sorting and interpolating by hand.
        auto q1 = [&](auto field) {
            std::vector<double> v;
            for (const auto& r : m)
                v.push_back(double(r.*field));
            std::sort(v.begin(), v.end());
            double h = 0.25 * double(v.size() - 1);
            auto lo = std::size_t(h);
            return v[lo] + (h - double(lo)) * (v[std::min(lo + 1, v.size() - 1)] - v[lo]);
        };
        const double qc = q1(&study::RepoMetrics::commits), qf = q1(&study::RepoMetrics::files),
                     qd = q1(&study::RepoMetrics::developers);
        std::set<std::string> expected;
        for (const auto& r : m)
            if (r.commits >= qc && r.files >= qf && r.developers >= qd)
                expected.insert(r.repo);
        std::set<std::string> got;
        for (const auto& r : kept)
            got.insert(r.repo);
        CHECK(got == expected);
    }
}

TEST_CASE("metrics csv round trip") {
    fixture::TempDir tmp;
    auto path = (tmp.path() / "m.csv").string();
    std::vector<study::RepoMetrics> m{{"a", 1, 2, 3}, {"b,c", 4, 5, 6}};
    {
        std::ofstream f(path);
        study::write_metrics_csv(f, m);
    }
    auto back = study::read_metrics_csv(path);
    REQUIRE(back.size() == 2);
    CHECK(back[1].repo == "b,c");
    CHECK(back[1].developers == 6);
}

TEST_CASE("bulk import detection") {
    auto uniform = study::detect_bulk_import(adding_history(std::vector<int>(100, 1)));
    CHECK_FALSE(uniform.flagged);
    CHECK(uniform.outlier_commits.empty());

    std::vector<int> counts(99, 1);
    counts.push_back(200);
    auto bulk = study::detect_bulk_import(adding_history(counts));
    CHECK(bulk.fence == 1.0); // Q1 = Q3 = 1, IQR = 0
    CHECK(bulk.outlier_commits == std::set<std::string>{"c99"});
    CHECK(bulk.files_added == 299);
    CHECK(bulk.flagged);

    auto single = study::detect_bulk_import(adding_history({7}));
    CHECK_FALSE(single.flagged);
    CHECK(single.outlier_commits.empty());
}

TEST_CASE("sample generation rules") {
    SUBCASE("one file with two developers") {
        auto s = study::generate_sample(touch_history({{"f.c", {"d1", "d2"}}}), 5, 0);
        CHECK(s == std::vector<study::SamplePair>{{"d1", "f.c"}, {"d2", "f.c"}});
    }
    SUBCASE("limit caps a lone developer") {
        std::vector<std::pair<std::string, std::vector<std::string>>> files;
        for (int i = 0; i < 6; ++i)
            files.push_back({"f" + std::to_string(i) + ".c", {"d"}});
        auto s = study::generate_sample(touch_history(files), 5, 3);
        CHECK(s.size() == 5);
    }
    SUBCASE("all or nothing") {
        // d is at the limit after the first file; the shared file must be rejected whole.
        auto h = touch_history({{"a.c", {"d"}}, {"b.c", {"d", "e"}}});
        for (std::uint64_t seed = 0; seed < 10; ++seed) {
            auto s = study::generate_sample(h, 1, seed);
            std::map<std::string, int> per_dev;
            for (const auto& p : s)
                ++per_dev[p.developer];
            CHECK(per_dev["d"] == 1);
            const bool shared = std::any_of(s.begin(), s.end(), [](const auto& p) { return p.file == "b.c"; });
            CHECK(per_dev["e"] == (shared ? 1 : 0));
        }
    }
    CHECK(code([] { study::generate_sample({}, 0, 0); }) == "study.InvalidLimit");
    CHECK(study::generate_sample({}, 5, 0).empty());
}

TEST_CASE("sample invariants on random fixtures") {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        fixture::TempDir tmp;
        fixture::RandomRepoParams p;
        p.max_files = 12;
        p.max_commits = 30;
        p.developers = 5;
        auto oracle = fixture::generate_random_repo(tmp.path(), seed, p);
        auto h = identity::canonicalize_history(history::extract_history(tmp.path(), ""));
        for (std::uint64_t s = 0; s < 20; ++s) {
            auto sample = study::generate_sample(h, 2, s);
            std::map<std::string, std::set<std::string>> per_file;
            std::map<std::string, int> per_dev;
            for (const auto& pair : sample) {
                per_file[pair.file].insert(pair.developer);
                ++per_dev[pair.developer];
            }
            for (const auto& [dev, n] : per_dev)
                CHECK(n <= 2);
            for (const auto& [file, devs] : per_file) {
                const auto& all = oracle.developers.at(file);
                CHECK(devs == std::set<std::string>(all.begin(), all.end()));
            }
            // Grouped by developer.
            for (std::size_t i = 1; i < sample.size(); ++i)
                CHECK(sample[i - 1].developer <= sample[i].developer);
            CHECK(study::generate_sample(h, 2, s) == sample);
        }
    }
}

TEST_CASE("ground truth processing") {
    features::FeatureTable t;
    features::FeatureVector f;
    f.adds = 4;
    t.rows = {{"ann@x.org", "a.c", f}, {"bob@x.org", "a.c", f}, {"ann@x.org", "b.c", f}};
    identity::IdentityMap ids = identity::resolve_identities({{"Ann", "ann@x.org"}, {"Ann", "ANN@home.org"},
                                                              {"Bob", "bob@x.org"}});
    auto resolve = study::email_resolver(ids);
    CHECK(resolve("Ann@Home.org") == std::optional<std::string>("ann@home.org"));

    // Ann merged under her smallest email, so the table keys must use it too.
    for (auto& r : t.rows)
        if (r.developer == "ann@x.org")
            r.developer = "ann@home.org";
    std::sort(t.rows.begin(), t.rows.end(), [](const auto& a, const auto& b) {
        return std::tie(a.file, a.developer) < std::tie(b.file, b.developer);
    });

    std::vector<study::RawAnswer> answers{{"r", "ann@x.org", "a.c", 4, 2},  {"r", "bob@x.org", "a.c", 3, 3},
                                          {"r", "ann@x.org", "gone.c", 5, 4}, {"r", "zed@x.org", "a.c", 5, 5},
                                          {"r", "ANN@home.org", "a.c", 1, 6}, {"r", "ann@x.org", "b.c", 2, 7}};
    auto rep = study::process_answers(answers, t, resolve);
    CHECK(rep.oracle.declared_experts == expertise::PairSet{{"ann@home.org", "a.c"}});
    CHECK(rep.oracle.declared_non_experts == expertise::PairSet{{"bob@x.org", "a.c"}, {"ann@home.org", "b.c"}});
    CHECK(rep.entries.size() == 3);
    CHECK(rep.unresolved.size() == 2);
    CHECK(rep.duplicates.size() == 1);
    CHECK(rep.dataset.rows.size() == 3);
    CHECK(rep.knowledge == std::vector<double>{4, 3, 2});
    CHECK(rep.dataset.rows[0].label == 1);
    CHECK(rep.dataset.rows[1].label == 0);

    CHECK(code([&] { study::process_answers({{"r", "ann@x.org", "a.c", 6, 2}}, t, resolve); }) ==
          "study.InvalidKnowledgeValue");
    CHECK(code([&] { study::process_answers({{"r", "ann@x.org", "a.c", 0, 2}}, t, resolve); }) ==
          "study.InvalidKnowledgeValue");
    CHECK(study::is_expert_answer(4));
    CHECK_FALSE(study::is_expert_answer(3));
}

TEST_CASE("ground truth csv with a column mapping") {
    fixture::TempDir tmp;
    auto csv = tmp.path() / "truth.csv";
    std::ofstream(csv) << "project,email,path,score\nr1,a@x.org,src/a.c,4\n";
    auto mapping = tmp.path() / "map.json";
    std::ofstream(mapping) << R"({"repo": "project", "developer_email": "email", "file": "path", "knowledge": "score"})";
    auto answers = study::read_ground_truth(csv.string(), study::ColumnMapping::from_json_file(mapping.string()));
    REQUIRE(answers.size() == 1);
    CHECK(answers[0].file == "src/a.c");
    CHECK(answers[0].knowledge == 4);
    CHECK(answers[0].line == 2);
    CHECK(code([&] { study::read_ground_truth(csv.string()); }) == "study.MissingColumn");

    auto bad = tmp.path() / "bad.csv";
    std::ofstream(bad) << "repo,developer_email,file,knowledge\nr,a@x.org,a.c,high\n";
    CHECK(code([&] { study::read_ground_truth(bad.string()); }) == "study.InvalidKnowledgeValue");
}
