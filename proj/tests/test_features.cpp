#include <doctest.h>

#include <sstream>

#include "filexpert/error.hpp"
#include "filexpert/features.hpp"
#include "filexpert/identity.hpp"
#include "filexpert/lineage.hpp"
#include "fixture.hpp"
#include "random_repo.hpp"

using namespace filexpert;
using filexpert::features::FeatureVector;

namespace {

const fixture::Author ann{"Ann Lee", "ann@example.org"};
const fixture::Author bob{"Bob Ray", "bob@example.org"};
const fixture::Author cy{"Cy Young", "cy@example.org"};

constexpr std::int64_t day = 86400;
constexpr std::int64_t t0 = 1600000000;

std::string lines(int n, const std::string& tag) {
    std::string out;
    for (int i = 0; i < n; ++i)
        out += "int " + tag + std::to_string(i) + " = " + std::to_string(i) + ";\n";
    return out;
}

features::FeatureTable table_of(const fixture::fs::path& dir) {
    auto h = history::extract_history(dir, "");
    h = history::filter_source_files(h, history::SourceFilter{});
    return features::compute_all(identity::canonicalize_history(h));
}

} // namespace

TEST_CASE("creation-only file") {
    fixture::TempDir tmp;
    fixture::RepoBuilder repo(tmp.path());
    repo.commit(ann, t0, {fixture::write("a.c", lines(10, "v"))});
    repo.finish();
    auto table = table_of(tmp.path());
    REQUIRE(table.rows.size() == 1);
    FeatureVector expected;
    expected.adds = 10;
    expected.amount = 10;
    expected.fa = 1;
    expected.blame = 10;
    expected.num_commits = 1;
    expected.size = 10;
    CHECK(table.rows[0].features == expected);
    CHECK(table.rows[0].developer == "ann@example.org");
}

TEST_CASE("num_mod_devs counts developers, not commits") {
    fixture::TempDir tmp;
    fixture::RepoBuilder repo(tmp.path());
    repo.commit(ann, t0, {fixture::write("a.c", lines(5, "v"))});
    repo.commit(bob, t0 + day, {fixture::write("a.c", lines(6, "v"))});
    repo.commit(bob, t0 + 2 * day, {fixture::write("a.c", lines(7, "v"))});
    repo.finish();
    auto table = table_of(tmp.path());
    const auto* a = table.find("ann@example.org", "a.c");
    const auto* b = table.find("bob@example.org", "a.c");
    REQUIRE(a);
    REQUIRE(b);
    CHECK(a->features.num_mod_devs == 1);
    CHECK(b->features.num_mod_devs == 0);
    CHECK(a->features.num_days == 2);
    CHECK(b->features.num_commits == 2);
    CHECK(b->features.adds == 2);
}

TEST_CASE("avg_days_commits is the mean gap") {
    fixture::TempDir tmp;
    fixture::RepoBuilder repo(tmp.path());
    repo.commit(ann, t0, {fixture::write("a.c", lines(1, "v"))});
    repo.commit(ann, t0 + 2 * day, {fixture::write("a.c", lines(2, "v"))});
    repo.commit(ann, t0 + 6 * day, {fixture::write("a.c", lines(3, "v"))});
    repo.finish();
    auto table = table_of(tmp.path());
    REQUIRE(table.rows.size() == 1);
    CHECK(table.rows[0].features.avg_days_commits == 3.0);
    CHECK(table.rows[0].features.num_commits == 3);
}

TEST_CASE("first authorship follows renames") {
    fixture::TempDir tmp;
    fixture::RepoBuilder repo(tmp.path());
    repo.commit(ann, t0, {fixture::write("old.c", lines(4, "v"))});
    repo.commit(bob, t0 + day, {fixture::rename("old.c", "new.c")});
    repo.finish();
    auto table = table_of(tmp.path());
    REQUIRE(table.rows.size() == 2);
    CHECK(table.find("ann@example.org", "new.c")->features.fa == 1);
    CHECK(table.find("bob@example.org", "new.c")->features.fa == 0);
    CHECK(table.find("bob@example.org", "new.c")->features.num_commits == 1);
    CHECK(table.find("bob@example.org", "new.c")->features.blame == 0);
}

TEST_CASE("compute_all row sets") {
    SUBCASE("empty history") {
        history::CommitHistory h;
        CHECK(features::compute_all(h).rows.empty());
    }
    SUBCASE("two developers on two files, one untouched pair") {
        fixture::TempDir tmp;
        fixture::RepoBuilder repo(tmp.path());
        repo.commit(ann, t0, {fixture::write("a.c", lines(2, "a")), fixture::write("b.c", lines(2, "b"))});
        repo.commit(bob, t0 + day, {fixture::write("a.c", lines(3, "a"))});
        repo.finish();
        auto table = table_of(tmp.path());
        CHECK(table.rows.size() == 3);
        CHECK(table.rows[0].file == "a.c");
        CHECK(table.rows[0].developer == "ann@example.org");
        CHECK(table.find("bob@example.org", "b.c") == nullptr);
    }
}

TEST_CASE("deleted file has no rows and is not computable") {
    fixture::TempDir tmp;
    fixture::RepoBuilder repo(tmp.path());
    repo.commit(ann, t0, {fixture::write("a.c", lines(2, "a")), fixture::write("b.c", lines(2, "b"))});
    repo.commit(bob, t0 + day, {fixture::remove("b.c")});
    repo.finish();
    auto h = identity::canonicalize_history(history::extract_history(tmp.path(), ""));
    CHECK(features::compute_all(h).rows.size() == 1);
    CHECK_THROWS_AS(features::compute_features(h, "bob@example.org", "b.c"), Error);
    try {
        features::compute_features(h, "cy@example.org", "a.c");
        FAIL("expected PairNotInHistory");
    } catch (const Error& e) {
        CHECK(e.code() == "features.PairNotInHistory");
    }
}

TEST_CASE("path reused after deletion starts a fresh lineage") {
    fixture::TempDir tmp;
    fixture::RepoBuilder repo(tmp.path());
    repo.commit(ann, t0, {fixture::write("a.c", lines(2, "a"))});
    repo.commit(bob, t0 + day, {fixture::remove("a.c"), fixture::write("b.c", lines(1, "b"))});
    repo.commit(cy, t0 + 2 * day, {fixture::write("a.c", lines(3, "c"))});
    repo.finish();
    auto table = table_of(tmp.path());
    CHECK(table.find("ann@example.org", "a.c") == nullptr);
    REQUIRE(table.find("cy@example.org", "a.c"));
    CHECK(table.find("cy@example.org", "a.c")->features.fa == 1);
}

TEST_CASE("CSV round trip") {
    features::FeatureTable t;
    FeatureVector f;
    f.adds = 3;
    f.amount = 3;
    f.num_days = 12;
    f.avg_days_commits = 1.0 / 3.0;
    t.rows.push_back({"a@x.org", "dir/with,comma.c", f});
    std::stringstream ss;
    features::write_csv(ss, t);
    CHECK(ss.str().rfind(std::string(features::csv_header) + "\n", 0) == 0);
    auto back = features::read_csv(ss);
    REQUIRE(back.rows.size() == 1);
    CHECK(back.rows[0] == t.rows[0]);
}

TEST_CASE("random fixtures match the naive replay") {
    int renames = 0, deletions = 0;
    long mods = 0, dels = 0;
    for (std::uint64_t seed = 100; seed < 110; ++seed) {
        CAPTURE(seed);
        fixture::TempDir tmp;
        auto oracle = fixture::generate_random_repo(tmp.path(), seed);
        auto table = table_of(tmp.path());
        renames += oracle.renames;
        deletions += oracle.deletions;
        for (const auto& [key, e] : oracle.expected) {
            mods += e.mods;
            dels += e.dels;
        }
        REQUIRE(table.rows.size() == oracle.expected.size());
        for (const auto& row : table.rows) {
            CAPTURE(row.developer);
            CAPTURE(row.file);
            auto it = oracle.expected.find({row.developer, row.file});
            REQUIRE(it != oracle.expected.end());
            const auto& e = it->second;
            const auto& f = row.features;
            CHECK(f.adds == e.adds);
            CHECK(f.dels == e.dels);
            CHECK(f.mods == e.mods);
            CHECK(f.conds == e.conds);
            CHECK(f.amount == e.amount);
            CHECK(f.fa == e.fa);
            CHECK(f.blame == e.blame);
            CHECK(f.num_commits == e.num_commits);
            CHECK(f.num_days == e.num_days);
            CHECK(f.num_mod_devs == e.num_mod_devs);
            CHECK(f.size == e.size);
            CHECK(f.avg_days_commits == e.avg_days_commits);
        }
    }
    // The generator must actually exercise the interesting paths.
    CHECK(renames > 0);
    CHECK(deletions > 0);
    CHECK(mods > 0);
    CHECK(dels > 0);
}
