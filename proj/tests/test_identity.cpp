#include <doctest.h>

#include <algorithm>
#include <fstream>
#include <random>
#include <set>

#include "filexpert/error.hpp"
#include "filexpert/identity.hpp"
#include "filexpert/levenshtein.hpp"
#include "fixture.hpp"

using namespace filexpert;
using history::RawIdentity;

namespace {

std::size_t groups(const identity::IdentityMap& m) {
    std::set<std::string> keys;
    for (const auto& [raw, dev] : m)
        keys.insert(dev.canonical_key);
    return keys.size();
}

} // namespace

TEST_CASE("same email merges") {
    auto m = identity::resolve_identities({{"Ana S.", "ana@x.com"}, {"Ana Silva", "ANA@x.com"}});
    REQUIRE(m.size() == 2);
    CHECK(groups(m) == 1);
    const auto& dev = m.begin()->second;
    CHECK(dev.canonical_key == "ana@x.com");
    CHECK(dev.display_name == "Ana Silva");
    CHECK(dev.emails == std::set<std::string>{"ana@x.com"});
}

TEST_CASE("similar names merge") {
    // normalized "jsmith" vs "j smith": one insertion, 1 <= 0.3 * 7
    CHECK(levenshtein(std::string_view("jsmith"), std::string_view("j smith")) == 1);
    auto m = identity::resolve_identities({{"jsmith", "a@x.com"}, {"j smith", "b@y.com"}});
    CHECK(groups(m) == 1);
    CHECK(m.at({"jsmith", "a@x.com"}).canonical_key == "a@x.com");
    CHECK(m.at({"j smith", "b@y.com"}).emails == std::set<std::string>{"a@x.com", "b@y.com"});
}

TEST_CASE("distinct people stay apart") {
    auto m = identity::resolve_identities({{"Alice", "a@x.com"}, {"Bob", "b@y.com"}});
    CHECK(groups(m) == 2);
}

TEST_CASE("accents and punctuation are ignored") {
    CHECK(identity::similar_names("José García", "jose garcia", 0.0));
    CHECK(identity::similar_names("O'Neil, Pat", "oneil pat", 0.0));
    CHECK_FALSE(identity::similar_names("...", "---", 0.3));
}

TEST_CASE("threshold boundary is inclusive") {
    // "abcdefghij" vs "abcdefgxyz": 3 edits, 0.3 * 10 = 3
    CHECK(identity::similar_names("abcdefghij", "abcdefgxyz", 0.30));
    CHECK_FALSE(identity::similar_names("abcdefghij", "abcdefwxyz", 0.30));
    CHECK_THROWS_AS(identity::resolve_identities({{"a", "a@x"}}, {1.5, {}}), Error);
}

TEST_CASE("merging is transitive") {
    // a~b and b~c but not a~c directly.
    auto m = identity::resolve_identities(
        {{"abcdefghij", "1@x"}, {"abcdefgxyz", "2@x"}, {"abcdvwxxyz", "3@x"}});
    CHECK_FALSE(identity::similar_names("abcdefghij", "abcdvwxxyz", 0.30));
    CHECK(groups(m) == 1);
}

TEST_CASE("order independence and idempotence") {
    std::vector<RawIdentity> ids{{"Maria Souza", "maria@a.org"}, {"maria souza", "ms@b.org"}, {"Joao", "joao@a.org"},
                                 {"J. Pereira", "joao@a.org"},   {"Pedro Alves", "pa@c.org"}, {"Pedro Alvez", "p@d.org"},
                                 {"Zed", "z@z.org"}};
    auto base = identity::resolve_identities(ids);
    std::mt19937 rng(3);
    for (int i = 0; i < 20; ++i) {
        auto shuffled = ids;
        std::shuffle(shuffled.begin(), shuffled.end(), rng);
        CHECK(identity::resolve_identities(shuffled) == base);
    }
    CHECK(groups(base) == 4);

    std::vector<RawIdentity> canon;
    for (const auto& [raw, dev] : base)
        canon.push_back({dev.display_name, dev.canonical_key});
    auto again = identity::resolve_identities(canon);
    for (const auto& [raw, dev] : again)
        CHECK(dev.canonical_key == raw.email);
}

TEST_CASE("manual aliases merge first") {
    identity::ResolveOptions opts;
    opts.manual_aliases = {{"work@corp.com", "home@mail.com"}};
    auto m = identity::resolve_identities({{"Kim", "work@corp.com"}, {"Lee", "home@mail.com"}}, opts);
    CHECK(groups(m) == 1);

    fixture::TempDir tmp;
    auto path = tmp.path() / "aliases.csv";
    std::ofstream(path) << "email_a,email_b\nx@a.org,y@b.org\n";
    auto pairs = identity::read_alias_csv(path);
    REQUIRE(pairs.size() == 1);
    CHECK(pairs[0] == std::pair<std::string, std::string>{"x@a.org", "y@b.org"});
}

TEST_CASE("canonicalize_history with planted aliases") {
    history::CommitHistory h;
    for (int i = 0; i < 5; ++i)
        h.commits.push_back({"c" + std::to_string(i),
                             i % 2 ? RawIdentity{"Ann Lee", "ann@work.org"} : RawIdentity{"ann lee", "ann@home.org"},
                             i,
                             {}});
    auto c = identity::canonicalize_history(h);
    std::set<std::string> authors;
    for (const auto& commit : c.commits)
        authors.insert(commit.author.email);
    CHECK(authors == std::set<std::string>{"ann@home.org"});
    CHECK(c.commits.size() == 5);
    CHECK(c.commits[3].id == "c3");
    CHECK(identity::canonicalize_history(history::CommitHistory{}).commits.empty());
}

TEST_CASE("levenshtein metric properties") {
    std::mt19937 rng(11);
    std::uniform_int_distribution<int> len(0, 8), ch(0, 2);
    auto word = [&] {
        std::string s;
        for (int i = len(rng); i > 0; --i)
            s += static_cast<char>('a' + ch(rng));
        return s;
    };
    for (int i = 0; i < 300; ++i) {
        auto a = word(), b = word(), c = word();
        auto ab = levenshtein(std::string_view(a), std::string_view(b));
        CHECK(ab == levenshtein(std::string_view(b), std::string_view(a)));
        CHECK(levenshtein(std::string_view(a), std::string_view(a)) == 0);
        CHECK(ab <= levenshtein(std::string_view(a), std::string_view(c)) +
                        levenshtein(std::string_view(c), std::string_view(b)));
        auto diff = a.size() > b.size() ? a.size() - b.size() : b.size() - a.size();
        CHECK(diff <= ab);
        CHECK(ab <= std::max(a.size(), b.size()));
    }
}
