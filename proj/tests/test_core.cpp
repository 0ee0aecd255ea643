#include <doctest.h>

#include <set>

#include "smtw/core.hpp"
#include "smtw/formats.hpp"
#include "smtw/gale_shapley.hpp"
#include "smtw/oracle.hpp"
#include "smtw/random_instance.hpp"
#include "test_util.hpp"

using namespace smtw;
using namespace smtw::testutil;

TEST_CASE("blocking pairs") {
    Instance inst = one_by_one();
    Matching empty(inst);
    auto bp = find_blocking_pair(inst, empty);
    REQUIRE(bp.has_value());
    CHECK(*bp == std::pair<int, int>{0, 0});

    Instance two = i2();
    Matching man_opt = Matching::from_pairs(two, {{0, 0}, {1, 1}});
    CHECK_FALSE(find_blocking_pair(two, man_opt).has_value());
    Matching woman_opt = Matching::from_pairs(two, {{0, 1}, {1, 0}});
    CHECK_FALSE(find_blocking_pair(two, woman_opt).has_value());

    // In {(m1,w2)}, m1 prefers the unmatched w1: the first blocking pair by
    // man id and list position is (m1, w1).
    Matching partial = Matching::from_pairs(two, {{0, 1}});
    bp = find_blocking_pair(two, partial);
    REQUIRE(bp.has_value());
    CHECK(*bp == std::pair<int, int>{0, 0});

    CHECK_THROWS_AS(find_blocking_pair(two, Matching()), ValidationError);
    CHECK_THROWS_AS(Matching::from_pairs(two, {{0, 0}, {1, 0}}), ValidationError);
}

TEST_CASE("weak stability needs strict improvement on both sides") {
    Instance tied = it();
    Matching size_one = Matching::from_pairs(tied, {{1, 0}});
    CHECK_FALSE(find_blocking_pair(tied, size_one).has_value());
    Matching size_two = Matching::from_pairs(tied, {{0, 0}, {1, 1}});
    CHECK_FALSE(find_blocking_pair(tied, size_two).has_value());
    Matching bad = Matching::from_pairs(tied, {{0, 0}});
    auto bp = find_blocking_pair(tied, bad);
    REQUIRE(bp.has_value());
    CHECK(*bp == std::pair<int, int>{1, 1});
}

TEST_CASE("scores") {
    Instance two = i2();
    Scores sc = score(two, Matching::from_pairs(two, {{0, 0}, {1, 1}}));
    CHECK(sc.sat_m == 2);
    CHECK(sc.sat_w == 4);
    CHECK(sc.delta == -2);
    CHECK(sc.bal == 4);
    CHECK(sc.size == 2);

    Scores zero = score(two, Matching(two));
    CHECK(zero.sat_m == 0);
    CHECK(zero.sat_w == 0);
    CHECK(zero.size == 0);

    Instance three = i3();
    Scores mid = score(three, Matching::from_pairs(three, {{0, 1}, {1, 2}, {2, 0}}));
    CHECK(mid.sat_m == 6);
    CHECK(mid.sat_w == 6);
    CHECK(mid.delta == 0);
}

TEST_CASE("score additivity over disjoint sub-matchings") {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        Instance inst = random_instance(seed, {});
        Matching mu = man_optimal(break_ties(inst, seed));
        auto pairs = mu.pairs();
        size_t half = pairs.size() / 2;
        Matching a = Matching::from_pairs(inst, {pairs.begin(), pairs.begin() + half});
        Matching b = Matching::from_pairs(inst, {pairs.begin() + half, pairs.end()});
        Scores sa = score(inst, a), sb = score(inst, b), sc = score(inst, mu);
        CHECK(sa.sat_m + sb.sat_m == sc.sat_m);
        CHECK(sa.sat_w + sb.sat_w == sc.sat_w);
        CHECK(sa.size + sb.size == sc.size);
        std::int64_t n2 = (std::int64_t)inst.total_agents() * inst.total_agents();
        CHECK(sc.sat_m <= n2);
        CHECK(sc.sat_w <= n2);
    }
}

TEST_CASE("primal graph") {
    Graph g2 = primal_graph(i2());
    CHECK(g2.n == 4);
    CHECK(g2.edges.size() == 4);
    Graph ge = primal_graph(empty_lists(3, 2));
    CHECK(ge.n == 5);
    CHECK(ge.edges.empty());
    Graph g3 = primal_graph(i3());
    CHECK(g3.n == 6);
    CHECK(g3.edges.size() == 9);
}

TEST_CASE("instance validation") {
    // Asymmetric acceptability.
    CHECK_THROWS_AS(Instance::make(1, 1, {PrefList::strict({0})}, {PrefList{}}),
                    ValidationError);
    // Duplicate entries.
    CHECK_THROWS_AS(Instance::make(1, 2, {PrefList::strict({0, 0})},
                                   {PrefList::strict({0}), PrefList{}}),
                    ValidationError);
    CHECK_FALSE(i2().has_ties());
    CHECK(it().has_ties());
}

TEST_CASE("instance format round trip and errors") {
    std::string text =
        "# tiny instance\n"
        "p smti 2 2\n"
        "m 1 : 1 2\n"
        "m 2 : 2 1\n"
        "w 1 : 2 1\n"
        "w 2 : 1 2\n";
    Instance inst = parse_instance(text);
    CHECK(inst.num_men() == 2);
    CHECK(inst.rank(Side::Man, 0, 0) == 1);
    Instance again = parse_instance(format_instance(inst));
    CHECK(format_instance(again) == format_instance(inst));

    std::string tied =
        "p smti 2 1\n"
        "m 1 : 1\nm 2 : 1\n"
        "w 1 : (1 2)\n";
    Instance ti = parse_instance(tied);
    CHECK(ti.has_ties());
    CHECK(ti.rank(Side::Woman, 0, 0) == ti.rank(Side::Woman, 0, 1));
    CHECK(parse_instance(format_instance(ti)).has_ties());

    try {
        parse_instance("p smti 2 2\nm 1 : 3\n");
        FAIL("expected error");
    } catch (const ValidationError& e) {
        std::string msg = e.what();
        CHECK(msg.find("unknown woman 3") != std::string::npos);
        CHECK(msg.find("line 2") != std::string::npos);
    }
    CHECK_THROWS_AS(parse_instance("m 1 : 1\n"), ValidationError);
    CHECK_THROWS_AS(parse_instance("p smti 1 1\nm 1 : (1\nw 1 : 1\n"), ValidationError);
}

TEST_CASE("gale-shapley extremes on the worked instances") {
    Instance two = i2();
    CHECK(man_optimal(two) == Matching::from_pairs(two, {{0, 0}, {1, 1}}));
    CHECK(woman_optimal(two) == Matching::from_pairs(two, {{0, 1}, {1, 0}}));

    Instance three = i3();
    CHECK(man_optimal(three) == Matching::from_pairs(three, {{0, 0}, {1, 1}, {2, 2}}));
    CHECK(woman_optimal(three) == Matching::from_pairs(three, {{0, 2}, {1, 0}, {2, 1}}));

    Instance one = one_by_one();
    CHECK(woman_optimal(one) == Matching::from_pairs(one, {{0, 0}}));
    CHECK(man_optimal(empty_lists(2, 3)).size() == 0);

    CHECK_THROWS_AS(man_optimal(it()), ValidationError);
}

TEST_CASE("tie-breaking produces weakly stable matchings") {
    Instance tied = it();
    for (std::uint64_t seed = 0; seed < 16; ++seed) {
        Matching mu = stable_with_tiebreak(tied, seed);
        CHECK_FALSE(find_blocking_pair(tied, mu).has_value());
    }
    Instance two = i2();
    CHECK(stable_with_tiebreak(two, 7) == man_optimal(two));
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        Instance inst = random_instance(seed, {2, 6, true, 0.6, 16});
        Matching mu = stable_with_tiebreak(inst, seed * 31);
        CHECK_FALSE(find_blocking_pair(inst, mu).has_value());
    }
}

TEST_CASE("extremes match the oracle on random strict instances") {
    for (std::uint64_t seed = 1; seed <= 40; ++seed) {
        Instance inst = random_instance(seed, {2, 6});
        StableSet set = enumerate_stable_strict(inst);
        REQUIRE(!set.matchings.empty());
        auto ex = lattice_extremes(inst);
        std::int64_t min_m = set.scores[0].sat_m, max_m = set.scores[0].sat_m;
        std::int64_t min_w = set.scores[0].sat_w, max_w = set.scores[0].sat_w;
        const Matching *min_mu = &set.matchings[0], *max_mu = &set.matchings[0];
        for (size_t i = 0; i < set.matchings.size(); ++i) {
            // Proposition 2: identical matched sets across the stable set.
            for (int m = 0; m < inst.num_men(); ++m)
                CHECK(set.matchings[i].man_matched(m) == (bool)ex.matched_men[m]);
            for (int w = 0; w < inst.num_women(); ++w)
                CHECK(set.matchings[i].woman_matched(w) == (bool)ex.matched_women[w]);
            if (set.scores[i].sat_m < min_m) {
                min_m = set.scores[i].sat_m;
                min_mu = &set.matchings[i];
            }
            if (set.scores[i].sat_m > max_m) {
                max_m = set.scores[i].sat_m;
                max_mu = &set.matchings[i];
            }
            min_w = std::min(min_w, set.scores[i].sat_w);
            max_w = std::max(max_w, set.scores[i].sat_w);
        }
        CHECK(ex.man_optimal == *min_mu);
        CHECK(ex.woman_optimal == *max_mu);
        // The man-optimal matching simultaneously maximizes the women's sum.
        CHECK(score(inst, ex.man_optimal).sat_w == max_w);
        CHECK(score(inst, ex.woman_optimal).sat_w == min_w);
    }
}

TEST_CASE("oracle stable sets on the worked instances") {
    CHECK(enumerate_stable_strict(i2()).matchings.size() == 2);
    CHECK(enumerate_stable_strict(i3()).matchings.size() == 3);
    CHECK(enumerate_stable_strict(one_by_one()).matchings.size() == 1);
    StableSet empty_set = enumerate_weakly_stable(empty_lists(2, 2));
    REQUIRE(empty_set.matchings.size() == 1);
    CHECK(empty_set.matchings[0].size() == 0);

    StableSet tied = enumerate_weakly_stable(it());
    std::set<int> sizes;
    for (const auto& sc : tied.scores) sizes.insert(sc.size);
    CHECK(sizes == std::set<int>{1, 2});

    // Strict instances: the weak enumerator agrees with the strict one.
    StableSet a = enumerate_weakly_stable(i2());
    StableSet b = enumerate_stable_strict(i2());
    REQUIRE(a.matchings.size() == b.matchings.size());
    for (size_t i = 0; i < a.matchings.size(); ++i)
        CHECK(a.matchings[i] == b.matchings[i]);

    OracleResult res = oracle_optimum(i3(), Objective::Sesm);
    CHECK(res.optimum == 0);
    res = oracle_optimum(i3(), Objective::Gsm);
    CHECK(res.pair_set ==
          std::vector<std::pair<std::int64_t, std::int64_t>>{{3, 9}, {6, 6}, {9, 3}});
    CHECK(oracle_optimum(it(), Objective::MinSmt).optimum == 1);
    CHECK(oracle_optimum(it(), Objective::MaxSmt).optimum == 2);

    CHECK_THROWS_AS(enumerate_weakly_stable(random_instance(3, {8, 8, true, 0.9, 0})),
                    GuardExceeded);
}
