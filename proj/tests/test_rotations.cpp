#include <doctest.h>

#include <set>

#include "smtw/oracle.hpp"
#include "smtw/random_instance.hpp"
#include "smtw/rotations.hpp"
#include "test_util.hpp"

using namespace smtw;
using namespace smtw::testutil;

TEST_CASE("rotation structure of the worked instances") {
    RotationStructure r2 = build_rotation_structure(i2());
    REQUIRE(r2.num_rotations() == 1);
    CHECK(r2.rotations[0].cycle ==
          std::vector<std::pair<int, int>>{{0, 0}, {1, 1}});
    CHECK(r2.arcs[0].empty());
    CHECK(man_path(r2, 0) == std::vector<int>{0});

    RotationStructure r3 = build_rotation_structure(i3());
    REQUIRE(r3.num_rotations() == 2);
    CHECK(r3.rotations[0].cycle ==
          std::vector<std::pair<int, int>>{{0, 0}, {1, 1}, {2, 2}});
    CHECK(r3.rotations[1].cycle ==
          std::vector<std::pair<int, int>>{{0, 1}, {1, 2}, {2, 0}});
    CHECK(r3.arcs[0] == std::vector<int>{1});
    CHECK(r3.arcs[1].empty());
    CHECK(man_path(r3, 0) == std::vector<int>{0, 1});

    RotationStructure r1 = build_rotation_structure(one_by_one());
    CHECK(r1.num_rotations() == 0);
    CHECK(man_path(r1, 0).empty());
}

TEST_CASE("closure and elimination on the chain") {
    Instance three = i3();
    RotationStructure rs = build_rotation_structure(three);
    CHECK(closure(rs, {}) == std::vector<int>{});
    CHECK(closure(rs, {0}) == std::vector<int>{0});
    CHECK(closure(rs, {1}) == std::vector<int>{0, 1});
    CHECK_THROWS_AS(closure(rs, {5}), ValidationError);

    CHECK(eliminate(rs, three, {}) == rs.man_opt);
    CHECK(eliminate(rs, three, {0}) ==
          Matching::from_pairs(three, {{0, 1}, {1, 2}, {2, 0}}));
    CHECK(eliminate(rs, three, {0, 1}) == rs.woman_opt);
    CHECK_THROWS_AS(eliminate(rs, three, {1}), ValidationError);
}

namespace {

// All closed sets of the precedence order, by direct enumeration.
std::vector<std::vector<int>> all_closed_sets(const RotationStructure& rs) {
    int nr = rs.num_rotations();
    std::vector<std::vector<int>> out;
    for (std::uint32_t mask = 0; mask < (1u << nr); ++mask) {
        std::vector<int> ids;
        for (int r = 0; r < nr; ++r)
            if ((mask >> r) & 1) ids.push_back(r);
        if (is_closed(rs, ids)) out.push_back(ids);
    }
    return out;
}

}  // namespace

TEST_CASE("lattice bijection, order independence and precedence semantics") {
    int interesting = 0;
    std::vector<Instance> pool;
    for (std::uint64_t seed = 1; seed <= 40; ++seed)
        pool.push_back(random_instance(seed, {2, 6}));
    for (std::uint64_t seed = 1; seed <= 30; ++seed)
        pool.push_back(random_instance(seed, {6, 8, false, 1.0}));
    pool.push_back(latin_union(1));
    pool.push_back(latin_union(2));
    pool.push_back(latin_union(3));
    for (const Instance& inst : pool) {
        RotationStructure rs = build_rotation_structure(inst);
        int n = inst.total_agents();
        REQUIRE(rs.num_rotations() <= n * n);
        if (rs.num_rotations() > 14) continue;
        if (rs.num_rotations() >= 2) ++interesting;

        StableSet set = enumerate_stable_strict(inst, StrictEnumMethod::Filter);
        auto closed = all_closed_sets(rs);
        REQUIRE(closed.size() == set.matchings.size());

        std::set<std::vector<std::pair<int, int>>> seen;
        for (const auto& ids : closed) {
            Matching mu = eliminate(rs, inst, ids);
            CHECK_FALSE(find_blocking_pair(inst, mu).has_value());
            CHECK(seen.insert(mu.pairs()).second);  // exactly once
            // Two different precedence-compatible orders agree.
            std::vector<int> fwd = ids, alt = ids;
            std::stable_sort(alt.begin(), alt.end(), [&](int a, int b) {
                return rs.precedes(a, b) ||
                       (!rs.precedes(b, a) && a > b);
            });
            CHECK(eliminate_in_order(rs, inst, fwd) == eliminate_in_order(rs, inst, alt));
        }
        std::set<std::vector<std::pair<int, int>>> oracle_set;
        for (const auto& mu : set.matchings) oracle_set.insert(mu.pairs());
        CHECK(seen == oracle_set);

        // Precedence == "every stable matching containing b also contains a".
        std::vector<std::vector<char>> elim;
        for (const auto& mu : set.matchings)
            elim.push_back(rotations_eliminated(rs, inst, mu));
        for (int a = 0; a < rs.num_rotations(); ++a)
            for (int b = 0; b < rs.num_rotations(); ++b) {
                if (a == b) continue;
                bool oracle_prec = true;
                for (const auto& row : elim)
                    if (row[b] && !row[a]) {
                        oracle_prec = false;
                        break;
                    }
                CHECK(rs.precedes(a, b) == oracle_prec);
            }

        // Rotations involve always-matched agents only; per-man sequences
        // are totally ordered and appear on the man's path in order.
        for (const auto& rot : rs.rotations)
            for (auto [m, w] : rot.cycle) {
                CHECK(rs.matched_men[m]);
                CHECK(rs.matched_women[w]);
            }
        for (int m = 0; m < inst.num_men(); ++m) {
            const auto& seq = rs.per_man[m];
            for (size_t i = 0; i + 1 < seq.size(); ++i)
                CHECK(rs.precedes(seq[i], seq[i + 1]));
            const auto& path = rs.per_man_path[m];
            size_t at = 0;
            for (int r : path)
                if (at < seq.size() && seq[at] == r) ++at;
            CHECK(at == seq.size());
            for (size_t i = 0; i + 1 < path.size(); ++i) {
                auto& next = rs.arcs[path[i]];
                CHECK(std::find(next.begin(), next.end(), path[i + 1]) != next.end());
            }
        }

        // The stored digraph is its own transitive reduction.
        for (int a = 0; a < rs.num_rotations(); ++a)
            for (int b : rs.arcs[a])
                for (int c : rs.arcs[a])
                    if (c != b) CHECK_FALSE(rs.reaches(c, b));
    }
    CHECK(interesting >= 8);  // the family actually exercises the machinery
}

TEST_CASE("rotation dot export") {
    std::string dot = rotation_dot(build_rotation_structure(i3()));
    CHECK(dot.find("r0 -> r1") != std::string::npos);
    CHECK(dot.find("digraph") != std::string::npos);
}
