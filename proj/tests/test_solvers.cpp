#include <doctest.h>

#include <map>
#include <set>

#include "smtw/fpt.hpp"
#include "smtw/oracle.hpp"
#include "smtw/random_instance.hpp"
#include "smtw/rotations.hpp"
#include "smtw/selftest.hpp"
#include "smtw/treedec.hpp"
#include "smtw/xp.hpp"
#include "test_util.hpp"

using namespace smtw;
using namespace smtw::testutil;

namespace {

NiceTreeDecomposition nice_primal(const Instance& inst) {
    Graph g = primal_graph(inst);
    return make_nice(min_fill_decomposition(g), g);
}

struct FptSetup {
    RotationStructure rs;
    Graph gpi;
    NiceTreeDecomposition ntd;
};

FptSetup fpt_setup(const Instance& inst) {
    FptSetup s{build_rotation_structure(inst), {}, {}};
    s.gpi = rotation_graph(s.rs);
    s.ntd = make_nice(min_fill_decomposition(s.gpi), s.gpi);
    return s;
}

}  // namespace

TEST_CASE("xp solvers on the worked instances") {
    Instance two = i2(), three = i3(), one = one_by_one(), tied = it();
    CHECK(xp_solve_sesm(two, nice_primal(two)).optimum == 2);
    auto rep3 = xp_solve_sesm(three, nice_primal(three));
    CHECK(rep3.optimum == 0);
    REQUIRE(rep3.witness.has_value());
    CHECK(*rep3.witness == Matching::from_pairs(three, {{0, 1}, {1, 2}, {2, 0}}));
    CHECK(xp_solve_sesm(one, nice_primal(one)).optimum == 0);

    CHECK(xp_solve_bsm(two, nice_primal(two)).optimum == 4);
    CHECK(xp_solve_bsm(three, nice_primal(three)).optimum == 6);
    CHECK(xp_solve_bsm(one, nice_primal(one)).optimum == 1);

    CHECK(xp_solve_max_smt(tied, nice_primal(tied)).optimum == 2);
    CHECK(xp_solve_min_smt(tied, nice_primal(tied)).optimum == 1);
    CHECK(xp_solve_max_smt(two, nice_primal(two)).optimum == 2);
    CHECK(xp_solve_min_smt(two, nice_primal(two)).optimum == 2);

    Instance empty = empty_lists(2, 2);
    CHECK(xp_solve_max_smt(empty, nice_primal(empty)).optimum == 0);
    CHECK(xp_solve_sesm(empty, nice_primal(empty)).optimum == 0);

    CHECK_THROWS_AS(xp_solve_sesm(tied, nice_primal(tied)), ValidationError);
    CHECK_THROWS_AS(xp_solve_sesm(two, nice_primal(three)), ValidationError);
}

TEST_CASE("xp results are decomposition independent") {
    for (const Instance& inst : {i2(), i3(), it()}) {
        Graph g = primal_graph(inst);
        std::vector<NiceTreeDecomposition> decs;
        decs.push_back(make_nice(min_fill_decomposition(g), g));
        decs.push_back(make_nice(single_bag_decomposition(g), g));
        decs.push_back(make_nice(inflate_width(min_fill_decomposition(g), g), g));
        std::set<std::int64_t> mx, mn;
        for (const auto& ntd : decs) {
            mx.insert(xp_solve_max_smt(inst, ntd).optimum);
            mn.insert(xp_solve_min_smt(inst, ntd).optimum);
        }
        CHECK(mx.size() == 1);
        CHECK(mn.size() == 1);
        if (!inst.has_ties()) {
            std::set<std::int64_t> ds, bs;
            for (const auto& ntd : decs) {
                ds.insert(xp_solve_sesm(inst, ntd).optimum);
                bs.insert(xp_solve_bsm(inst, ntd).optimum);
            }
            CHECK(ds.size() == 1);
            CHECK(bs.size() == 1);
        }
    }
}

TEST_CASE("xp witness partial assignments are stable at every node") {
    for (std::uint64_t seed = 1; seed <= 12; ++seed) {
        Instance inst = random_instance(seed, {2, 6});
        auto ntd = nice_primal(inst);
        auto gamma = gamma_sets(ntd);
        std::vector<XpWitnessVisit> trace;
        XpOptions opt;
        opt.trace = &trace;
        xp_solve(inst, ntd, Objective::Sesm, opt);
        REQUIRE(!trace.empty());
        int nm = inst.num_men();
        for (const auto& visit : trace) {
            std::map<int, int> g(visit.assignments.begin(), visit.assignments.end());
            // Consistency inside gamma(v).
            for (auto [a, p] : g) {
                CHECK(bitset_test(gamma[visit.node], a));
                if (p < 0) continue;
                auto it = g.find(p);
                if (it != g.end()) CHECK(it->second == a);
            }
            // No pair inside gamma(v) strictly prefers each other.
            for (auto [a, p] : g) {
                if (a >= nm) continue;
                for (auto [b, q] : g) {
                    if (b < nm) continue;
                    int rm = inst.rank(Side::Man, a, b - nm);
                    if (rm == 0) continue;
                    bool man_pref = p < 0 || rm < inst.rank(Side::Man, a, p - nm);
                    bool woman_pref =
                        q < 0 || inst.rank(Side::Woman, b - nm, a) <
                                     inst.rank(Side::Woman, b - nm, q);
                    CHECK_FALSE((man_pref && woman_pref));
                }
            }
        }
    }
}

TEST_CASE("state views on the worked instances") {
    Instance three = i3();
    RotationStructure rs = build_rotation_structure(three);
    Graph gpi = rotation_graph(rs);
    NiceTreeDecomposition ntd = make_nice(single_bag_decomposition(gpi), gpi);

    int intro0 = -1, leaf = -1;
    for (int v = 0; v < ntd.num_nodes(); ++v) {
        if (ntd.kind[v] == NodeKind::Introduce && ntd.special[v] == 0) intro0 = v;
        if (ntd.kind[v] == NodeKind::Leaf) leaf = v;
    }
    REQUIRE(intro0 >= 0);

    auto views = state_views(three, rs, ntd, intro0, {0});
    REQUIRE(views.size() == 3);
    CHECK(views[0].man == 0);
    CHECK(views[0].ell == 0);

    // Empty bag at the leaf: everyone takes the man-optimal partner.
    auto base = state_views(three, rs, ntd, leaf, {});
    for (const auto& view : base) {
        CHECK_FALSE(view.settled);
        CHECK(view.partner == rs.man_opt.wife(view.man));
    }

    // Root: every man settled; with a compatible matching, partner = mu(m).
    Matching womanopt = rs.woman_opt;
    auto top = state_views(three, rs, ntd, ntd.root, {}, &womanopt);
    for (const auto& view : top) {
        CHECK(view.settled);
        CHECK(view.partner == womanopt.wife(view.man));
    }
    CHECK_THROWS_AS(state_views(three, rs, ntd, ntd.root, {0}), ValidationError);
}

TEST_CASE("fpt solvers on the worked instances") {
    Instance two = i2(), three = i3(), one = one_by_one();
    {
        auto s = fpt_setup(three);
        auto gsm = fpt_solve_gsm(three, s.rs, s.ntd);
        CHECK(gsm.pair_set ==
              std::vector<std::pair<std::int64_t, std::int64_t>>{{3, 9}, {6, 6}, {9, 3}});
        CHECK(fpt_solve_sesm(three, s.rs, s.ntd).optimum == 0);
        CHECK(fpt_solve_bsm(three, s.rs, s.ntd).optimum == 6);
        auto sesm = fpt_solve_sesm(three, s.rs, s.ntd);
        REQUIRE(sesm.witness.has_value());
        CHECK(score(three, *sesm.witness).delta == 0);
    }
    {
        auto s = fpt_setup(two);
        auto gsm = fpt_solve_gsm(two, s.rs, s.ntd);
        CHECK(gsm.pair_set ==
              std::vector<std::pair<std::int64_t, std::int64_t>>{{2, 4}, {4, 2}});
        CHECK(fpt_solve_sesm(two, s.rs, s.ntd).optimum == 2);
        CHECK(fpt_solve_bsm(two, s.rs, s.ntd).optimum == 4);
    }
    {
        auto s = fpt_setup(one);
        auto gsm = fpt_solve_gsm(one, s.rs, s.ntd);
        CHECK(gsm.pair_set ==
              std::vector<std::pair<std::int64_t, std::int64_t>>{{1, 1}});
        CHECK(fpt_solve_sesm(one, s.rs, s.ntd).optimum == 0);
        CHECK(fpt_solve_bsm(one, s.rs, s.ntd).optimum == 1);
    }
    CHECK_THROWS_AS(fpt_solve_sesm(it(), build_rotation_structure(i2()),
                                   fpt_setup(i2()).ntd),
                    ValidationError);
}

TEST_CASE("fpt table semantics match the compatibility definition") {
    for (std::uint64_t seed = 1; seed <= 15; ++seed) {
        Instance inst = random_instance(seed, {2, 5});
        RotationStructure rs = build_rotation_structure(inst);
        if (rs.num_rotations() > 10) continue;
        Graph gpi = rotation_graph(rs);
        NiceTreeDecomposition ntd = make_nice(min_fill_decomposition(gpi), gpi);

        FptDebug debug;
        FptOptions opt;
        opt.debug = &debug;
        fpt_solve_gsm(inst, rs, ntd, opt);

        // Every stable matching, with its eliminated set.
        StableSet set = enumerate_stable_strict(inst);
        std::vector<std::vector<char>> elim;
        for (const auto& mu : set.matchings)
            elim.push_back(rotations_eliminated(rs, inst, mu));

        for (int v = 0; v < ntd.num_nodes(); ++v) {
            const auto& bag = ntd.bags[v];
            for (int mask = 0; mask < (int)debug.n_tables[v].size(); ++mask) {
                std::vector<int> subset;
                for (size_t i = 0; i < bag.size(); ++i)
                    if ((mask >> i) & 1) subset.push_back(bag[i]);
                std::set<std::pair<std::int64_t, std::int64_t>> expected;
                for (size_t s = 0; s < set.matchings.size(); ++s) {
                    bool compatible = true;
                    for (size_t i = 0; i < bag.size(); ++i)
                        if ((bool)elim[s][bag[i]] != (bool)((mask >> i) & 1))
                            compatible = false;
                    if (!compatible) continue;
                    auto views =
                        state_views(inst, rs, ntd, v, subset, &set.matchings[s]);
                    std::int64_t am = 0, lm = 0;
                    for (const auto& view : views) {
                        am += inst.rank(Side::Man, view.man, view.partner);
                        lm += inst.rank(Side::Woman, view.partner, view.man);
                    }
                    expected.insert({am, lm});
                }
                std::set<std::pair<std::int64_t, std::int64_t>> got(
                    debug.n_tables[v][mask].begin(), debug.n_tables[v][mask].end());
                CHECK(got == expected);
                if (!debug.state_valid[v][mask]) CHECK(got.empty());
            }
        }

        // Basis invariant: all matchings compatible with a leaf share the
        // man-optimal tentative scores.
        Scores base = score(inst, rs.man_opt);
        for (int v = 0; v < ntd.num_nodes(); ++v) {
            if (ntd.kind[v] != NodeKind::Leaf) continue;
            REQUIRE(debug.n_tables[v][0].size() == 1);
            CHECK(debug.n_tables[v][0][0] ==
                  std::pair<std::int64_t, std::int64_t>{base.sat_m, base.sat_w});
        }
    }
}

TEST_CASE("fpt agrees with gsm projections") {
    for (std::uint64_t seed = 20; seed <= 40; ++seed) {
        Instance inst = random_instance(seed, {2, 6});
        auto s = fpt_setup(inst);
        auto gsm = fpt_solve_gsm(inst, s.rs, s.ntd);
        std::int64_t best_d = -1, best_b = -1;
        for (auto [tm, tw] : gsm.pair_set) {
            if (best_d < 0 || std::abs(tm - tw) < best_d) best_d = std::abs(tm - tw);
            if (best_b < 0 || std::max(tm, tw) < best_b) best_b = std::max(tm, tw);
        }
        CHECK(fpt_solve_sesm(inst, s.rs, s.ntd).optimum == best_d);
        CHECK(fpt_solve_bsm(inst, s.rs, s.ntd).optimum == best_b);
    }
}

TEST_CASE("fpt results are decomposition independent") {
    for (const Instance& inst : {i2(), i3()}) {
        RotationStructure rs = build_rotation_structure(inst);
        Graph gpi = rotation_graph(rs);
        std::vector<NiceTreeDecomposition> decs;
        decs.push_back(make_nice(min_fill_decomposition(gpi), gpi));
        decs.push_back(make_nice(single_bag_decomposition(gpi), gpi));
        decs.push_back(make_nice(inflate_width(min_fill_decomposition(gpi), gpi), gpi));
        std::set<std::vector<std::pair<std::int64_t, std::int64_t>>> sets;
        for (const auto& ntd : decs) sets.insert(fpt_solve_gsm(inst, rs, ntd).pair_set);
        CHECK(sets.size() == 1);
    }
}

TEST_CASE("parallel tables equal serial tables") {
    for (std::uint64_t seed = 1; seed <= 8; ++seed) {
        Instance inst = random_instance(seed, {4, 8});
        auto s = fpt_setup(inst);
        FptOptions ser, par;
        par.parallel = true;
        auto a = fpt_solve_gsm(inst, s.rs, s.ntd, ser);
        auto b = fpt_solve_gsm(inst, s.rs, s.ntd, par);
        CHECK(a.pair_set == b.pair_set);
        CHECK(a.stats.states == b.stats.states);
        CHECK(a.stats.set_entries == b.stats.set_entries);
        auto sa = fpt_solve_sesm(inst, s.rs, s.ntd, ser);
        auto sb = fpt_solve_sesm(inst, s.rs, s.ntd, par);
        CHECK(sa.optimum == sb.optimum);
    }
}

TEST_CASE("random cross-validation smoke") {
    for (std::uint64_t seed = 100; seed < 130; ++seed) {
        auto err = equivalence_trial_strict(seed, 7);
        if (err) FAIL(*err);
    }
    for (std::uint64_t seed = 200; seed < 230; ++seed) {
        auto err = equivalence_trial_tied(seed, 6);
        if (err) FAIL(*err);
    }
}

TEST_CASE("xp and fpt agree beyond oracle reach") {
    // 10-16 agents per side, sparse lists so the primal width stays in xp
    // range; too big for the filter oracle. The two solvers are fully
    // independent routes. The stacked Latin instance adds rotation-rich
    // structure with block-diagonal primal width 3.
    std::vector<Instance> pool;
    for (std::uint64_t seed = 1; seed <= 10; ++seed)
        pool.push_back(random_instance(seed, {10, 16, false, 0.3}));
    pool.push_back(latin_union(4));
    for (const Instance& inst : pool) {
        auto pg = nice_primal(inst);
        auto s = fpt_setup(inst);
        auto xs = xp_solve_sesm(inst, pg);
        auto fs = fpt_solve_sesm(inst, s.rs, s.ntd);
        CHECK(xs.optimum == fs.optimum);
        auto xb = xp_solve_bsm(inst, pg);
        auto fb = fpt_solve_bsm(inst, s.rs, s.ntd);
        CHECK(xb.optimum == fb.optimum);
        for (const auto* rep : {&xs, &fs, &xb, &fb}) {
            REQUIRE(rep->witness.has_value());
            CHECK_FALSE(find_blocking_pair(inst, *rep->witness).has_value());
        }
        CHECK(std::abs(score(inst, *fs.witness).delta) == fs.optimum);
        CHECK(score(inst, *fb.witness).bal == fb.optimum);
    }
}
