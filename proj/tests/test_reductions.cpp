#include <doctest.h>

#include "smtw/formats.hpp"
#include "smtw/oracle.hpp"
#include "smtw/random_instance.hpp"
#include "smtw/reductions.hpp"

using namespace smtw;

namespace {

// k=2, p=2 with one selectable edge per orientation: always a yes-instance.
CliqueInput tiny_yes2() {
    Graph g = Graph::empty(4);
    g.add_edge(0, 2);
    g.add_edge(1, 3);
    return CliqueInput::make(g, {{0, 1}, {2, 3}});
}

// k=3, p=2; full triangle on (0, 2, 4) plus a distractor edge.
CliqueInput tiny_yes3() {
    Graph g = Graph::empty(6);
    g.add_edge(0, 2);
    g.add_edge(0, 4);
    g.add_edge(2, 4);
    g.add_edge(1, 3);
    return CliqueInput::make(g, {{0, 1}, {2, 3}, {4, 5}});
}

// Same classes but no triangle.
CliqueInput tiny_no3() {
    Graph g = Graph::empty(6);
    g.add_edge(0, 2);
    g.add_edge(0, 4);
    g.add_edge(3, 4);
    return CliqueInput::make(g, {{0, 1}, {2, 3}, {4, 5}});
}

CliqueSpacers small_spacers() {
    CliqueSpacers sp;
    sp.s10 = 2;
    sp.s20 = 3;
    sp.s30 = 2;
    sp.s40 = 32;
    return sp;
}

void expect_all(const VerificationReport& rep, bool allow_skips = true) {
    for (const auto& c : rep.checks) {
        INFO(rep.kind, " check ", c.name, ": ", c.detail);
        if (c.skipped) {
            CHECK(allow_skips);
            continue;
        }
        CHECK(c.pass);
    }
}

}  // namespace

TEST_CASE("clique input validation") {
    Graph g = Graph::empty(4);
    g.add_edge(0, 1);
    CHECK_THROWS_AS(CliqueInput::make(g, {{0, 1}, {2, 3}}), ValidationError);  // intra
    Graph g2 = Graph::empty(4);
    g2.add_edge(0, 2);
    CHECK_THROWS_AS(CliqueInput::make(g2, {{0}, {1, 2, 3}}), ValidationError);
    CHECK_THROWS_AS(CliqueInput::make(g2, {{0, 1}, {2}}), ValidationError);
}

TEST_CASE("clique-sesm structural verification") {
    auto out = reduce_clique_to_sesm(tiny_yes2(), small_spacers());
    CHECK(out.instance.total_agents() == out.predicted_agents);
    auto rep = verify_reduction(out);
    expect_all(rep);
    for (const auto& c : rep.checks) CHECK_FALSE(c.skipped);

    auto out3 = reduce_clique_to_sesm(tiny_yes3(), small_spacers());
    expect_all(verify_reduction(out3));
}

TEST_CASE("clique-bsm structural verification") {
    auto out = reduce_clique_to_bsm(tiny_yes2(), small_spacers());
    auto rep = verify_reduction(out);
    expect_all(rep);
    CHECK(out.numbers.at("alpha_hat") >= out.numbers.at("alpha"));
}

TEST_CASE("negative alpha is refused") {
    CliqueSpacers sp = small_spacers();
    sp.s30 = 60;
    sp.s40 = 1;
    CHECK_THROWS_AS(reduce_clique_to_sesm(tiny_yes2(), sp), ValidationError);
}

TEST_CASE("strict mode enforces the paper preconditions") {
    CliqueSpacers sp;
    sp.relaxed = false;
    CHECK_THROWS_AS(reduce_clique_to_sesm(tiny_yes2(), sp), ValidationError);
}

TEST_CASE("clique-maxsmt yes and no instances") {
    auto yes = reduce_clique_to_max_smt(tiny_yes3());
    CHECK(yes.instance.has_ties());
    expect_all(verify_reduction(yes));
    CHECK(smt_optimum_pruned(yes.instance, true) == yes.target);

    auto no = reduce_clique_to_max_smt(tiny_no3());
    expect_all(verify_reduction(no));
    CHECK(smt_optimum_pruned(no.instance, true) < no.target);
}

TEST_CASE("clique-minsmt yes and no instances") {
    auto yes = reduce_clique_to_min_smt(tiny_yes3());
    expect_all(verify_reduction(yes));
    CHECK(smt_optimum_pruned(yes.instance, false) == yes.target);
    CHECK(yes.target == 3 + 2 * 6 + 4);

    auto no = reduce_clique_to_min_smt(tiny_no3());
    expect_all(verify_reduction(no));
    CHECK(smt_optimum_pruned(no.instance, false) > no.target);
}

TEST_CASE("sat reduction inputs") {
    CnfFormula f;
    f.num_vars = 3;
    f.clauses = {{1, 2}, {-1, 3}};
    SatInput in = SatInput::make(f, 1);
    CHECK(in.num_blocks == 2);
    CHECK(in.a[0] == 3);
    CHECK(in.a[1] == 3);
    CHECK_FALSE(in.unsatisfiable_block);

    CnfFormula f2;
    f2.num_vars = 1;
    f2.clauses = {{1}, {-1}};
    SatInput bad = SatInput::make(f2, 2);
    CHECK(bad.unsatisfiable_block);
    auto marker = reduce_sat_to_sesm(bad, {});
    CHECK(marker.numbers.count("trivially_unsatisfiable"));
    CHECK(marker.instance.total_agents() == 0);
}

TEST_CASE("sat-sesm structural verification") {
    CnfFormula f;
    f.num_vars = 3;
    f.clauses = {{1, 2}, {-1, 3}};
    SatInput in = SatInput::make(f, 1);
    SatSpacers sp;
    sp.scale = 8;
    sp.tau = 4;
    auto out = reduce_sat_to_sesm(in, sp);
    CHECK(out.instance.total_agents() == out.predicted_agents);
    auto rep = verify_reduction(out);
    expect_all(rep);
    for (const auto& c : rep.checks) CHECK_FALSE(c.skipped);
}

TEST_CASE("sat-bsm shares the rotation digraph") {
    CnfFormula f;
    f.num_vars = 2;
    f.clauses = {{1, 2}};
    SatInput in = SatInput::make(f, 1);
    SatSpacers sp;
    sp.scale = 8;
    sp.tau = 2;
    auto out = reduce_sat_to_bsm(in, sp);
    auto rep = verify_reduction(out);
    expect_all(rep);
    bool saw = false;
    for (const auto& c : rep.checks)
        if (c.name == "same-rotation-digraph") {
            saw = true;
            CHECK(c.pass);
        }
    CHECK(saw);
}

TEST_CASE("pruned smt optimum agrees with the subset oracle") {
    for (std::uint64_t seed = 1; seed <= 25; ++seed) {
        Instance inst = random_instance(seed, {2, 5, true, 0.6, 16});
        StableSet set = enumerate_weakly_stable(inst);
        std::int64_t mx = 0, mn = inst.num_men();
        for (const auto& sc : set.scores) {
            mx = std::max<std::int64_t>(mx, sc.size);
            mn = std::min<std::int64_t>(mn, sc.size);
        }
        CHECK(smt_optimum_pruned(inst, true) == mx);
        CHECK(smt_optimum_pruned(inst, false) == mn);
    }
}

TEST_CASE("reduction metadata") {
    auto out = reduce_clique_to_min_smt(tiny_yes2());
    std::string meta = reduction_metadata(out);
    CHECK(meta.find("kind: clique-minsmt") != std::string::npos);
    CHECK(meta.find("role.m.1: leader m1") != std::string::npos);
    CHECK(meta.find("target: ") != std::string::npos);

    // Generated instances parse back through the text format.
    Instance round = parse_instance(format_instance(out.instance));
    CHECK(round.total_agents() == out.instance.total_agents());
}
