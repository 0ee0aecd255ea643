#include "smtw/selftest.hpp"

#include <sstream>

#include "smtw/fpt.hpp"
#include "smtw/oracle.hpp"
#include "smtw/random_instance.hpp"
#include "smtw/rotations.hpp"
#include "smtw/treedec.hpp"
#include "smtw/xp.hpp"

namespace smtw {

namespace {

NiceTreeDecomposition nice_min_fill(const Graph& g) {
    return make_nice(min_fill_decomposition(g), g);
}

std::optional<std::string> check_witness(const Instance& inst, const SolveReport& rep,
                                         Objective obj, std::int64_t expect) {
    if (!rep.witness) return "missing witness (" + rep.objective + ")";
    if (find_blocking_pair(inst, *rep.witness))
        return "witness not stable (" + rep.objective + "/" + rep.method + ")";
    Scores sc = score(inst, *rep.witness);
    std::int64_t got = 0;
    switch (obj) {
        case Objective::Sesm: got = std::abs(sc.delta); break;
        case Objective::Bsm: got = sc.bal; break;
        case Objective::MaxSmt:
        case Objective::MinSmt: got = sc.size; break;
        default: return std::string("bad objective");
    }
    if (got != expect) {
        std::ostringstream os;
        os << rep.objective << "/" << rep.method << " witness attains " << got
           << " but optimum is " << expect;
        return os.str();
    }
    return std::nullopt;
}

}  // namespace

std::optional<std::string> equivalence_trial_strict(std::uint64_t seed, int max_side,
                                                    bool parallel) {
    RandomSpec spec;
    spec.max_side = max_side;
    Instance inst = random_instance(seed, spec);

    StableSet set = enumerate_stable_strict(inst);
    std::int64_t delta = -1, bal = -1;
    std::vector<std::pair<std::int64_t, std::int64_t>> pairs;
    for (const auto& sc : set.scores) {
        if (delta < 0 || std::abs(sc.delta) < delta) delta = std::abs(sc.delta);
        if (bal < 0 || sc.bal < bal) bal = sc.bal;
        pairs.emplace_back(sc.sat_m, sc.sat_w);
    }
    std::sort(pairs.begin(), pairs.end());
    pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());

    Graph pg = primal_graph(inst);
    auto ntd_p = nice_min_fill(pg);
    auto xp_s = xp_solve_sesm(inst, ntd_p);
    auto xp_b = xp_solve_bsm(inst, ntd_p);

    RotationStructure rs = build_rotation_structure(inst);
    Graph gpi = rotation_graph(rs);
    auto ntd_r = nice_min_fill(gpi);
    FptOptions fopt;
    fopt.parallel = parallel;
    auto f_s = fpt_solve_sesm(inst, rs, ntd_r, fopt);
    auto f_b = fpt_solve_bsm(inst, rs, ntd_r, fopt);
    auto f_g = fpt_solve_gsm(inst, rs, ntd_r, fopt);

    auto fail = [&](const std::string& what, std::int64_t got, std::int64_t want) {
        std::ostringstream os;
        os << "seed " << seed << ": " << what << " = " << got << ", oracle " << want;
        return os.str();
    };
    if (xp_s.optimum != delta) return fail("xp sesm", xp_s.optimum, delta);
    if (f_s.optimum != delta) return fail("fpt sesm", f_s.optimum, delta);
    if (xp_b.optimum != bal) return fail("xp bsm", xp_b.optimum, bal);
    if (f_b.optimum != bal) return fail("fpt bsm", f_b.optimum, bal);
    if (f_g.pair_set != pairs) {
        std::ostringstream os;
        os << "seed " << seed << ": gsm pair set mismatch (" << f_g.pair_set.size()
           << " vs " << pairs.size() << ")";
        return os.str();
    }
    for (auto* rep : {&xp_s, &f_s})
        if (auto err = check_witness(inst, *rep, Objective::Sesm, delta)) return err;
    for (auto* rep : {&xp_b, &f_b})
        if (auto err = check_witness(inst, *rep, Objective::Bsm, bal)) return err;
    return std::nullopt;
}

std::optional<std::string> equivalence_trial_tied(std::uint64_t seed, int max_side) {
    RandomSpec spec;
    spec.max_side = max_side;
    spec.ties = true;
    spec.max_pairs = 16;
    Instance inst = random_instance(seed, spec);

    StableSet set = enumerate_weakly_stable(inst);
    std::int64_t max_size = -1, min_size = -1;
    for (const auto& sc : set.scores) {
        if (max_size < 0 || sc.size > max_size) max_size = sc.size;
        if (min_size < 0 || sc.size < min_size) min_size = sc.size;
    }

    Graph pg = primal_graph(inst);
    auto ntd = nice_min_fill(pg);
    auto xmax = xp_solve_max_smt(inst, ntd);
    auto xmin = xp_solve_min_smt(inst, ntd);
    auto fail = [&](const std::string& what, std::int64_t got, std::int64_t want) {
        std::ostringstream os;
        os << "seed " << seed << ": " << what << " = " << got << ", oracle " << want;
        return os.str();
    };
    if (xmax.optimum != max_size) return fail("xp max-smt", xmax.optimum, max_size);
    if (xmin.optimum != min_size) return fail("xp min-smt", xmin.optimum, min_size);
    if (auto err = check_witness(inst, xmax, Objective::MaxSmt, max_size)) return err;
    if (auto err = check_witness(inst, xmin, Objective::MinSmt, min_size)) return err;
    return std::nullopt;
}

}  // namespace smtw
