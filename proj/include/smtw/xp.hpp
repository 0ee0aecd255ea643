#pragma once

#include <vector>

#include "smtw/core.hpp"
#include "smtw/oracle.hpp"
#include "smtw/report.hpp"
#include "smtw/treedec.hpp"

namespace smtw {

// One step of a reconstructed witness: the partial assignment induced on
// gamma(node) by the chosen table entries (partner -1 = unmatched).
struct XpWitnessVisit {
    int node;
    std::vector<std::pair<int, int>> assignments;  // (agent, partner)
};

struct XpOptions {
    bool want_witness = true;
    std::int64_t max_table_entries = 20'000'000;
    std::vector<XpWitnessVisit>* trace = nullptr;  // test hook
};

// n^O(tw) dynamic programs over a nice decomposition of the primal graph.
// ntd must decompose primal_graph(inst); Sesm/Bsm additionally require
// strict preferences.
SolveReport xp_solve(const Instance& inst, const NiceTreeDecomposition& ntd,
                     Objective objective, const XpOptions& opt = {});

SolveReport xp_solve_sesm(const Instance& inst, const NiceTreeDecomposition& ntd,
                          const XpOptions& opt = {});
SolveReport xp_solve_bsm(const Instance& inst, const NiceTreeDecomposition& ntd,
                         const XpOptions& opt = {});
SolveReport xp_solve_max_smt(const Instance& inst, const NiceTreeDecomposition& ntd,
                             const XpOptions& opt = {});
SolveReport xp_solve_min_smt(const Instance& inst, const NiceTreeDecomposition& ntd,
                             const XpOptions& opt = {});

}  // namespace smtw
