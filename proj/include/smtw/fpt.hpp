#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "smtw/core.hpp"
#include "smtw/oracle.hpp"
#include "smtw/report.hpp"
#include "smtw/rotations.hpp"
#include "smtw/treedec.hpp"

namespace smtw {

// Per-man view of a state (node, R'): entry/exit rotations on P(m), the
// uncertain subpath between them, whether the subtree already pins the
// man's final partner, and the tentative partner.
struct ManView {
    int man = -1;
    int ell = -1;      // last P(m) vertex in R', -1 = nil
    int eff = -1;      // first P(m) vertex after ell in bag \ R', -1 = nil
    std::vector<int> segment;  // the uncertain subpath; empty if not relevant
    bool relevant = false;
    bool settled = false;
    int partner = -1;  // woman id
};

// Views for every man in M*. When mu is null, partners are evaluated at
// mu_{R'} throughout (the evaluation used to build the tables); otherwise
// settled men use mu and unsettled men use mu_{R'}.
std::vector<ManView> state_views(const Instance& inst, const RotationStructure& rs,
                                 const NiceTreeDecomposition& ntd, int node,
                                 const std::vector<int>& subset,
                                 const Matching* mu = nullptr);

// Debug snapshot of the DP tables, for invariant tests.
struct FptDebug {
    // n_tables[node][mask] -> sorted (t_M, t_W) with a set entry.
    std::vector<std::vector<std::vector<std::pair<std::int64_t, std::int64_t>>>> n_tables;
    std::vector<std::vector<char>> state_valid;  // closure-compatible states
};

struct FptOptions {
    bool want_witness = true;
    bool parallel = false;
    std::int64_t max_table_entries = 50'000'000;
    FptDebug* debug = nullptr;  // gsm only
};

// 2^tw poly(n) dynamic programs over a nice decomposition of G_Pi.
// ntd must decompose rotation_graph(rs); strict preferences required.
SolveReport fpt_solve_gsm(const Instance& inst, const RotationStructure& rs,
                          const NiceTreeDecomposition& ntd, const FptOptions& opt = {});
SolveReport fpt_solve_sesm(const Instance& inst, const RotationStructure& rs,
                           const NiceTreeDecomposition& ntd, const FptOptions& opt = {});
SolveReport fpt_solve_bsm(const Instance& inst, const RotationStructure& rs,
                          const NiceTreeDecomposition& ntd, const FptOptions& opt = {});

}  // namespace smtw
