#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "smtw/core.hpp"
#include "smtw/formats.hpp"

namespace smtw {

// Multicolored Clique input: equal-size color classes; edges only between
// classes (intra-class edges are rejected).
struct CliqueInput {
    Graph graph;
    int k = 0;
    int p = 0;                                // class size
    std::vector<std::vector<int>> classes;    // vertex ids per class
    std::vector<int> class_of;                // per vertex
    std::vector<int> index_in_class;          // per vertex, 0-based
    // Canonical edge lists E^{i,j} for i < j, as edge indices into graph.edges.
    std::map<std::pair<int, int>, std::vector<int>> pair_edges;

    static CliqueInput make(const Graph& g, const std::vector<std::vector<int>>& classes);
};

// Sparse p-CNF-SAT input split into blocks of d clauses, with the per-block
// satisfying partial assignments enumerated.
struct SatInput {
    CnfFormula formula;   // after padding to a multiple of d
    int num_vars = 0;     // n
    int width = 0;        // p: max clause width
    int sparsity = 0;     // s: ceil(r / n)
    int block_size = 0;   // d
    int num_blocks = 0;   // q
    std::vector<std::vector<int>> block_vars;          // X^i, sorted 0-based vars
    std::vector<std::vector<std::vector<char>>> sets;  // sets[i][j][t] true iff x_t in P^i_j
    std::vector<int> a;                                // a^i = |F^i|
    std::int64_t a_total = 0;                          // sum of a^i
    bool unsatisfiable_block = false;                  // some F^i empty

    static SatInput make(const CnfFormula& f, int block_size);
};

struct AgentRole {
    std::string gadget;
    std::string name;
};

struct ReductionOutput {
    std::string kind;
    Instance instance;
    std::vector<AgentRole> man_roles, woman_roles;
    std::int64_t predicted_agents = 0;
    std::int64_t treewidth_bound = 0;  // primal (clique) or rotation (sat)
    std::int64_t target = 0;           // Delta bound / eta / target size
    std::map<std::string, std::int64_t> numbers;
    std::shared_ptr<CliqueInput> clique;
    std::shared_ptr<SatInput> sat;
};

// Relaxed-mode substitutes for |E|^10..|E|^40; happy_mult 0 = allocate
// exactly the pairs the construction consumes. relaxed=false enforces the
// paper-scale preconditions and magnitudes (which overflow for any
// non-trivial input and are then refused).
struct CliqueSpacers {
    std::int64_t s10 = 2, s20 = 3, s30 = 4, s40 = 64;
    std::int64_t happy_mult = 0;
    bool relaxed = true;
};

// Relaxed-mode substitutes for the n^20 / n^10 spacer bases.
struct SatSpacers {
    std::int64_t scale = 16;  // replaces n^20
    std::int64_t tau = 4;     // replaces n^10
};

ReductionOutput reduce_clique_to_sesm(const CliqueInput& in, const CliqueSpacers& sp = {});
ReductionOutput reduce_clique_to_bsm(const CliqueInput& in, const CliqueSpacers& sp = {});
ReductionOutput reduce_clique_to_max_smt(const CliqueInput& in);
ReductionOutput reduce_clique_to_min_smt(const CliqueInput& in);
ReductionOutput reduce_sat_to_sesm(const SatInput& in, const SatSpacers& sp = {});
ReductionOutput reduce_sat_to_bsm(const SatInput& in, const SatSpacers& sp = {});

struct CheckResult {
    std::string name;
    bool pass = false;
    bool skipped = false;
    std::string detail;
};

struct VerificationReport {
    std::string kind;
    std::vector<CheckResult> checks;
    bool all_passed() const {
        for (const auto& c : checks)
            if (!c.skipped && !c.pass) return false;
        return true;
    }
};

VerificationReport verify_reduction(const ReductionOutput& out);

std::string verification_to_json(const VerificationReport& report);

// Side-car metadata: line-oriented "key: value".
std::string reduction_metadata(const ReductionOutput& out);

// Exact weak-stability optimum by pruned search over men in id order;
// throws GuardExceeded past `node_budget` search nodes.
std::int64_t smt_optimum_pruned(const Instance& inst, bool maximize,
                                std::int64_t node_budget = 50'000'000);

}  // namespace smtw
