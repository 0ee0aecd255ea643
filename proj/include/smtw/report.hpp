#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "smtw/core.hpp"

namespace smtw {

struct SolveStats {
    std::int64_t states = 0;       // DP states processed (node, assignment/subset)
    std::int64_t dense_cells = 0;  // states times the dense target dimension
    std::int64_t set_entries = 0;  // sparse entries actually stored
    std::int64_t nodes = 0;        // decomposition nodes
    int width = -1;                // decomposition width used
    double wall_ms = 0.0;
};

struct SolveReport {
    std::string objective;
    std::string method;
    std::int64_t optimum = 0;
    std::optional<Matching> witness;
    // Populated for gsm only.
    std::vector<std::pair<std::int64_t, std::int64_t>> pair_set;
    SolveStats stats;
};

// JSON with fields {problem, method, optimum, witness, stats} always present.
std::string report_to_json(const SolveReport& report);

}  // namespace smtw
