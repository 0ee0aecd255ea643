#pragma once

#include <cstdint>

#include "smtw/core.hpp"

namespace smtw {

struct RandomSpec {
    int min_side = 2;
    int max_side = 8;
    bool ties = false;
    double edge_prob = 0.6;
    // Resample until the acceptable-pair count fits (0 = no cap).
    int max_pairs = 0;
};

// Deterministic given the seed; acceptability generated symmetrically,
// then each side ranks its acceptable partners in random order, with
// random consecutive tie groups when ties are on.
Instance random_instance(std::uint64_t seed, const RandomSpec& spec);

}  // namespace smtw
