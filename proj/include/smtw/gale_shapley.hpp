#pragma once

#include <cstdint>

#include "smtw/core.hpp"

namespace smtw {

// The two lattice extremes of a strict instance plus the always-matched
// agent sets M*, W* (identical across all stable matchings).
struct LatticeExtremes {
    Matching man_optimal;
    Matching woman_optimal;
    std::vector<char> matched_men;    // M* indicator
    std::vector<char> matched_women;  // W* indicator
};

// Extended Gale-Shapley for incomplete strict lists, men proposing.
// Throws ValidationError if the instance has ties.
Matching man_optimal(const Instance& inst);

// Same with roles swapped.
Matching woman_optimal(const Instance& inst);

LatticeExtremes lattice_extremes(const Instance& inst);

// Breaks ties with a seeded pseudo-random permutation within each tie
// group, then runs Gale-Shapley. Works on strict lists too (no-op break).
Matching stable_with_tiebreak(const Instance& inst, std::uint64_t seed);

// The strict instance obtained by the seeded tie-break, exposed so callers
// can reason about the tie-broken lists directly.
Instance break_ties(const Instance& inst, std::uint64_t seed);

}  // namespace smtw
