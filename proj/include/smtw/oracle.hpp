#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "smtw/core.hpp"
#include "smtw/rotations.hpp"

namespace smtw {

struct StableSet {
    std::vector<Matching> matchings;
    std::vector<Scores> scores;  // parallel
};

enum class StrictEnumMethod { Both, ClosedSets, Filter };

// All stable matchings of a strict instance. The closed-set route walks the
// rotation lattice; the filter route checks every injective matching over
// acceptable pairs. With Both (default) the two must agree exactly.
// Guard: Filter requires at most 20 agents.
StableSet enumerate_stable_strict(const Instance& inst,
                                  StrictEnumMethod method = StrictEnumMethod::Both);

// All weakly stable matchings of a (possibly tied) instance.
// Guard: at most 16 acceptable pairs.
StableSet enumerate_weakly_stable(const Instance& inst);

enum class Objective { Sesm, Bsm, MaxSmt, MinSmt, Gsm };

Objective objective_from_name(const std::string& name);
std::string objective_name(Objective o);

struct OracleResult {
    std::int64_t optimum = 0;  // Delta / Bal / max size / min size
    Matching witness;
    // For Gsm: the full deduplicated (sat_M, sat_W) set, sorted.
    std::vector<std::pair<std::int64_t, std::int64_t>> pair_set;
};

OracleResult oracle_optimum(const Instance& inst, Objective objective);

// Which rotations a stable matching eliminates, decided per rotation from
// the first man's partner rank; checks all pairs of the rotation agree.
std::vector<char> rotations_eliminated(const RotationStructure& rs,
                                       const Instance& inst, const Matching& mu);

}  // namespace smtw
