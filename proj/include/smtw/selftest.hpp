#pragma once

#include <cstdint>
#include <optional>
#include <string>

namespace smtw {

// One oracle-equivalence trial: builds a seeded random instance, solves it
// with every applicable route (oracle, xp, fpt) and cross-checks optima,
// pair sets and witnesses. Returns a description of the first mismatch.
std::optional<std::string> equivalence_trial_strict(std::uint64_t seed, int max_side,
                                                    bool parallel = false);
std::optional<std::string> equivalence_trial_tied(std::uint64_t seed, int max_side);

}  // namespace smtw
