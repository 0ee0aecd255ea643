#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "smtw/core.hpp"

namespace smtw {

// An ordered cycle of matched pairs; eliminating it shifts each man to the
// next woman in the cycle. Cycles are stored starting at their smallest man.
struct Rotation {
    int id = -1;
    std::vector<std::pair<int, int>> cycle;  // (man, woman)
};

// Rotation set R, precedence digraph D_Pi (arcs follow precedence: an arc
// a -> b means a must be eliminated before b), per-man rotation sequences
// R(m) in precedence order, and per-man covering paths P(m).
class RotationStructure {
public:
    std::vector<Rotation> rotations;
    std::vector<std::vector<int>> arcs;       // D_Pi successors
    std::vector<std::vector<int>> rev_arcs;   // D_Pi predecessors
    std::vector<std::vector<int>> per_man;    // R(m), totally ordered by precedence
    std::vector<std::vector<int>> per_man_path;  // P(m), a directed path in D_Pi
    Matching man_opt;
    Matching woman_opt;
    std::vector<char> matched_men;    // M*
    std::vector<char> matched_women;  // W*

    int num_rotations() const { return (int)rotations.size(); }

    // Reflexive reachability in D_Pi; strict precedence is a != b && reaches.
    bool reaches(int a, int b) const {
        return (reach_[a][b >> 6] >> (b & 63)) & 1;
    }
    bool precedes(int a, int b) const { return a != b && reaches(a, b); }

    void rebuild_reachability();

private:
    std::vector<std::vector<std::uint64_t>> reach_;
};

// Builds the full rotation structure of a strict instance by iterated
// exposure/elimination from the man-optimal matching, the two-rule arc
// labeling, and a transitive reduction of the resulting DAG.
RotationStructure build_rotation_structure(const Instance& inst);

// Smallest closed superset of `subset` (ids must be valid).
std::vector<int> closure(const RotationStructure& rs, const std::vector<int>& subset);

bool is_closed(const RotationStructure& rs, const std::vector<int>& set);

// The stable matching whose rotation set is `closed`; throws if not closed.
Matching eliminate(const RotationStructure& rs, const Instance& inst,
                   const std::vector<int>& closed);

// Applies the rotations in exactly the given order, validating each step is
// a legal rotation elimination of the current matching.
Matching eliminate_in_order(const RotationStructure& rs, const Instance& inst,
                            const std::vector<int>& order);

// P(m); empty when R(m) is empty.
const std::vector<int>& man_path(const RotationStructure& rs, int man);

// Underlying undirected graph G_Pi of the rotation digraph.
Graph rotation_graph(const RotationStructure& rs);

std::string rotation_dot(const RotationStructure& rs);

}  // namespace smtw
