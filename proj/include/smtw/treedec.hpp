#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "smtw/core.hpp"

namespace smtw {

struct TreeDecomposition {
    int num_vertices = 0;                    // of the decomposed graph
    std::vector<std::vector<int>> bags;      // node -> sorted vertex ids
    std::vector<std::pair<int, int>> edges;  // tree edges between node ids
    int num_nodes() const { return (int)bags.size(); }
    int width() const {
        int w = -1;
        for (const auto& b : bags) w = std::max(w, (int)b.size() - 1);
        return w;
    }
};

// Returns the width; throws ValidationError naming a witness (uncovered
// edge, disconnected or missing vertex occurrence, malformed tree).
int validate(const TreeDecomposition& td, const Graph& g);

// Min-fill elimination ordering; exact on chordal graphs.
TreeDecomposition min_fill_decomposition(const Graph& g);

enum class NodeKind { Leaf, Forget, Introduce, Join };

struct NiceTreeDecomposition {
    int num_vertices = 0;
    std::vector<std::vector<int>> bags;  // sorted
    std::vector<NodeKind> kind;
    std::vector<int> special;  // forgotten/introduced vertex, -1 otherwise
    std::vector<std::array<int, 2>> children;  // -1 = none
    std::vector<int> parent;
    int root = -1;
    std::vector<int> postorder;

    int num_nodes() const { return (int)bags.size(); }
    int width() const {
        int w = -1;
        for (const auto& b : bags) w = std::max(w, (int)b.size() - 1);
        return w;
    }
};

// Converts to nice form of the same width: empty leaves and root, forget
// chains below introduce chains along edges, balanced binary join trees.
// root_node < 0 means node 0.
NiceTreeDecomposition make_nice(const TreeDecomposition& td, const Graph& g,
                                int root_node = -1);

// Validates the nice-form structural rules plus the decomposition rules.
int validate_nice(const NiceTreeDecomposition& ntd, const Graph& g);

// gamma(v) = union of bags in v's subtree, as one bitset row per node.
std::vector<std::vector<std::uint64_t>> gamma_sets(const NiceTreeDecomposition& ntd);

inline bool bitset_test(const std::vector<std::uint64_t>& bs, int i) {
    return (bs[i >> 6] >> (i & 63)) & 1;
}

// Test helper shapes.
TreeDecomposition single_bag_decomposition(const Graph& g);
TreeDecomposition inflate_width(const TreeDecomposition& td, const Graph& g);

}  // namespace smtw
