#include "smtw/treedec.hpp"

#include <algorithm>
#include <bit>
#include <deque>
#include <functional>
#include <iterator>
#include <numeric>
#include <string>

namespace smtw {

namespace {

using Bits = std::vector<std::uint64_t>;

Bits make_bits(int n) { return Bits((n + 63) / 64, 0); }
void bit_set(Bits& b, int i) { b[i >> 6] |= 1ull << (i & 63); }
void bit_clear(Bits& b, int i) { b[i >> 6] &= ~(1ull << (i & 63)); }
bool bit_get(const Bits& b, int i) { return (b[i >> 6] >> (i & 63)) & 1; }

}  // namespace

int validate(const TreeDecomposition& td, const Graph& g) {
    int nb = td.num_nodes();
    if (nb == 0) throw ValidationError("decomposition has no nodes");
    if ((int)td.edges.size() != nb - 1)
        throw ValidationError("decomposition tree has wrong edge count");
    std::vector<std::vector<int>> adj(nb);
    for (auto [u, v] : td.edges) {
        if (u < 0 || v < 0 || u >= nb || v >= nb || u == v)
            throw ValidationError("decomposition tree edge out of range");
        adj[u].push_back(v);
        adj[v].push_back(u);
    }
    std::vector<char> seen(nb, 0);
    std::deque<int> q{0};
    seen[0] = 1;
    int cnt = 1;
    while (!q.empty()) {
        int u = q.front();
        q.pop_front();
        for (int v : adj[u])
            if (!seen[v]) {
                seen[v] = 1;
                ++cnt;
                q.push_back(v);
            }
    }
    if (cnt != nb) throw ValidationError("decomposition tree is disconnected");
    for (const auto& bag : td.bags)
        for (int x : bag)
            if (x < 0 || x >= g.n)
                throw ValidationError("bag vertex " + std::to_string(x + 1) +
                                      " out of range");
    // Every edge in some bag.
    for (auto [x, y] : g.edges) {
        bool ok = false;
        for (const auto& bag : td.bags) {
            if (std::binary_search(bag.begin(), bag.end(), x) &&
                std::binary_search(bag.begin(), bag.end(), y)) {
                ok = true;
                break;
            }
        }
        if (!ok)
            throw ValidationError("edge {" + std::to_string(x + 1) + "," +
                                  std::to_string(y + 1) + "} uncovered");
    }
    // Occurrences of each vertex form a non-empty connected subtree.
    for (int x = 0; x < g.n; ++x) {
        std::vector<int> occ;
        for (int b = 0; b < nb; ++b)
            if (std::binary_search(td.bags[b].begin(), td.bags[b].end(), x))
                occ.push_back(b);
        if (occ.empty())
            throw ValidationError("vertex " + std::to_string(x + 1) +
                                  " appears in no bag");
        std::vector<char> in(nb, 0), vis(nb, 0);
        for (int b : occ) in[b] = 1;
        std::deque<int> bq{occ[0]};
        vis[occ[0]] = 1;
        int found = 1;
        while (!bq.empty()) {
            int u = bq.front();
            bq.pop_front();
            for (int v : adj[u])
                if (in[v] && !vis[v]) {
                    vis[v] = 1;
                    ++found;
                    bq.push_back(v);
                }
        }
        if (found != (int)occ.size())
            throw ValidationError("occurrences of vertex " + std::to_string(x + 1) +
                                  " are disconnected");
    }
    return td.width();
}

TreeDecomposition min_fill_decomposition(const Graph& g) {
    int n = g.n;
    TreeDecomposition td;
    td.num_vertices = n;
    if (n == 0) {
        td.bags.push_back({});
        return td;
    }
    std::vector<Bits> adj(n, make_bits(n));
    for (auto [x, y] : g.edges) {
        if (x != y) {
            bit_set(adj[x], y);
            bit_set(adj[y], x);
        }
    }
    Bits alive = make_bits(n);
    for (int v = 0; v < n; ++v) bit_set(alive, v);
    int words = (int)alive.size();

    auto neighbors_of = [&](int v) {
        std::vector<int> out;
        for (int w = 0; w < words; ++w) {
            std::uint64_t bits = adj[v][w] & alive[w];
            while (bits) {
                int b = std::countr_zero(bits);
                out.push_back(w * 64 + b);
                bits &= bits - 1;
            }
        }
        return out;
    };
    auto fill_count = [&](int v) {
        auto nb = neighbors_of(v);
        std::int64_t missing = 0;
        for (int x : nb)
            for (int w = 0; w < words; ++w) {
                std::uint64_t want = adj[v][w] & alive[w] & ~adj[x][w];
                if (w == (x >> 6)) want &= ~(1ull << (x & 63));
                missing += std::popcount(want);
            }
        return missing / 2;
    };

    std::vector<int> order;
    std::vector<std::vector<int>> bag_of(n);
    for (int step = 0; step < n; ++step) {
        int best = -1;
        std::int64_t best_fill = 0;
        for (int v = 0; v < n; ++v) {
            if (!bit_get(alive, v)) continue;
            std::int64_t f = fill_count(v);
            if (best < 0 || f < best_fill) {
                best = v;
                best_fill = f;
            }
        }
        auto nb = neighbors_of(best);
        bag_of[best] = nb;
        bag_of[best].push_back(best);
        std::sort(bag_of[best].begin(), bag_of[best].end());
        for (size_t i = 0; i < nb.size(); ++i)
            for (size_t j = i + 1; j < nb.size(); ++j) {
                bit_set(adj[nb[i]], nb[j]);
                bit_set(adj[nb[j]], nb[i]);
            }
        bit_clear(alive, best);
        order.push_back(best);
    }

    std::vector<int> pos(n);
    for (int i = 0; i < n; ++i) pos[order[i]] = i;
    td.bags.resize(n);
    for (int i = 0; i < n; ++i) td.bags[i] = bag_of[order[i]];
    for (int i = 0; i < n; ++i) {
        int parent = -1;
        for (int x : td.bags[i])
            if (x != order[i] && (parent < 0 || pos[x] < pos[parent])) parent = x;
        if (parent >= 0)
            td.edges.emplace_back(i, pos[parent]);
        else if (i != n - 1)
            td.edges.emplace_back(i, n - 1);  // keep disconnected pieces attached
    }
    return td;
}

namespace {

struct NiceBuilder {
    NiceTreeDecomposition out;

    int add(std::vector<int> bag, NodeKind kind, int special, int c0, int c1) {
        int id = (int)out.bags.size();
        out.bags.push_back(std::move(bag));
        out.kind.push_back(kind);
        out.special.push_back(special);
        out.children.push_back({c0, c1});
        out.parent.push_back(-1);
        if (c0 >= 0) out.parent[c0] = id;
        if (c1 >= 0) out.parent[c1] = id;
        return id;
    }

    // Leaf-and-introduce chain building up `bag` from nothing.
    int build_up(const std::vector<int>& bag) {
        int cur = add({}, NodeKind::Leaf, -1, -1, -1);
        std::vector<int> sofar;
        for (int x : bag) {
            sofar.push_back(x);
            cur = add(sofar, NodeKind::Introduce, x, cur, -1);
        }
        return cur;
    }

    // Transition chain from the bag of `node` to `target`.
    int transition(int node, const std::vector<int>& target) {
        std::vector<int> cur_bag = out.bags[node];
        int cur = node;
        std::vector<int> to_forget, to_intro;
        std::set_difference(cur_bag.begin(), cur_bag.end(), target.begin(), target.end(),
                            std::back_inserter(to_forget));
        std::set_difference(target.begin(), target.end(), cur_bag.begin(), cur_bag.end(),
                            std::back_inserter(to_intro));
        for (int x : to_forget) {
            cur_bag.erase(std::find(cur_bag.begin(), cur_bag.end(), x));
            cur = add(cur_bag, NodeKind::Forget, x, cur, -1);
        }
        for (int x : to_intro) {
            cur_bag.insert(std::upper_bound(cur_bag.begin(), cur_bag.end(), x), x);
            cur = add(cur_bag, NodeKind::Introduce, x, cur, -1);
        }
        return cur;
    }
};

}  // namespace

NiceTreeDecomposition make_nice(const TreeDecomposition& td, const Graph& g,
                                int root_node) {
    validate(td, g);
    int nb = td.num_nodes();
    int root = root_node < 0 ? 0 : root_node;
    if (root >= nb) throw ValidationError("root node out of range");
    std::vector<std::vector<int>> adj(nb);
    for (auto [u, v] : td.edges) {
        adj[u].push_back(v);
        adj[v].push_back(u);
    }
    NiceBuilder nb_out;
    nb_out.out.num_vertices = g.n;

    // Iterative post-order over the rooted tree.
    std::vector<int> parent(nb, -2), order;
    std::deque<int> q{root};
    parent[root] = -1;
    while (!q.empty()) {
        int u = q.front();
        q.pop_front();
        order.push_back(u);
        for (int v : adj[u])
            if (parent[v] == -2) {
                parent[v] = u;
                q.push_back(v);
            }
    }
    std::vector<int> built(nb, -1);
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        int u = *it;
        std::vector<int> kids;
        for (int v : adj[u])
            if (parent[v] == u) kids.push_back(built[v]);
        if (kids.empty()) {
            built[u] = nb_out.build_up(td.bags[u]);
            continue;
        }
        // Bring each child subtree's top bag to this node's bag, then join.
        std::vector<int> tops;
        for (int c : kids) tops.push_back(nb_out.transition(c, td.bags[u]));
        while (tops.size() > 1) {
            std::vector<int> next;
            for (size_t i = 0; i + 1 < tops.size(); i += 2)
                next.push_back(nb_out.add(td.bags[u], NodeKind::Join, -1, tops[i],
                                          tops[i + 1]));
            if (tops.size() % 2) next.push_back(tops.back());
            tops = std::move(next);
        }
        built[u] = tops[0];
    }
    // Forget everything above the original root.
    int top = nb_out.transition(built[root], {});
    nb_out.out.root = top;

    auto& out = nb_out.out;
    out.postorder.clear();
    std::vector<std::pair<int, int>> stack{{out.root, 0}};
    while (!stack.empty()) {
        auto& [node, phase] = stack.back();
        if (phase == 0 && out.children[node][0] >= 0) {
            phase = 1;
            stack.push_back({out.children[node][0], 0});
        } else if (phase <= 1 && out.children[node][1] >= 0) {
            phase = 2;
            stack.push_back({out.children[node][1], 0});
        } else {
            out.postorder.push_back(node);
            stack.pop_back();
        }
    }
    return out;
}

int validate_nice(const NiceTreeDecomposition& ntd, const Graph& g) {
    TreeDecomposition td;
    td.num_vertices = ntd.num_vertices;
    td.bags = ntd.bags;
    for (int v = 0; v < ntd.num_nodes(); ++v)
        for (int c : ntd.children[v])
            if (c >= 0) td.edges.emplace_back(v, c);
    int width = validate(td, g);
    if (!ntd.bags[ntd.root].empty()) throw ValidationError("root bag is not empty");
    for (int v = 0; v < ntd.num_nodes(); ++v) {
        const auto& bag = ntd.bags[v];
        auto [c0, c1] = ntd.children[v];
        switch (ntd.kind[v]) {
            case NodeKind::Leaf:
                if (c0 >= 0 || !bag.empty()) throw ValidationError("bad leaf node");
                break;
            case NodeKind::Forget: {
                if (c0 < 0 || c1 >= 0) throw ValidationError("bad forget node");
                auto cb = ntd.bags[c0];
                auto it = std::find(cb.begin(), cb.end(), ntd.special[v]);
                if (it == cb.end()) throw ValidationError("bad forget node");
                cb.erase(it);
                if (cb != bag) throw ValidationError("bad forget node");
                break;
            }
            case NodeKind::Introduce: {
                if (c0 < 0 || c1 >= 0) throw ValidationError("bad introduce node");
                auto b = bag;
                auto it = std::find(b.begin(), b.end(), ntd.special[v]);
                if (it == b.end()) throw ValidationError("bad introduce node");
                b.erase(it);
                if (b != ntd.bags[c0]) throw ValidationError("bad introduce node");
                break;
            }
            case NodeKind::Join:
                if (c0 < 0 || c1 < 0 || ntd.bags[c0] != bag || ntd.bags[c1] != bag)
                    throw ValidationError("bad join node");
                break;
        }
    }
    return width;
}

std::vector<std::vector<std::uint64_t>> gamma_sets(const NiceTreeDecomposition& ntd) {
    std::vector<std::vector<std::uint64_t>> gamma(ntd.num_nodes(),
                                                  make_bits(std::max(1, ntd.num_vertices)));
    for (int v : ntd.postorder) {
        auto& row = gamma[v];
        for (int c : ntd.children[v])
            if (c >= 0)
                for (size_t w = 0; w < row.size(); ++w) row[w] |= gamma[c][w];
        for (int x : ntd.bags[v]) bit_set(row, x);
    }
    return gamma;
}

TreeDecomposition single_bag_decomposition(const Graph& g) {
    TreeDecomposition td;
    td.num_vertices = g.n;
    std::vector<int> all(g.n);
    std::iota(all.begin(), all.end(), 0);
    td.bags.push_back(all);
    return td;
}

TreeDecomposition inflate_width(const TreeDecomposition& td, const Graph& g) {
    TreeDecomposition out = td;
    if (g.n == 0) return out;
    // Adding one fixed vertex to every bag preserves both properties.
    for (auto& bag : out.bags)
        if (!std::binary_search(bag.begin(), bag.end(), 0))
            bag.insert(bag.begin(), 0);
    return out;
}

}  // namespace smtw
