#include "smtw/rotations.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <set>
#include <sstream>

#include "smtw/gale_shapley.hpp"

namespace smtw {

namespace {

// First woman after mu(m) in m's list who is unmatched or prefers m.
int successor_woman(const Instance& inst, const Matching& mu, int m) {
    const auto& lst = inst.list(Side::Man, m);
    int cur = inst.rank(Side::Man, m, mu.wife(m));
    for (size_t i = 0; i < lst.size(); ++i) {
        int w = lst[i];
        if (inst.list_ranks(Side::Man, m)[i] <= cur) continue;
        int h = mu.husband(w);
        if (h < 0) return w;
        if (inst.rank(Side::Woman, w, m) < inst.rank(Side::Woman, w, h)) return w;
    }
    return -1;
}

// Extracts one exposed rotation of mu, deterministically the cycle reachable
// from the smallest man id; returns an empty cycle if none is exposed.
std::vector<std::pair<int, int>> find_exposed(const Instance& inst, const Matching& mu) {
    int nm = inst.num_men();
    std::vector<int> succ(nm, -1), state(nm, 0);  // 0 white, 1 on path, 2 done
    for (int m = 0; m < nm; ++m) {
        if (!mu.man_matched(m)) continue;
        int w = successor_woman(inst, mu, m);
        if (w >= 0 && mu.woman_matched(w)) succ[m] = mu.husband(w);
    }
    for (int start = 0; start < nm; ++start) {
        if (state[start] != 0 || succ[start] < 0) continue;
        std::vector<int> path;
        int m = start;
        while (m >= 0 && state[m] == 0) {
            state[m] = 1;
            path.push_back(m);
            m = succ[m];
        }
        if (m >= 0 && state[m] == 1) {
            auto it = std::find(path.begin(), path.end(), m);
            std::vector<int> cycle_men(it, path.end());
            // Canonical form: start at smallest man.
            auto mn = std::min_element(cycle_men.begin(), cycle_men.end());
            std::rotate(cycle_men.begin(), mn, cycle_men.end());
            std::vector<std::pair<int, int>> cycle;
            for (int cm : cycle_men) cycle.emplace_back(cm, mu.wife(cm));
            return cycle;
        }
        for (int p : path) state[p] = 2;
    }
    return {};
}

void apply_rotation(const Instance& inst, Matching& mu,
                    const std::vector<std::pair<int, int>>& cycle) {
    int r = (int)cycle.size();
    for (auto [m, w] : cycle)
        if (mu.wife(m) != w)
            throw ValidationError("rotation is not applicable to the current matching");
    for (auto [m, w] : cycle) mu.unmatch(m, w);
    for (int i = 0; i < r; ++i) mu.match(cycle[i].first, cycle[(i + 1) % r].second);
    (void)inst;
}

}  // namespace

void RotationStructure::rebuild_reachability() {
    int nr = num_rotations();
    int words = (nr + 63) / 64;
    reach_.assign(nr, std::vector<std::uint64_t>(words, 0));
    // Reverse topological order so successors are complete first.
    std::vector<int> indeg(nr, 0), topo;
    for (int a = 0; a < nr; ++a)
        for (int b : arcs[a]) ++indeg[b];
    std::deque<int> q;
    for (int a = 0; a < nr; ++a)
        if (indeg[a] == 0) q.push_back(a);
    while (!q.empty()) {
        int a = q.front();
        q.pop_front();
        topo.push_back(a);
        for (int b : arcs[a])
            if (--indeg[b] == 0) q.push_back(b);
    }
    if ((int)topo.size() != nr) throw ValidationError("rotation digraph has a cycle");
    for (auto it = topo.rbegin(); it != topo.rend(); ++it) {
        int a = *it;
        reach_[a][a >> 6] |= 1ull << (a & 63);
        for (int b : arcs[a])
            for (int wd = 0; wd < words; ++wd) reach_[a][wd] |= reach_[b][wd];
    }
}

RotationStructure build_rotation_structure(const Instance& inst) {
    if (inst.has_ties())
        throw ValidationError("rotation structure requires strict preferences");
    RotationStructure rs;
    auto ex = lattice_extremes(inst);
    rs.man_opt = ex.man_optimal;
    rs.woman_opt = ex.woman_optimal;
    rs.matched_men = ex.matched_men;
    rs.matched_women = ex.matched_women;
    rs.per_man.resize(inst.num_men());
    rs.per_man_path.resize(inst.num_men());

    // Discover all rotations along one maximal elimination sequence, and
    // record which rotation eliminates each (man, woman) pair: the moment a
    // woman's partner becomes strictly better than some listed man.
    std::map<std::pair<int, int>, int> pair_eliminator;
    Matching mu = rs.man_opt;
    while (true) {
        auto cycle = find_exposed(inst, mu);
        if (cycle.empty()) break;
        int id = (int)rs.rotations.size();
        rs.rotations.push_back({id, cycle});
        int r = (int)cycle.size();
        for (int i = 0; i < r; ++i) {
            auto [m, w] = cycle[i];
            rs.per_man[m].push_back(id);
            // w receives the preceding man in the cycle.
            int new_man = cycle[(i - 1 + r) % r].first;
            int lo = inst.rank(Side::Woman, w, new_man);
            int hi = inst.rank(Side::Woman, w, m);
            const auto& wl = inst.list(Side::Woman, w);
            const auto& wr = inst.list_ranks(Side::Woman, w);
            for (size_t j = 0; j < wl.size(); ++j)
                if (wr[j] > lo && wr[j] < hi)
                    pair_eliminator.emplace(std::make_pair(wl[j], w), id);
        }
        apply_rotation(inst, mu, cycle);
        if ((std::int64_t)rs.rotations.size() >
            (std::int64_t)inst.total_agents() * inst.total_agents())
            throw ValidationError("rotation count exceeds n^2");
    }
    if (!(mu == rs.woman_opt))
        throw ValidationError("rotation elimination did not reach the woman-optimal matching");

    int nr = rs.num_rotations();
    std::vector<std::set<int>> arc_set(nr);
    // Rule 1: consecutive rotations moving the same man.
    for (int m = 0; m < inst.num_men(); ++m)
        for (size_t i = 1; i < rs.per_man[m].size(); ++i)
            arc_set[rs.per_man[m][i - 1]].insert(rs.per_man[m][i]);
    // Rule 2: if rho' moves m strictly below w, the rotation eliminating
    // (m, w) must come first.
    for (const auto& rot : rs.rotations) {
        int r = (int)rot.cycle.size();
        for (int i = 0; i < r; ++i) {
            int m = rot.cycle[i].first;
            int lo = inst.rank(Side::Man, m, rot.cycle[i].second);
            int hi = inst.rank(Side::Man, m, rot.cycle[(i + 1) % r].second);
            const auto& ml = inst.list(Side::Man, m);
            const auto& mr = inst.list_ranks(Side::Man, m);
            for (size_t j = 0; j < ml.size(); ++j) {
                if (mr[j] <= lo || mr[j] >= hi) continue;
                auto it = pair_eliminator.find({m, ml[j]});
                if (it == pair_eliminator.end()) {
                    // Already dead at the man-optimal matching: the woman
                    // starts out with a partner she prefers to m.
                    int h0 = rs.man_opt.husband(ml[j]);
                    if (h0 < 0 || inst.rank(Side::Woman, ml[j], h0) >
                                      inst.rank(Side::Woman, ml[j], m))
                        throw ValidationError(
                            "internal: skipped pair was never eliminated");
                    continue;
                }
                if (it->second != rot.id) arc_set[it->second].insert(rot.id);
            }
        }
    }

    rs.arcs.assign(nr, {});
    for (int a = 0; a < nr; ++a) rs.arcs[a].assign(arc_set[a].begin(), arc_set[a].end());
    rs.rebuild_reachability();

    // Transitive reduction: drop any arc implied through another successor.
    for (int a = 0; a < nr; ++a) {
        std::vector<int> keep;
        for (int b : rs.arcs[a]) {
            bool redundant = false;
            for (int c : rs.arcs[a])
                if (c != b && rs.reaches(c, b)) {
                    redundant = true;
                    break;
                }
            if (!redundant) keep.push_back(b);
        }
        rs.arcs[a] = std::move(keep);
    }
    rs.rev_arcs.assign(nr, {});
    for (int a = 0; a < nr; ++a)
        for (int b : rs.arcs[a]) rs.rev_arcs[b].push_back(a);
    rs.rebuild_reachability();

    // P(m): BFS segments between consecutive R(m) vertices, exploring
    // successors in ascending id for reproducibility.
    for (int m = 0; m < inst.num_men(); ++m) {
        const auto& seq = rs.per_man[m];
        if (seq.empty()) continue;
        auto& path = rs.per_man_path[m];
        path.push_back(seq[0]);
        for (size_t i = 1; i < seq.size(); ++i) {
            int src = seq[i - 1], dst = seq[i];
            std::vector<int> parent(nr, -1);
            std::deque<int> q{src};
            parent[src] = src;
            while (!q.empty() && parent[dst] == -1) {
                int x = q.front();
                q.pop_front();
                for (int y : rs.arcs[x])
                    if (parent[y] == -1) {
                        parent[y] = x;
                        q.push_back(y);
                    }
            }
            if (parent[dst] == -1)
                throw ValidationError("internal: no path between consecutive rotations of a man");
            std::vector<int> seg;
            for (int x = dst; x != src; x = parent[x]) seg.push_back(x);
            for (auto it = seg.rbegin(); it != seg.rend(); ++it) path.push_back(*it);
        }
    }
    return rs;
}

std::vector<int> closure(const RotationStructure& rs, const std::vector<int>& subset) {
    int nr = rs.num_rotations();
    std::vector<char> in(nr, 0);
    std::deque<int> q;
    for (int x : subset) {
        if (x < 0 || x >= nr) throw ValidationError("unknown rotation id");
        if (!in[x]) {
            in[x] = 1;
            q.push_back(x);
        }
    }
    while (!q.empty()) {
        int x = q.front();
        q.pop_front();
        for (int p : rs.rev_arcs[x])
            if (!in[p]) {
                in[p] = 1;
                q.push_back(p);
            }
    }
    std::vector<int> out;
    for (int x = 0; x < nr; ++x)
        if (in[x]) out.push_back(x);
    return out;
}

bool is_closed(const RotationStructure& rs, const std::vector<int>& set) {
    std::vector<char> in(rs.num_rotations(), 0);
    for (int x : set) in[x] = 1;
    for (int x : set)
        for (int p : rs.rev_arcs[x])
            if (!in[p]) return false;
    return true;
}

Matching eliminate_in_order(const RotationStructure& rs, const Instance& inst,
                            const std::vector<int>& order) {
    Matching mu = rs.man_opt;
    for (int id : order) apply_rotation(inst, mu, rs.rotations[id].cycle);
    return mu;
}

Matching eliminate(const RotationStructure& rs, const Instance& inst,
                   const std::vector<int>& closed) {
    if (!is_closed(rs, closed))
        throw ValidationError("rotation set is not closed");
    // Any topological order of the closed set is precedence-compatible.
    std::vector<int> order;
    std::vector<char> in(rs.num_rotations(), 0);
    for (int x : closed) in[x] = 1;
    std::vector<int> indeg(rs.num_rotations(), 0);
    for (int x : closed)
        for (int y : rs.arcs[x])
            if (in[y]) ++indeg[y];
    std::deque<int> q;
    for (int x : closed)
        if (indeg[x] == 0) q.push_back(x);
    while (!q.empty()) {
        int x = q.front();
        q.pop_front();
        order.push_back(x);
        for (int y : rs.arcs[x])
            if (in[y] && --indeg[y] == 0) q.push_back(y);
    }
    return eliminate_in_order(rs, inst, order);
}

const std::vector<int>& man_path(const RotationStructure& rs, int man) {
    if (man < 0 || man >= (int)rs.per_man_path.size())
        throw ValidationError("unknown man");
    return rs.per_man_path[man];
}

Graph rotation_graph(const RotationStructure& rs) {
    Graph g = Graph::empty(rs.num_rotations());
    for (int a = 0; a < rs.num_rotations(); ++a)
        for (int b : rs.arcs[a]) g.add_edge(a, b);
    return g;
}

std::string rotation_dot(const RotationStructure& rs) {
    std::ostringstream os;
    os << "digraph rotations {\n";
    for (const auto& rot : rs.rotations) {
        os << "  r" << rot.id << " [label=\"r" << rot.id << ":";
        for (auto [m, w] : rot.cycle) os << " (m" << m + 1 << ",w" << w + 1 << ")";
        os << "\"];\n";
    }
    for (int a = 0; a < rs.num_rotations(); ++a)
        for (int b : rs.arcs[a]) os << "  r" << a << " -> r" << b << ";\n";
    os << "}\n";
    return os.str();
}

}  // namespace smtw
