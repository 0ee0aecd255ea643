#include "smtw/xp.hpp"

#include <algorithm>
#include <chrono>
#include <cstring>
#include <functional>
#include <map>
#include <unordered_map>

#include "smtw/gale_shapley.hpp"

namespace smtw {

namespace {

// Primal-graph vertex ids: men 0..nm-1, women nm..nm+nw-1.
struct AgentView {
    const Instance* inst;
    int nm;

    bool is_man(int a) const { return a < nm; }
    Side side(int a) const { return is_man(a) ? Side::Man : Side::Woman; }
    int local(int a) const { return is_man(a) ? a : a - nm; }
    int global(Side s, int l) const { return s == Side::Man ? l : l + nm; }
    int rank(int a, int partner) const {
        return inst->rank(side(a), local(a), local(partner));
    }
    const std::vector<int>& plist(int a) const { return inst->list(side(a), local(a)); }
};

using Key = std::vector<int>;  // per bag slot: partner vertex id or -1

struct KeyHash {
    size_t operator()(const Key& k) const {
        size_t h = 1469598103934665603ull;
        for (int x : k) {
            h ^= (size_t)(x + 2);
            h *= 1099511628211ull;
        }
        return h;
    }
};

struct Prov {
    std::int8_t kind;  // 0 leaf, 1 forget, 2 introduce, 3 join
    int node;
    int agent = -1, partner = -1;
    int child0 = -1, child1 = -1;
};

// Sesm: per t presence; Bsm: per t min women-sum; Smt: single best size.
struct Cell {
    std::int64_t value = 0;
    int prov = -1;
};
using TMap = std::map<std::int64_t, Cell>;

struct Table {
    std::unordered_map<Key, TMap, KeyHash> rows;
};

struct Engine {
    const Instance& inst;
    const NiceTreeDecomposition& ntd;
    Objective obj;
    const XpOptions& opt;
    AgentView av;
    std::vector<char> in_astar;  // by vertex id; full for Smt objectives
    std::vector<Prov> arena;
    std::vector<Table> tables;
    std::int64_t total_entries = 0;
    std::int64_t states = 0;

    bool smt() const { return obj == Objective::MaxSmt || obj == Objective::MinSmt; }
    bool better(std::int64_t a, std::int64_t b) const {  // payload merge order
        return obj == Objective::MaxSmt ? a > b : a < b;
    }

    int add_prov(Prov p) {
        if (!opt.want_witness && !opt.trace) return -1;
        arena.push_back(p);
        return (int)arena.size() - 1;
    }

    void bump(std::int64_t added) {
        total_entries += added;
        if (total_entries > opt.max_table_entries)
            throw GuardExceeded("xp table size guard exceeded");
    }

    // Merge one (t, cell) into a row, by objective semantics.
    void merge(TMap& row, std::int64_t t, std::int64_t value, int prov) {
        auto it = row.find(t);
        if (it == row.end()) {
            row.emplace(t, Cell{value, prov});
            bump(1);
        } else if (!smt() && obj == Objective::Bsm && value < it->second.value) {
            it->second = Cell{value, prov};
        } else if (smt() && better(value, it->second.value)) {
            it->second = Cell{value, prov};
        }
    }

    void run() {
        tables.resize(ntd.num_nodes());
        for (int v : ntd.postorder) {
            switch (ntd.kind[v]) {
                case NodeKind::Leaf: do_leaf(v); break;
                case NodeKind::Forget: do_forget(v); break;
                case NodeKind::Introduce: do_introduce(v); break;
                case NodeKind::Join: do_join(v); break;
            }
            states += (std::int64_t)tables[v].rows.size();
            for (int c : ntd.children[v])
                if (c >= 0) tables[c].rows.clear();
        }
    }

    void do_leaf(int v) {
        TMap row;
        row.emplace(0, Cell{0, add_prov({0, v})});
        bump(1);
        tables[v].rows.emplace(Key{}, std::move(row));
    }

    void do_forget(int v) {
        int u = ntd.children[v][0];
        int x = ntd.special[v];
        const auto& cbag = ntd.bags[u];
        int slot = (int)(std::lower_bound(cbag.begin(), cbag.end(), x) - cbag.begin());
        auto& out = tables[v].rows;
        for (auto& [key, row] : tables[u].rows) {
            Key k = key;
            k.erase(k.begin() + slot);
            auto& orow = out[k];
            for (auto& [t, cell] : row)
                merge(orow, t, cell.value,
                      add_prov({1, v, -1, -1, cell.prov}));
        }
    }

    void do_introduce(int v) {
        int u = ntd.children[v][0];
        int x = ntd.special[v];
        const auto& bag = ntd.bags[v];
        const auto& cbag = ntd.bags[u];
        int slot = (int)(std::lower_bound(bag.begin(), bag.end(), x) - bag.begin());
        auto& out = tables[v].rows;

        for (auto& [ckey, row] : tables[u].rows) {
            // Partners forced by bag agents already assigned to x.
            int forced = -1;
            bool inconsistent = false;
            for (size_t i = 0; i < ckey.size(); ++i)
                if (ckey[i] == x) {
                    if (forced >= 0) inconsistent = true;
                    forced = cbag[i];
                }
            if (inconsistent) continue;

            std::vector<int> choices;
            if (forced >= 0) {
                choices.push_back(forced);
            } else {
                if (smt() || !in_astar[x]) choices.push_back(-1);
                if (!smt() && !in_astar[x]) {
                    // never matched
                } else {
                    for (int lp : av.plist(x)) {
                        int p = av.global(opposite(av.side(x)), lp);
                        if (!smt() && !in_astar[p]) continue;
                        // p inside the child bag but not pointing at x is
                        // inconsistent; pointing at x was handled as forced.
                        if (std::binary_search(cbag.begin(), cbag.end(), p)) continue;
                        bool used = false;
                        for (int val : ckey)
                            if (val == p) {
                                used = true;
                                break;
                            }
                        if (!used) choices.push_back(p);
                    }
                }
            }

            for (int p : choices) {
                if (blocked(bag, ckey, slot, x, p)) continue;
                Key k = ckey;
                k.insert(k.begin() + slot, p);
                auto& orow = out[k];
                std::int64_t dt = 0, dv = 0;
                if (p >= 0) {
                    bool man = av.is_man(x);
                    std::int64_t rx = av.rank(x, p), rp = av.rank(p, x);
                    switch (obj) {
                        case Objective::Sesm:
                            if (man) dt = rx - rp;
                            break;
                        case Objective::Bsm:
                            if (man)
                                dt = rx;
                            else
                                dv = rx;
                            break;
                        case Objective::MaxSmt:
                        case Objective::MinSmt:
                            if (man) dv = 1;
                            break;
                        default: break;
                    }
                }
                for (auto& [t, cell] : row)
                    merge(orow, t + dt, cell.value + dv,
                          add_prov({2, v, x, p, cell.prov}));
            }
        }
    }

    // Does introducing x with partner p (or unmatched) create a pair inside
    // the bag where both sides strictly prefer each other?
    bool blocked(const std::vector<int>& bag, const Key& ckey, int slot, int x, int p) {
        for (size_t i = 0; i < bag.size(); ++i) {
            if ((int)i == slot) continue;
            int b = bag[i];
            if (av.is_man(b) == av.is_man(x)) continue;
            int rxb = av.rank(x, b);
            if (rxb == 0) continue;
            int bq = ckey[i < (size_t)slot ? i : i - 1];
            bool x_prefers = p < 0 || rxb < av.rank(x, p);
            bool b_prefers = bq < 0 || av.rank(b, x) < av.rank(b, bq);
            if (x_prefers && b_prefers) return true;
        }
        return false;
    }

    void do_join(int v) {
        int u = ntd.children[v][0], s = ntd.children[v][1];
        const auto& bag = ntd.bags[v];
        auto& out = tables[v].rows;
        for (auto& [key, urow] : tables[u].rows) {
            auto it = tables[s].rows.find(key);
            if (it == tables[s].rows.end()) continue;
            auto& srow = it->second;
            // Bag contributions counted in both children.
            std::int64_t men_t = 0, men_v = 0;
            for (size_t i = 0; i < bag.size(); ++i) {
                int a = bag[i];
                int p = key[i];
                if (p < 0 || !av.is_man(a)) continue;
                std::int64_t ra = av.rank(a, p), rp = av.rank(p, a);
                switch (obj) {
                    case Objective::Sesm: men_t += ra - rp; break;
                    case Objective::Bsm: men_t += ra; break;
                    case Objective::MaxSmt:
                    case Objective::MinSmt: men_v += 1; break;
                    default: break;
                }
            }
            std::int64_t women_v = 0;
            if (obj == Objective::Bsm)
                for (size_t i = 0; i < bag.size(); ++i)
                    if (key[i] >= 0 && !av.is_man(bag[i]))
                        women_v += av.rank(bag[i], key[i]);
            auto& orow = out[key];
            for (auto& [tu, cu] : urow)
                for (auto& [ts, cs] : srow) {
                    std::int64_t t = tu + ts - men_t;
                    std::int64_t val = cu.value + cs.value -
                                       (obj == Objective::Bsm ? women_v : men_v);
                    merge(orow, t, val, add_prov({3, v, -1, -1, cu.prov, cs.prov}));
                }
        }
    }

    // Collects introduce records below `prov`; returns (agent, partner) list.
    std::vector<std::pair<int, int>> walk(int prov) {
        std::map<int, int> assign;
        std::vector<std::pair<int, std::map<int, int>*>> order;  // prov, subtree map
        std::function<std::map<int, int>(int)> rec = [&](int pv) -> std::map<int, int> {
            const Prov& p = arena[pv];
            std::map<int, int> got;
            if (p.child0 >= 0) got = rec(p.child0);
            if (p.child1 >= 0) {
                auto other = rec(p.child1);
                for (auto [a, q] : other) {
                    auto it = got.find(a);
                    if (it != got.end() && it->second != q)
                        throw ValidationError("witness reconstruction mismatch");
                    got[a] = q;
                }
            }
            if (p.kind == 2) {
                auto it = got.find(p.agent);
                if (it != got.end() && it->second != p.partner)
                    throw ValidationError("witness reconstruction mismatch");
                got[p.agent] = p.partner;
            }
            if (opt.trace) {
                XpWitnessVisit visit;
                visit.node = p.node;
                visit.assignments.assign(got.begin(), got.end());
                opt.trace->push_back(std::move(visit));
            }
            return got;
        };
        assign = rec(prov);
        std::vector<std::pair<int, int>> pairs;
        for (auto [a, q] : assign)
            if (q >= 0 && av.is_man(a)) pairs.emplace_back(a, q - av.nm);
        return pairs;
    }
};

}  // namespace

SolveReport xp_solve(const Instance& inst, const NiceTreeDecomposition& ntd,
                     Objective objective, const XpOptions& opt) {
    auto t0 = std::chrono::steady_clock::now();
    bool smtobj = objective == Objective::MaxSmt || objective == Objective::MinSmt;
    if (!smtobj && inst.has_ties())
        throw ValidationError(objective_name(objective) + " requires strict preferences");
    Graph pg = primal_graph(inst);
    if (ntd.num_vertices != pg.n)
        throw ValidationError("decomposition does not cover the primal graph");
    validate_nice(ntd, pg);

    Engine eng{inst, ntd, objective, opt, AgentView{&inst, inst.num_men()}, {}, {}, {}};
    eng.in_astar.assign(inst.total_agents(), 1);
    if (!smtobj) {
        auto ex = lattice_extremes(inst);
        for (int m = 0; m < inst.num_men(); ++m) eng.in_astar[m] = ex.matched_men[m];
        for (int w = 0; w < inst.num_women(); ++w)
            eng.in_astar[inst.num_men() + w] = ex.matched_women[w];
    }
    eng.run();

    const TMap& root = eng.tables[ntd.root].rows.at(Key{});
    SolveReport rep;
    rep.objective = objective_name(objective);
    rep.method = "xp";
    int chosen_prov = -1;
    switch (objective) {
        case Objective::Sesm: {
            bool have = false;
            for (auto& [t, cell] : root) {
                if (!have || std::abs(t) < rep.optimum) {
                    rep.optimum = std::abs(t);
                    chosen_prov = cell.prov;
                    have = true;
                }
            }
            if (!have) throw ValidationError("internal: empty root table");
            break;
        }
        case Objective::Bsm: {
            bool have = false;
            for (auto& [t, cell] : root) {
                std::int64_t bal = std::max(t, cell.value);
                if (!have || bal < rep.optimum) {
                    rep.optimum = bal;
                    chosen_prov = cell.prov;
                    have = true;
                }
            }
            if (!have) throw ValidationError("internal: empty root table");
            break;
        }
        case Objective::MaxSmt:
        case Objective::MinSmt: {
            rep.optimum = root.at(0).value;
            chosen_prov = root.at(0).prov;
            break;
        }
        default:
            throw ValidationError("xp_solve does not handle gsm");
    }
    if ((opt.want_witness || opt.trace) && chosen_prov >= 0) {
        auto pairs = eng.walk(chosen_prov);
        rep.witness = Matching::from_pairs(inst, pairs);
    }
    rep.stats.states = eng.states;
    rep.stats.set_entries = eng.total_entries;
    rep.stats.nodes = ntd.num_nodes();
    rep.stats.width = ntd.width();
    std::int64_t n2 = (std::int64_t)inst.total_agents() * inst.total_agents();
    rep.stats.dense_cells = eng.states * (smtobj ? 1 : (2 * n2 + 1));
    rep.stats.wall_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
            .count();
    return rep;
}

SolveReport xp_solve_sesm(const Instance& inst, const NiceTreeDecomposition& ntd,
                          const XpOptions& opt) {
    return xp_solve(inst, ntd, Objective::Sesm, opt);
}
SolveReport xp_solve_bsm(const Instance& inst, const NiceTreeDecomposition& ntd,
                         const XpOptions& opt) {
    return xp_solve(inst, ntd, Objective::Bsm, opt);
}
SolveReport xp_solve_max_smt(const Instance& inst, const NiceTreeDecomposition& ntd,
                             const XpOptions& opt) {
    return xp_solve(inst, ntd, Objective::MaxSmt, opt);
}
SolveReport xp_solve_min_smt(const Instance& inst, const NiceTreeDecomposition& ntd,
                             const XpOptions& opt) {
    return xp_solve(inst, ntd, Objective::MinSmt, opt);
}

}  // namespace smtw
