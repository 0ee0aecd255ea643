#include "smtw/fpt.hpp"

#include <algorithm>
#include <chrono>
#include <functional>
#include <unordered_map>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace smtw {

namespace {

using Bits = std::vector<std::uint64_t>;

struct BitsHash {
    size_t operator()(const Bits& b) const {
        size_t h = 1469598103934665603ull;
        for (auto w : b) {
            h ^= (size_t)w;
            h *= 1099511628211ull;
        }
        return h;
    }
};

// satisfaction sums and per-man partners of mu_{cl(set)}.
struct EliminationInfo {
    Matching mu;
    std::int64_t sat_m = 0;
    std::int64_t sat_w = 0;
};

enum class FptTable { N, S, B };

struct Prov {
    std::int8_t kind;   // 0 leaf, 1 forget, 2 introduce, 3 join
    std::int8_t taken;  // forget: rotation kept in R(mu)
    int rotation = -1;  // forget
    int child0 = -1, child1 = -1;
};

struct Cell {
    std::int64_t value = 0;  // B: stored minimum t_W
    int prov = -1;
};

// N: key packs (t_M, t_W); S: key = d; B: key = b.
using Row = std::map<std::pair<std::int64_t, std::int64_t>, Cell>;

struct Engine {
    const Instance& inst;
    const RotationStructure& rs;
    const NiceTreeDecomposition& ntd;
    FptTable table;
    const FptOptions& opt;

    std::vector<std::vector<std::uint64_t>> gamma;
    std::unordered_map<Bits, EliminationInfo, BitsHash> elim_memo;
    std::vector<Prov> arena;
    std::vector<std::vector<Row>> rows;  // per node, per mask
    std::int64_t states = 0, entries = 0;

    int nr() const { return rs.num_rotations(); }

    Bits closure_bits(const std::vector<int>& ids) const {
        Bits b((nr() + 63) / 64 + (nr() == 0), 0);
        for (int r = 0; r < nr(); ++r)
            for (int x : ids)
                if (rs.reaches(r, x)) {
                    b[r >> 6] |= 1ull << (r & 63);
                    break;
                }
        return b;
    }

    const EliminationInfo& elim(const std::vector<int>& ids) {
        Bits key = closure_bits(ids);
        auto it = elim_memo.find(key);
        if (it != elim_memo.end()) return it->second;
        std::vector<int> closed;
        for (int r = 0; r < nr(); ++r)
            if ((key[r >> 6] >> (r & 63)) & 1) closed.push_back(r);
        EliminationInfo info;
        info.mu = eliminate(rs, inst, closed);
        Scores sc = score(inst, info.mu);
        info.sat_m = sc.sat_m;
        info.sat_w = sc.sat_w;
        return elim_memo.emplace(std::move(key), std::move(info)).first->second;
    }

    std::vector<int> mask_ids(int node, unsigned mask) const {
        std::vector<int> ids;
        const auto& bag = ntd.bags[node];
        for (size_t i = 0; i < bag.size(); ++i)
            if (mask & (1u << i)) ids.push_back(bag[i]);
        return ids;
    }

    // Last vertex of P(m) inside `set` (indicator over rotations), or -1.
    int last_on_path(int m, const std::vector<char>& set) const {
        int out = -1;
        for (int r : rs.per_man_path[m])
            if (set[r]) out = r;
        return out;
    }

    struct StateInfo {
        bool valid = false;
        std::int64_t sat_m = 0, sat_w = 0;     // of mu_{R'}
        std::int64_t diff_a = 0, diff_l = 0;   // introduce with rho in R'
    };

    // Serial precomputation of everything transition formulas need.
    std::vector<StateInfo> precompute(int v) {
        const auto& bag = ntd.bags[v];
        int bs = (int)bag.size();
        std::vector<StateInfo> info(1u << bs);

        // Ancestors of each bag rotation inside the bag.
        std::vector<unsigned> anc(bs, 0);
        for (int i = 0; i < bs; ++i)
            for (int j = 0; j < bs; ++j)
                if (j != i && rs.precedes(bag[j], bag[i])) anc[i] |= 1u << j;

        bool intro = ntd.kind[v] == NodeKind::Introduce;
        int rho = intro ? ntd.special[v] : -1;
        int rho_slot = -1;
        std::vector<int> cand;           // C_rho: men whose rho_m lies outside gamma(u)
        std::vector<int> cand_rho_m;     // parallel rho_m
        if (intro) {
            rho_slot = (int)(std::lower_bound(bag.begin(), bag.end(), rho) - bag.begin());
            std::vector<char> cl_rho(nr(), 0);
            for (int r = 0; r < nr(); ++r) cl_rho[r] = rs.reaches(r, rho);
            int u = ntd.children[v][0];
            for (int m = 0; m < inst.num_men(); ++m) {
                if (!rs.matched_men[m] || rs.per_man_path[m].empty()) continue;
                int rm = last_on_path(m, cl_rho);
                if (rm < 0 || bitset_test(gamma[u], rm)) continue;
                cand.push_back(m);
                cand_rho_m.push_back(rm);
            }
        }

        std::vector<char> in_mask(nr(), 0);
        for (unsigned mask = 0; mask < (1u << bs); ++mask) {
            StateInfo& st = info[mask];
            bool valid = true;
            for (int i = 0; i < bs && valid; ++i)
                if ((mask >> i) & 1)
                    if ((anc[i] & ~mask) != 0) valid = false;
            st.valid = valid;
            if (!valid) continue;
            auto ids = mask_ids(v, mask);
            const auto& cur = elim(ids);
            st.sat_m = cur.sat_m;
            st.sat_w = cur.sat_w;
            if (intro && ((mask >> rho_slot) & 1)) {
                std::vector<int> ids_wo;
                for (int x : ids)
                    if (x != rho) ids_wo.push_back(x);
                // elim() may rehash; copy what we need first.
                Matching mu_with = cur.mu;
                const auto& prev = elim(ids_wo);
                for (int x : ids) in_mask[x] = 1;
                for (size_t c = 0; c < cand.size(); ++c) {
                    int m = cand[c];
                    // ell in cl(rho_m) or nil
                    int ell = -1;
                    for (int r : rs.per_man_path[m])
                        if (in_mask[r]) ell = r;
                    if (ell >= 0 && !rs.reaches(ell, cand_rho_m[c])) continue;
                    int w_new = mu_with.wife(m), w_old = prev.mu.wife(m);
                    st.diff_a += inst.rank(Side::Man, m, w_new) -
                                 inst.rank(Side::Man, m, w_old);
                    st.diff_l += inst.rank(Side::Woman, w_new, m) -
                                 inst.rank(Side::Woman, w_old, m);
                }
                for (int x : ids) in_mask[x] = 0;
            }
        }
        return info;
    }

    int add_prov(std::vector<Prov>& local, Prov p) {
        if (!opt.want_witness) return -1;
        local.push_back(p);
        return -(int)local.size();  // rebased after the node's loop
    }

    void merge(Row& row, std::pair<std::int64_t, std::int64_t> key, std::int64_t value,
               int prov) {
        auto it = row.find(key);
        if (it == row.end())
            row.emplace(key, Cell{value, prov});
        else if (table == FptTable::B && value < it->second.value)
            it->second = Cell{value, prov};
    }

    Row compute_row(int v, unsigned mask, const std::vector<StateInfo>& info,
                    std::vector<Prov>& local) {
        Row row;
        if (!info[mask].valid) return row;
        switch (ntd.kind[v]) {
            case NodeKind::Leaf: {
                const auto& base = info[mask];
                std::pair<std::int64_t, std::int64_t> key{0, 0};
                std::int64_t value = 0;
                if (table == FptTable::N)
                    key = {base.sat_m, base.sat_w};
                else if (table == FptTable::S)
                    key = {base.sat_m - base.sat_w, 0};
                else {
                    key = {base.sat_m, 0};
                    value = base.sat_w;
                }
                merge(row, key, value, add_prov(local, {0, 0}));
                break;
            }
            case NodeKind::Forget: {
                int u = ntd.children[v][0];
                int x = ntd.special[v];
                const auto& cbag = ntd.bags[u];
                int slot =
                    (int)(std::lower_bound(cbag.begin(), cbag.end(), x) - cbag.begin());
                unsigned low = mask & ((1u << slot) - 1);
                unsigned high = (mask >> slot) << (slot + 1);
                for (int take = 0; take <= 1; ++take) {
                    unsigned cmask = low | high | (take ? (1u << slot) : 0);
                    for (const auto& [key, cell] : rows[u][cmask])
                        merge(row, key, cell.value,
                              add_prov(local, {1, (std::int8_t)take, x, cell.prov}));
                }
                break;
            }
            case NodeKind::Introduce: {
                int u = ntd.children[v][0];
                int x = ntd.special[v];
                const auto& bag = ntd.bags[v];
                int slot =
                    (int)(std::lower_bound(bag.begin(), bag.end(), x) - bag.begin());
                unsigned low = mask & ((1u << slot) - 1);
                unsigned high = (mask >> (slot + 1)) << slot;
                unsigned cmask = low | high;
                bool has_rho = (mask >> slot) & 1;
                std::int64_t da = has_rho ? info[mask].diff_a : 0;
                std::int64_t dl = has_rho ? info[mask].diff_l : 0;
                for (const auto& [key, cell] : rows[u][cmask]) {
                    std::pair<std::int64_t, std::int64_t> nk = key;
                    std::int64_t nv = cell.value;
                    if (table == FptTable::N) {
                        nk.first += da;
                        nk.second += dl;
                    } else if (table == FptTable::S) {
                        nk.first += da - dl;
                    } else {
                        nk.first += da;
                        nv += dl;
                    }
                    merge(row, nk, nv, add_prov(local, {2, 0, -1, cell.prov}));
                }
                break;
            }
            case NodeKind::Join: {
                int u = ntd.children[v][0], s = ntd.children[v][1];
                const auto& base = info[mask];
                for (const auto& [ku, cu] : rows[u][mask])
                    for (const auto& [ks, cs] : rows[s][mask]) {
                        std::pair<std::int64_t, std::int64_t> nk{0, 0};
                        std::int64_t nv = 0;
                        if (table == FptTable::N)
                            nk = {ku.first + ks.first - base.sat_m,
                                  ku.second + ks.second - base.sat_w};
                        else if (table == FptTable::S)
                            nk = {ku.first + ks.first - (base.sat_m - base.sat_w), 0};
                        else {
                            nk = {ku.first + ks.first - base.sat_m, 0};
                            nv = cu.value + cs.value - base.sat_w;
                        }
                        merge(row, nk, nv,
                              add_prov(local, {3, 0, -1, cu.prov, cs.prov}));
                    }
                break;
            }
        }
        return row;
    }

    void run() {
        gamma = gamma_sets(ntd);
        rows.resize(ntd.num_nodes());
        for (int v : ntd.postorder) {
            int bs = (int)ntd.bags[v].size();
            if (bs > 25) throw GuardExceeded("fpt: bag too large");
            auto info = precompute(v);
            auto& out = rows[v];
            out.resize(1u << bs);
            std::vector<std::vector<Prov>> locals(1u << bs);
            // Team startup swamps small nodes; only fan out on wide bags.
            bool fan_out = opt.parallel && bs >= 6;
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) if (fan_out)
#endif
            for (int mask = 0; mask < (int)(1u << bs); ++mask)
                out[mask] = compute_row(v, (unsigned)mask, info, locals[mask]);
            (void)fan_out;
            // Rebase this node's provenance records.
            for (int mask = 0; mask < (int)(1u << bs); ++mask) {
                int base = (int)arena.size();
                arena.insert(arena.end(), locals[mask].begin(), locals[mask].end());
                for (auto& [key, cell] : out[mask])
                    if (cell.prov < 0) cell.prov = base - cell.prov - 1;
            }
            states += 1u << bs;
            for (const auto& r : out) entries += (std::int64_t)r.size();
            if (entries > opt.max_table_entries)
                throw GuardExceeded("fpt table size guard exceeded");
            if (opt.debug && table == FptTable::N) {
                if ((int)opt.debug->n_tables.size() < ntd.num_nodes()) {
                    opt.debug->n_tables.resize(ntd.num_nodes());
                    opt.debug->state_valid.resize(ntd.num_nodes());
                }
                auto& dt = opt.debug->n_tables[v];
                auto& dv = opt.debug->state_valid[v];
                dt.resize(1u << bs);
                dv.resize(1u << bs);
                for (int mask = 0; mask < (int)(1u << bs); ++mask) {
                    dv[mask] = info[mask].valid;
                    for (const auto& [key, cell] : out[mask]) dt[mask].push_back(key);
                }
            }
            if (!opt.debug)
                for (int c : ntd.children[v])
                    if (c >= 0) rows[c].clear();
        }
    }

    std::vector<int> witness_rotations(int prov) const {
        std::vector<int> out;
        std::vector<int> stack{prov};
        while (!stack.empty()) {
            int p = stack.back();
            stack.pop_back();
            if (p < 0) continue;
            const Prov& pr = arena[p];
            if (pr.kind == 1 && pr.taken) out.push_back(pr.rotation);
            stack.push_back(pr.child0);
            if (pr.kind == 3) stack.push_back(pr.child1);
        }
        return out;
    }
};

SolveReport run_solver(const Instance& inst, const RotationStructure& rs,
                       const NiceTreeDecomposition& ntd, FptTable table,
                       Objective objective, const FptOptions& opt) {
    auto t0 = std::chrono::steady_clock::now();
    if (inst.has_ties())
        throw ValidationError("rotation-digraph solvers require strict preferences");
    Graph gpi = rotation_graph(rs);
    if (ntd.num_vertices != gpi.n)
        throw ValidationError("decomposition does not cover the rotation digraph");
    validate_nice(ntd, gpi);

    Engine eng{inst, rs, ntd, table, opt};
    eng.run();

    const Row& root = eng.rows[ntd.root][0];
    SolveReport rep;
    rep.objective = objective_name(objective);
    rep.method = "fpt";
    int chosen = -1;
    if (objective == Objective::Gsm) {
        for (const auto& [key, cell] : root) rep.pair_set.push_back(key);
    } else if (objective == Objective::Sesm) {
        bool have = false;
        for (const auto& [key, cell] : root) {
            std::int64_t d = table == FptTable::S ? key.first : key.first - key.second;
            if (!have || std::abs(d) < rep.optimum) {
                rep.optimum = std::abs(d);
                chosen = cell.prov;
                have = true;
            }
        }
        if (!have) throw ValidationError("internal: empty fpt root table");
    } else {  // Bsm
        bool have = false;
        for (const auto& [key, cell] : root) {
            std::int64_t tw = table == FptTable::B ? cell.value : key.second;
            std::int64_t bal = std::max(key.first, tw);
            if (!have || bal < rep.optimum) {
                rep.optimum = bal;
                chosen = cell.prov;
                have = true;
            }
        }
        if (!have) throw ValidationError("internal: empty fpt root table");
    }
    if (opt.want_witness && chosen >= 0) {
        auto rot_ids = eng.witness_rotations(chosen);
        rep.witness = eliminate(rs, inst, closure(rs, rot_ids));
    }
    rep.stats.states = eng.states;
    rep.stats.set_entries = eng.entries;
    rep.stats.nodes = ntd.num_nodes();
    rep.stats.width = ntd.width();
    std::int64_t n2 = (std::int64_t)inst.total_agents() * inst.total_agents();
    rep.stats.dense_cells =
        eng.states * (table == FptTable::N ? (n2 + 1) * (n2 + 1)
                                           : (table == FptTable::S ? 2 * n2 + 1 : n2 + 1));
    rep.stats.wall_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
            .count();
    return rep;
}

}  // namespace

std::vector<ManView> state_views(const Instance& inst, const RotationStructure& rs,
                                 const NiceTreeDecomposition& ntd, int node,
                                 const std::vector<int>& subset, const Matching* mu) {
    const auto& bag = ntd.bags[node];
    for (int x : subset)
        if (!std::binary_search(bag.begin(), bag.end(), x))
            throw ValidationError("subset is not contained in the bag");
    auto gamma = gamma_sets(ntd);
    std::vector<char> in_subset(std::max(1, rs.num_rotations()), 0);
    std::vector<char> in_bag(std::max(1, rs.num_rotations()), 0);
    for (int x : subset) in_subset[x] = 1;
    for (int x : bag) in_bag[x] = 1;
    Matching mu_r = eliminate(rs, inst, closure(rs, subset));

    std::vector<ManView> views;
    for (int m = 0; m < inst.num_men(); ++m) {
        if (!rs.matched_men[m]) continue;
        ManView view;
        view.man = m;
        const auto& path = rs.per_man_path[m];
        int ell_pos = -1, eff_pos = -1;
        for (int i = 0; i < (int)path.size(); ++i) {
            if (in_subset[path[i]]) {
                view.ell = path[i];
                ell_pos = i;
            }
            if (in_bag[path[i]]) view.relevant = true;
        }
        for (int i = ell_pos + 1; i < (int)path.size(); ++i)
            if (in_bag[path[i]] && !in_subset[path[i]]) {
                view.eff = path[i];
                eff_pos = i;
                break;
            }
        if (view.relevant && (view.ell >= 0 || view.eff >= 0)) {
            int from = view.ell >= 0 ? ell_pos : 0;
            int to = view.eff >= 0 ? eff_pos : (int)path.size() - 1;
            view.segment.assign(path.begin() + from, path.begin() + to + 1);
        }
        bool all_in_gamma = true;
        for (int r : path)
            if (!bitset_test(gamma[node], r)) {
                all_in_gamma = false;
                break;
            }
        bool seg_in_gamma = !view.segment.empty();
        for (int r : view.segment)
            if (!bitset_test(gamma[node], r)) {
                seg_in_gamma = false;
                break;
            }
        view.settled = all_in_gamma || (view.relevant && seg_in_gamma);
        view.partner = (view.settled && mu) ? mu->wife(m) : mu_r.wife(m);
        views.push_back(view);
    }
    return views;
}

SolveReport fpt_solve_gsm(const Instance& inst, const RotationStructure& rs,
                          const NiceTreeDecomposition& ntd, const FptOptions& opt) {
    return run_solver(inst, rs, ntd, FptTable::N, Objective::Gsm, opt);
}
SolveReport fpt_solve_sesm(const Instance& inst, const RotationStructure& rs,
                           const NiceTreeDecomposition& ntd, const FptOptions& opt) {
    return run_solver(inst, rs, ntd, FptTable::S, Objective::Sesm, opt);
}
SolveReport fpt_solve_bsm(const Instance& inst, const RotationStructure& rs,
                          const NiceTreeDecomposition& ntd, const FptOptions& opt) {
    return run_solver(inst, rs, ntd, FptTable::B, Objective::Bsm, opt);
}

}  // namespace smtw
