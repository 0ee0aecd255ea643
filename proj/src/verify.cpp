#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <sstream>

#include <json.hpp>

#include "smtw/gale_shapley.hpp"
#include "smtw/oracle.hpp"
#include "smtw/reductions.hpp"
#include "smtw/rotations.hpp"
#include "smtw/treedec.hpp"

namespace smtw {

namespace {

struct NameIndex {
    std::map<std::string, int> men, women;

    explicit NameIndex(const ReductionOutput& out) {
        for (size_t i = 0; i < out.man_roles.size(); ++i)
            men[out.man_roles[i].name] = (int)i;
        for (size_t i = 0; i < out.woman_roles.size(); ++i)
            women[out.woman_roles[i].name] = (int)i;
    }
    int man(const std::string& n) const {
        auto it = men.find(n);
        if (it == men.end()) throw ValidationError("missing man role " + n);
        return it->second;
    }
    int woman(const std::string& n) const {
        auto it = women.find(n);
        if (it == women.end()) throw ValidationError("missing woman role " + n);
        return it->second;
    }
};

std::string idx2(const std::string& base, int i, int j) {
    return base + std::to_string(i + 1) + "_" + std::to_string(j + 1);
}
std::string idx3(const std::string& base, std::pair<int, int> key, int t) {
    return base + std::to_string(key.first + 1) + "," + std::to_string(key.second + 1) +
           "_" + std::to_string(t + 1);
}

using Check = std::function<std::string()>;  // empty string = pass

void run_check(VerificationReport& rep, const std::string& name, const Check& fn) {
    CheckResult res;
    res.name = name;
    try {
        res.detail = fn();
        res.pass = res.detail.empty();
    } catch (const GuardExceeded& e) {
        res.skipped = true;
        res.detail = e.what();
    } catch (const std::exception& e) {
        res.pass = false;
        res.detail = e.what();
    }
    rep.checks.push_back(res);
}

// Brute-force multicolored clique; choice[i] = vertex index inside class i.
std::optional<std::vector<int>> find_clique(const CliqueInput& in) {
    std::vector<std::set<std::pair<int, int>>> dummy;
    std::set<std::pair<int, int>> edges;
    for (auto [x, y] : in.graph.edges) edges.insert({std::min(x, y), std::max(x, y)});
    double space = 1;
    for (int i = 0; i < in.k; ++i) space *= in.p;
    if (space > 2e6) throw GuardExceeded("clique search space too large");
    std::vector<int> choice(in.k, 0);
    std::function<bool(int)> rec = [&](int i) -> bool {
        if (i == in.k) return true;
        for (int j = 0; j < in.p; ++j) {
            bool ok = true;
            for (int i2 = 0; i2 < i && ok; ++i2) {
                int u = in.classes[i][j], v = in.classes[i2][choice[i2]];
                ok = edges.count({std::min(u, v), std::max(u, v)}) > 0;
            }
            if (ok) {
                choice[i] = j;
                if (rec(i + 1)) return true;
            }
        }
        return false;
    };
    if (rec(0)) return choice;
    return std::nullopt;
}

// The edge index in pair_edges[(i,j)] joining the chosen clique vertices.
int clique_edge_slot(const CliqueInput& in, const std::vector<int>& choice,
                     std::pair<int, int> key) {
    int u = in.classes[key.first][choice[key.first]];
    int v = in.classes[key.second][choice[key.second]];
    const auto& slots = in.pair_edges.at(key);
    for (int t = 0; t < (int)slots.size(); ++t) {
        auto [x, y] = in.graph.edges[slots[t]];
        if ((x == u && y == v) || (x == v && y == u)) return t;
    }
    throw ValidationError("internal: clique edge not present");
}

std::string check_leader_form(const ReductionOutput& out) {
    const auto& in = *out.clique;
    const auto& inst = out.instance;
    NameIndex ix(out);
    for (int i = 0; i < in.k; ++i) {
        for (int mirror = 0; mirror <= 1; ++mirror) {
            int m = ix.man(mirror ? "mhat" + std::to_string(i + 1)
                                  : "m" + std::to_string(i + 1));
            std::map<int, int> pos;  // woman -> list position
            const auto& lst = inst.list(Side::Man, m);
            for (size_t x = 0; x < lst.size(); ++x) pos[lst[x]] = (int)x;
            // Condition 1: exactly the own vertex women plus the edge women
            // of edges incident to this class (among non-happy women).
            std::set<int> expect;
            for (int j = 0; j < in.p; ++j)
                expect.insert(ix.woman(idx2(mirror ? "what" : "w", i, j)));
            for (const auto& [key, slots] : in.pair_edges) {
                if (key.first != i && key.second != i) continue;
                for (int t = 0; t < (int)slots.size(); ++t)
                    expect.insert(ix.woman(idx3("w", key, t)));
            }
            for (int w : lst) {
                const auto& role = out.woman_roles[w].gadget;
                if (role == "happy" || role == "enr") continue;
                if (!expect.count(w)) return "leader lists unexpected woman";
            }
            for (int w : expect)
                if (!pos.count(w)) return "leader misses a required woman";
            // Condition 2: vertex women ordered ascending / descending.
            for (int j = 0; j + 1 < in.p; ++j) {
                int a = ix.woman(idx2(mirror ? "what" : "w", i, j));
                int b = ix.woman(idx2(mirror ? "what" : "w", i, j + 1));
                if (mirror ? pos[a] < pos[b] : pos[a] > pos[b])
                    return "leader vertex order violated";
            }
            // Conditions 3-4: edge women sit between their vertex woman and
            // the next one in the leader's direction.
            for (int j = 0; j < in.p; ++j) {
                int vgl = in.classes[i][j];
                int wj = ix.woman(idx2(mirror ? "what" : "w", i, j));
                int next = mirror ? j - 1 : j + 1;
                int bound = (next >= 0 && next < in.p)
                                ? pos[ix.woman(idx2(mirror ? "what" : "w", i, next))]
                                : (int)lst.size() + 1;
                for (const auto& [key, slots] : in.pair_edges) {
                    if (key.first != i && key.second != i) continue;
                    for (int t = 0; t < (int)slots.size(); ++t) {
                        auto [x, y] = in.graph.edges[slots[t]];
                        if (x != vgl && y != vgl) continue;
                        int we = ix.woman(idx3("w", key, t));
                        if (!(pos[wj] < pos[we] && pos[we] < bound))
                            return "edge woman misplaced in leader list";
                    }
                }
            }
        }
    }
    return "";
}

std::string check_min_fill_bound(const Graph& g, std::int64_t bound,
                                 const std::string& what) {
    if (g.n > 20000) throw GuardExceeded("graph too large for min-fill check");
    TreeDecomposition td = min_fill_decomposition(g);
    validate(td, g);
    if (td.width() > bound)
        return what + " min-fill width " + std::to_string(td.width()) + " exceeds " +
               std::to_string(bound);
    return "";
}

Matching build_mu_c(const ReductionOutput& out, const std::vector<int>& choice) {
    const auto& in = *out.clique;
    NameIndex ix(out);
    std::vector<std::pair<int, int>> pairs;
    auto pair_by_name = [&](const std::string& m, const std::string& w) {
        pairs.emplace_back(ix.man(m), ix.woman(w));
    };
    int p = in.p;
    bool sesm_like = out.kind == "clique-sesm" || out.kind == "clique-bsm";
    bool maxk = out.kind == "clique-maxsmt";
    for (int i = 0; i < in.k; ++i) {
        int l = choice[i];  // 0-based
        auto istr = std::to_string(i + 1);
        pair_by_name("m" + istr, idx2("w", i, l));
        pair_by_name("mhat" + istr, idx2("what", i, l));
        if (sesm_like) {
            for (int j = 1; j <= l; ++j) pair_by_name(idx2("m", i, j), idx2("w", i, j - 1));
            for (int j = l + 1; j < p; ++j) pair_by_name(idx2("m", i, j), idx2("w", i, j));
            for (int j = l; j + 1 < p; ++j)
                pair_by_name(idx2("mhat", i, j), idx2("what", i, j + 1));
            for (int j = 0; j < l; ++j) pair_by_name(idx2("mhat", i, j), idx2("what", i, j));
            pair_by_name(idx2("mtil", i, l), idx2("wbar", i, l));
            pair_by_name(idx2("mbar", i, l), idx2("wtil", i, l));
            for (int j = 0; j < p; ++j) {
                if (j == l) continue;
                pair_by_name(idx2("mtil", i, j), idx2("wtil", i, j));
                pair_by_name(idx2("mbar", i, j), idx2("wbar", i, j));
            }
        } else if (maxk) {
            for (int j = 1; j <= l; ++j) pair_by_name(idx2("m", i, j), idx2("w", i, j - 1));
            for (int j = l + 1; j < p; ++j) pair_by_name(idx2("m", i, j), idx2("w", i, j));
            pair_by_name(idx2("mhat", i, l), "w" + istr);
            for (int j = 0; j < p; ++j)
                if (j != l) pair_by_name(idx2("mhat", i, j), idx2("what", i, j));
        } else {  // min
            pair_by_name(idx2("m", i, l), idx2("wbar", i, l));
            for (int j = 0; j < p; ++j) {
                if (j == l) continue;
                pair_by_name(idx2("m", i, j), idx2("w", i, j));
                pair_by_name(idx2("mhat", i, j), idx2("what", i, j));
            }
        }
    }
    for (const auto& [key, slots] : in.pair_edges) {
        int l = clique_edge_slot(in, choice, key);
        int q = (int)slots.size();
        if (sesm_like) {
            pair_by_name(idx3("m", key, l), idx3("w", key, l));
            pair_by_name(idx3("mbar", key, l), idx3("wbar", key, l));
            for (int t = 0; t < q; ++t) {
                if (t == l) continue;
                pair_by_name(idx3("m", key, t), idx3("wbar", key, t));
                pair_by_name(idx3("mbar", key, t), idx3("w", key, t));
            }
        } else if (maxk) {
            pair_by_name(idx3("m", key, l), idx3("wbar", key, l));
            pair_by_name(idx3("mbar", key, l), idx3("w", key, l));
            for (int t = 0; t < q; ++t)
                if (t != l) pair_by_name(idx3("m", key, t), idx3("w", key, t));
            for (int t = 1; t <= l; ++t) {
                pair_by_name(idx3("mtil", key, t), idx3("wbar", key, t - 1));
                pair_by_name(idx3("mbar", key, t - 1), idx3("wtil", key, t));
            }
            for (int t = l + 1; t < q; ++t) {
                pair_by_name(idx3("mtil", key, t), idx3("wbar", key, t));
                pair_by_name(idx3("mbar", key, t), idx3("wtil", key, t));
            }
        } else {  // min
            pair_by_name(idx3("m", key, l),
                         "w_pair" + std::to_string(key.first + 1) + "," +
                             std::to_string(key.second + 1));
            for (int t = 0; t < q; ++t)
                if (t != l) pair_by_name(idx3("m", key, t), idx3("w", key, t));
        }
    }
    if (sesm_like) {
        NameIndex ix2(out);
        for (int m = 0; m < out.instance.num_men(); ++m)
            if (out.man_roles[m].gadget == "happy") {
                // happy pair h shares its index suffix
                auto name = out.man_roles[m].name;  // m_hap_<h>
                pairs.emplace_back(m, ix2.woman("w_hap_" + name.substr(6)));
            }
        pairs.emplace_back(ix2.man("m_star"), ix2.woman("w_star"));
    }
    return Matching::from_pairs(out.instance, pairs);
}

void verify_clique(const ReductionOutput& out, VerificationReport& rep) {
    const auto& in = *out.clique;
    const auto& inst = out.instance;
    bool sesm_like = out.kind == "clique-sesm" || out.kind == "clique-bsm";

    run_check(rep, "agent-count", [&] {
        return out.predicted_agents == inst.total_agents()
                   ? ""
                   : "predicted " + std::to_string(out.predicted_agents) + " actual " +
                         std::to_string(inst.total_agents());
    });
    run_check(rep, "roles-partition", [&] {
        return (int)out.man_roles.size() == inst.num_men() &&
                       (int)out.woman_roles.size() == inst.num_women()
                   ? ""
                   : "role annotations do not cover the agents";
    });
    run_check(rep, "leader-form", [&] { return check_leader_form(out); });
    run_check(rep, "primal-treewidth", [&] {
        return check_min_fill_bound(primal_graph(inst), out.treewidth_bound, "primal");
    });

    std::optional<std::vector<int>> clique;
    bool clique_known = false;
    run_check(rep, "clique-witness", [&] {
        clique = find_clique(in);
        clique_known = true;
        if (!clique)
            throw GuardExceeded("no multicolored clique in the input; mu^C undefined");
        Matching mu = build_mu_c(out, *clique);
        if (auto bp = find_blocking_pair(inst, mu))
            return "mu^C has blocking pair (" + std::to_string(bp->first + 1) + "," +
                   std::to_string(bp->second + 1) + ")";
        Scores sc = score(inst, mu);
        if (out.kind == "clique-sesm") {
            if (sc.size * 2 != inst.total_agents()) return std::string("mu^C not perfect");
            if (sc.delta != 0) return "delta(mu^C) = " + std::to_string(sc.delta);
        } else if (out.kind == "clique-bsm") {
            if (sc.size * 2 != inst.total_agents()) return std::string("mu^C not perfect");
            if (sc.bal != out.target)
                return "bal(mu^C) = " + std::to_string(sc.bal) + " expected " +
                       std::to_string(out.target);
        } else if (out.kind == "clique-maxsmt") {
            if (sc.size != out.target) return std::string("mu^C_max not perfect");
        } else {
            if (sc.size != out.target)
                return "mu^C_min size " + std::to_string(sc.size) + " expected " +
                       std::to_string(out.target);
        }
        return std::string();
    });

    if (sesm_like) {
        run_check(rep, "stable-all-matched", [&] {
            if (inst.total_agents() > 2500)
                throw GuardExceeded("instance too large for lattice enumeration");
            StableSet set = enumerate_stable_strict(inst, StrictEnumMethod::ClosedSets);
            for (const auto& mu : set.matchings)
                if (mu.size() * 2 != inst.total_agents())
                    return std::string("a stable matching leaves agents unmatched");
            return std::string();
        });
    } else {
        run_check(rep, out.kind == "clique-maxsmt" ? "max-size" : "min-size", [&] {
            if (!clique_known) clique = find_clique(in);
            std::int64_t opt =
                smt_optimum_pruned(inst, out.kind == "clique-maxsmt");
            if (clique && opt != out.target)
                return "optimum " + std::to_string(opt) + " expected " +
                       std::to_string(out.target);
            if (!clique && out.kind == "clique-maxsmt" && opt >= out.target)
                return std::string("no-instance reaches the perfect size");
            if (!clique && out.kind == "clique-minsmt" && opt <= out.target)
                return std::string("no-instance reaches the target size");
            return std::string();
        });
    }
    if (out.kind == "clique-minsmt") {
        run_check(rep, "non-leader-forest", [&] {
            Graph pg = primal_graph(inst);
            std::vector<char> drop(pg.n, 0);
            for (int m = 0; m < inst.num_men(); ++m)
                if (out.man_roles[m].gadget == "leader") drop[m] = 1;
            // union-find over the remaining vertices; a cycle fails.
            std::vector<int> parent(pg.n);
            std::iota(parent.begin(), parent.end(), 0);
            std::function<int(int)> find = [&](int x) {
                while (parent[x] != x) x = parent[x] = parent[parent[x]];
                return x;
            };
            for (auto [x, y] : pg.edges) {
                if (drop[x] || drop[y]) continue;
                int a = find(x), b = find(y);
                if (a == b) return std::string("cycle without leader vertices");
                parent[a] = b;
            }
            return std::string();
        });
    }
}

// --- SAT reduction checks ---------------------------------------------------

struct SatRotations {
    // canonical cycles, all of the form ((m,w),(mhat,what))
    std::vector<std::vector<std::pair<int, int>>> r1, r2, r3;
    std::vector<std::pair<int, int>> r1_idx, r3_idx;  // (block, j)
};

std::vector<std::pair<int, int>> canon(std::vector<std::pair<int, int>> cycle) {
    auto mn = std::min_element(cycle.begin(), cycle.end());
    std::rotate(cycle.begin(), mn, cycle.end());
    return cycle;
}

SatRotations sat_rotations(const ReductionOutput& out) {
    const auto& in = *out.sat;
    NameIndex ix(out);
    SatRotations rot;
    for (int i = 0; i < in.num_blocks; ++i)
        for (int j = 0; j < in.a[i]; ++j) {
            rot.r1.push_back(canon({{ix.man(idx2("mbar", i, j)), ix.woman(idx2("wbar", i, j))},
                                    {ix.man(idx2("mhatbar", i, j)),
                                     ix.woman(idx2("whatbar", i, j))}}));
            rot.r1_idx.push_back({i, j});
        }
    for (int t = 0; t < in.num_vars; ++t)
        rot.r2.push_back(canon({{ix.man("m_" + std::to_string(t + 1)),
                                 ix.woman("w_" + std::to_string(t + 1))},
                                {ix.man("mhat_" + std::to_string(t + 1)),
                                 ix.woman("what_" + std::to_string(t + 1))}}));
    for (int i = 0; i < in.num_blocks; ++i)
        for (int j = 0; j < in.a[i]; ++j) {
            rot.r3.push_back(canon({{ix.man(idx2("m", i, j)), ix.woman(idx2("w", i, j))},
                                    {ix.man(idx2("mhat", i, j)),
                                     ix.woman(idx2("what", i, j))}}));
            rot.r3_idx.push_back({i, j});
        }
    return rot;
}

void verify_sat(const ReductionOutput& out, VerificationReport& rep) {
    const auto& in = *out.sat;
    const auto& inst = out.instance;
    if (out.numbers.count("trivially_unsatisfiable")) {
        run_check(rep, "unsat-marker", [&] {
            return inst.total_agents() == 0
                       ? ""
                       : "marker output should carry an empty instance";
        });
        return;
    }
    run_check(rep, "agent-count", [&] {
        return out.predicted_agents == inst.total_agents()
                   ? ""
                   : "predicted " + std::to_string(out.predicted_agents) + " actual " +
                         std::to_string(inst.total_agents());
    });

    std::optional<RotationStructure> rs;
    auto need_rs = [&]() -> RotationStructure& {
        if (!rs) {
            if (inst.total_agents() > 4000)
                throw GuardExceeded("instance too large for rotation analysis");
            rs = build_rotation_structure(inst);
        }
        return *rs;
    };
    SatRotations rot = sat_rotations(out);

    // id of each constructed rotation in the built structure
    std::map<std::vector<std::pair<int, int>>, int> cycle_id;
    auto map_cycles = [&](RotationStructure& r) {
        cycle_id.clear();
        for (const auto& ro : r.rotations) cycle_id[canon(ro.cycle)] = ro.id;
    };

    run_check(rep, "rotation-vertices", [&] {
        auto& r = need_rs();
        map_cycles(r);
        std::set<std::vector<std::pair<int, int>>> expect;
        for (const auto& c : rot.r1) expect.insert(c);
        for (const auto& c : rot.r2) expect.insert(c);
        for (const auto& c : rot.r3) expect.insert(c);
        if ((int)expect.size() != r.num_rotations())
            return "rotation count " + std::to_string(r.num_rotations()) + " expected " +
                   std::to_string(expect.size());
        for (const auto& ro : r.rotations)
            if (!expect.count(canon(ro.cycle)))
                return std::string("built rotation outside R1|R2|R3");
        return std::string();
    });

    run_check(rep, "rotation-subgraph", [&] {
        auto& r = need_rs();
        map_cycles(r);
        // H edges: R1 x R2 complete, same-index R1 -> R3, R2 x R3 complete.
        // One addition over the printed supergraph: the legal-set rule also
        // forces rho-bar^i_k before rho^i_j for k != j directly, and when
        // P^i_j is contained in P^i_k no variable rotation lies in between,
        // so the minimal digraph keeps that arc. Those stay inside the same
        // block component, which is what the treewidth bound relies on.
        std::set<std::pair<int, int>> allowed;
        auto id_of = [&](const std::vector<std::pair<int, int>>& c) {
            auto it = cycle_id.find(c);
            if (it == cycle_id.end()) throw ValidationError("cycle not built");
            return it->second;
        };
        auto subset_of = [&](int i, int j, int k) {  // P^i_j subset of P^i_k
            for (int t : in.block_vars[i])
                if (in.sets[i][j][t] && !in.sets[i][k][t]) return false;
            return true;
        };
        for (size_t a = 0; a < rot.r1.size(); ++a) {
            for (const auto& c2 : rot.r2) allowed.insert({id_of(rot.r1[a]), id_of(c2)});
            for (size_t b = 0; b < rot.r3.size(); ++b) {
                auto [ia, ka] = rot.r1_idx[a];
                auto [ib, jb] = rot.r3_idx[b];
                if (ia != ib) continue;
                if (ka == jb || subset_of(ia, jb, ka))
                    allowed.insert({id_of(rot.r1[a]), id_of(rot.r3[b])});
            }
        }
        for (const auto& c2 : rot.r2)
            for (const auto& c3 : rot.r3) allowed.insert({id_of(c2), id_of(c3)});
        for (int a = 0; a < r.num_rotations(); ++a)
            for (int b : r.arcs[a])
                if (!allowed.count({a, b}))
                    return std::string("rotation digraph arc outside H_Pi");
        return std::string();
    });

    run_check(rep, "rotation-treewidth", [&] {
        return check_min_fill_bound(rotation_graph(need_rs()), out.treewidth_bound,
                                    "rotation graph");
    });

    // Enumerate excellent matchings directly from the definitions.
    NameIndex ix(out);
    auto assemble = [&](const std::vector<char>& vflag, const std::vector<std::vector<char>>& ts,
                        const std::vector<std::vector<char>>& fs) {
        std::vector<std::pair<int, int>> pairs;
        for (int t = 0; t < in.num_vars; ++t) {
            auto ts2 = std::to_string(t + 1);
            if (vflag[t]) {
                pairs.emplace_back(ix.man("m_" + ts2), ix.woman("what_" + ts2));
                pairs.emplace_back(ix.man("mhat_" + ts2), ix.woman("w_" + ts2));
            } else {
                pairs.emplace_back(ix.man("m_" + ts2), ix.woman("w_" + ts2));
                pairs.emplace_back(ix.man("mhat_" + ts2), ix.woman("what_" + ts2));
            }
        }
        for (int i = 0; i < in.num_blocks; ++i)
            for (int j = 0; j < in.a[i]; ++j) {
                if (ts[i][j]) {
                    pairs.emplace_back(ix.man(idx2("m", i, j)), ix.woman(idx2("what", i, j)));
                    pairs.emplace_back(ix.man(idx2("mhat", i, j)), ix.woman(idx2("w", i, j)));
                } else {
                    pairs.emplace_back(ix.man(idx2("m", i, j)), ix.woman(idx2("w", i, j)));
                    pairs.emplace_back(ix.man(idx2("mhat", i, j)),
                                       ix.woman(idx2("what", i, j)));
                }
                if (fs[i][j]) {
                    pairs.emplace_back(ix.man(idx2("mbar", i, j)),
                                       ix.woman(idx2("whatbar", i, j)));
                    pairs.emplace_back(ix.man(idx2("mhatbar", i, j)),
                                       ix.woman(idx2("wbar", i, j)));
                } else {
                    pairs.emplace_back(ix.man(idx2("mbar", i, j)),
                                       ix.woman(idx2("wbar", i, j)));
                    pairs.emplace_back(ix.man(idx2("mhatbar", i, j)),
                                       ix.woman(idx2("whatbar", i, j)));
                }
            }
        for (int m = 0; m < inst.num_men(); ++m)
            if (out.man_roles[m].gadget == "happy")
                pairs.emplace_back(m,
                                   ix.woman("w_hap_" + out.man_roles[m].name.substr(6)));
        pairs.emplace_back(ix.man("m_star"), ix.woman("w_star"));
        return Matching::from_pairs(inst, pairs);
    };

    auto in_P = [&](int i, int j, int t) { return (bool)in.sets[i][j][t]; };
    auto in_N = [&](int i, int j, int t) {
        return !in.sets[i][j][t] &&
               std::binary_search(in.block_vars[i].begin(), in.block_vars[i].end(), t);
    };

    // All (vflag, ts, fs) triples satisfying the excellence conditions.
    std::vector<Matching> lambda_set;
    auto enumerate_lambda = [&] {
        lambda_set.clear();
        int bits = in.num_vars + 2 * (int)in.a_total;
        if (bits > 22) throw GuardExceeded("too many gadgets for direct enumeration");
        for (std::uint32_t code = 0; code < (1u << bits); ++code) {
            std::vector<char> vflag(in.num_vars);
            std::vector<std::vector<char>> ts(in.num_blocks), fs(in.num_blocks);
            int b = 0;
            for (int t = 0; t < in.num_vars; ++t) vflag[t] = (code >> b++) & 1;
            for (int i = 0; i < in.num_blocks; ++i) {
                ts[i].resize(in.a[i]);
                fs[i].resize(in.a[i]);
                for (int j = 0; j < in.a[i]; ++j) ts[i][j] = (code >> b++) & 1;
                for (int j = 0; j < in.a[i]; ++j) fs[i][j] = (code >> b++) & 1;
            }
            bool ok = true;
            for (int t = 0; t < in.num_vars && ok; ++t)
                if (vflag[t])
                    for (int i = 0; i < in.num_blocks && ok; ++i)
                        for (int j = 0; j < in.a[i] && ok; ++j)
                            if (in_N(i, j, t) && !fs[i][j]) ok = false;
            for (int i = 0; i < in.num_blocks && ok; ++i)
                for (int j = 0; j < in.a[i] && ok; ++j)
                    if (ts[i][j]) {
                        for (int t = 0; t < in.num_vars && ok; ++t)
                            if (in_P(i, j, t) && !vflag[t]) ok = false;
                        for (int kk = 0; kk < in.a[i] && ok; ++kk)
                            if (kk != j && !fs[i][kk]) ok = false;
                    }
            if (ok) lambda_set.push_back(assemble(vflag, ts, fs));
        }
    };

    std::optional<StableSet> stable;
    auto need_stable = [&]() -> StableSet& {
        if (!stable) {
            need_rs();
            if (rs->num_rotations() > 40)
                throw GuardExceeded("too many rotations for lattice enumeration");
            stable = enumerate_stable_strict(inst, StrictEnumMethod::ClosedSets);
        }
        return *stable;
    };

    run_check(rep, "stable-set-is-excellent", [&] {
        enumerate_lambda();
        for (const auto& mu : lambda_set)
            if (find_blocking_pair(inst, mu))
                return std::string("an excellent matching is unstable");
        auto& set = need_stable();
        if (set.matchings.size() != lambda_set.size())
            return "|S| = " + std::to_string(set.matchings.size()) + ", |Lambda| = " +
                   std::to_string(lambda_set.size());
        std::set<std::vector<std::pair<int, int>>> spairs;
        for (const auto& mu : set.matchings) spairs.insert(mu.pairs());
        for (const auto& mu : lambda_set)
            if (!spairs.count(mu.pairs()))
                return std::string("excellent matching missing from S");
        return std::string();
    });

    run_check(rep, "legal-sets", [&] {
        auto& r = need_rs();
        map_cycles(r);
        int nr1 = (int)rot.r1.size(), nr2 = (int)rot.r2.size(), nr3 = (int)rot.r3.size();
        int bits = nr1 + nr2 + nr3;
        if (bits > 22) throw GuardExceeded("too many rotations for legal-set enumeration");
        std::set<std::vector<std::pair<int, int>>> results;
        std::int64_t count = 0;
        for (std::uint32_t code = 0; code < (1u << bits); ++code) {
            auto has = [&](int idx) { return (code >> idx) & 1; };
            bool ok = true;
            // rho_t in R -> all rho-bar with x_t in N^i_j in R
            for (int t = 0; t < nr2 && ok; ++t)
                if (has(nr1 + t))
                    for (int a = 0; a < nr1 && ok; ++a)
                        if (in_N(rot.r1_idx[a].first, rot.r1_idx[a].second, t) && !has(a))
                            ok = false;
            for (int b = 0; b < nr3 && ok; ++b)
                if (has(nr1 + nr2 + b)) {
                    auto [i, j] = rot.r3_idx[b];
                    for (int t = 0; t < nr2 && ok; ++t)
                        if (in_P(i, j, t) && !has(nr1 + t)) ok = false;
                    for (int a = 0; a < nr1 && ok; ++a)
                        if (rot.r1_idx[a].first == i && rot.r1_idx[a].second != j &&
                            !has(a))
                            ok = false;
                }
            if (!ok) continue;
            ++count;
            std::vector<int> ids;
            for (int a = 0; a < nr1; ++a)
                if (has(a)) ids.push_back(cycle_id.at(rot.r1[a]));
            for (int t = 0; t < nr2; ++t)
                if (has(nr1 + t)) ids.push_back(cycle_id.at(rot.r2[t]));
            for (int b = 0; b < nr3; ++b)
                if (has(nr1 + nr2 + b)) ids.push_back(cycle_id.at(rot.r3[b]));
            if (!is_closed(r, ids)) return std::string("legal set is not closed");
            results.insert(eliminate(r, inst, ids).pairs());
        }
        auto& set = need_stable();
        if (count != (std::int64_t)set.matchings.size() ||
            results.size() != set.matchings.size())
            return "legal sets " + std::to_string(count) + " vs |S| " +
                   std::to_string(set.matchings.size());
        for (const auto& mu : set.matchings)
            if (!results.count(mu.pairs()))
                return std::string("stable matching missed by legal sets");
        return std::string();
    });

    run_check(rep, "rotation-decomposition", [&] {
        auto& r = need_rs();
        map_cycles(r);
        for (const auto& mu : need_stable().matchings) {
            auto elim = rotations_eliminated(r, inst, mu);
            // R_i(mu) by the gadget configurations.
            std::vector<char> expect(r.num_rotations(), 0);
            for (size_t a = 0; a < rot.r1.size(); ++a) {
                auto [i, j] = rot.r1_idx[a];
                if (mu.wife(ix.man(idx2("mbar", i, j))) ==
                    ix.woman(idx2("whatbar", i, j)))
                    expect[cycle_id.at(rot.r1[a])] = 1;
            }
            for (int t = 0; t < in.num_vars; ++t)
                if (mu.wife(ix.man("m_" + std::to_string(t + 1))) ==
                    ix.woman("what_" + std::to_string(t + 1)))
                    expect[cycle_id.at(rot.r2[t])] = 1;
            for (size_t b = 0; b < rot.r3.size(); ++b) {
                auto [i, j] = rot.r3_idx[b];
                if (mu.wife(ix.man(idx2("m", i, j))) == ix.woman(idx2("what", i, j)))
                    expect[cycle_id.at(rot.r3[b])] = 1;
            }
            if (expect != elim)
                return std::string("R(mu) differs from R1(mu)|R2(mu)|R3(mu)");
        }
        return std::string();
    });

    if (out.kind == "sat-bsm") {
        run_check(rep, "same-rotation-digraph", [&] {
            SatSpacers sp;
            sp.scale = out.numbers.at("scale");
            sp.tau = out.numbers.at("tau");
            ReductionOutput sesm = reduce_sat_to_sesm(in, sp);
            RotationStructure rs2 = build_rotation_structure(sesm.instance);
            auto& r = need_rs();
            if (rs2.num_rotations() != r.num_rotations())
                return std::string("rotation counts differ");
            // Compare arc sets through canonical cycles named by roles.
            SatRotations rot2 = sat_rotations(sesm);
            std::map<std::vector<std::pair<int, int>>, int> id2;
            for (const auto& ro : rs2.rotations) id2[canon(ro.cycle)] = ro.id;
            map_cycles(r);
            auto arcs_named = [&](const RotationStructure& rr, const SatRotations& ro,
                                  std::map<std::vector<std::pair<int, int>>, int>& ids) {
                // rotation id -> symbolic label index
                std::map<int, std::string> label;
                for (size_t a = 0; a < ro.r1.size(); ++a)
                    label[ids.at(ro.r1[a])] = "r1:" + std::to_string(a);
                for (size_t t = 0; t < ro.r2.size(); ++t)
                    label[ids.at(ro.r2[t])] = "r2:" + std::to_string(t);
                for (size_t b = 0; b < ro.r3.size(); ++b)
                    label[ids.at(ro.r3[b])] = "r3:" + std::to_string(b);
                std::set<std::pair<std::string, std::string>> out_arcs;
                for (int a = 0; a < rr.num_rotations(); ++a)
                    for (int b : rr.arcs[a]) out_arcs.insert({label.at(a), label.at(b)});
                return out_arcs;
            };
            if (arcs_named(r, rot, cycle_id) != arcs_named(rs2, rot2, id2))
                return std::string("rotation digraphs differ");
            return std::string();
        });
    }
}

}  // namespace

VerificationReport verify_reduction(const ReductionOutput& out) {
    VerificationReport rep;
    rep.kind = out.kind;
    if (out.clique)
        verify_clique(out, rep);
    else if (out.sat)
        verify_sat(out, rep);
    else
        throw ValidationError("reduction output carries no source input");
    return rep;
}

std::string verification_to_json(const VerificationReport& report) {
    nlohmann::json j;
    j["kind"] = report.kind;
    j["all_passed"] = report.all_passed();
    j["checks"] = nlohmann::json::array();
    for (const auto& c : report.checks)
        j["checks"].push_back({{"name", c.name},
                               {"pass", c.pass},
                               {"skipped", c.skipped},
                               {"detail", c.detail}});
    return j.dump(2);
}

std::string reduction_metadata(const ReductionOutput& out) {
    std::ostringstream os;
    os << "kind: " << out.kind << "\n";
    os << "agents.predicted: " << out.predicted_agents << "\n";
    os << "agents.actual: " << out.instance.total_agents() << "\n";
    os << "treewidth.bound: " << out.treewidth_bound << "\n";
    os << "target: " << out.target << "\n";
    for (const auto& [k, v] : out.numbers) os << "num." << k << ": " << v << "\n";
    for (size_t i = 0; i < out.man_roles.size(); ++i)
        os << "role.m." << i + 1 << ": " << out.man_roles[i].gadget << " "
           << out.man_roles[i].name << "\n";
    for (size_t i = 0; i < out.woman_roles.size(); ++i)
        os << "role.w." << i + 1 << ": " << out.woman_roles[i].gadget << " "
           << out.woman_roles[i].name << "\n";
    return os.str();
}

}  // namespace smtw
