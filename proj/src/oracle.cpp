#include "smtw/oracle.hpp"

#include <algorithm>
#include <functional>
#include <map>

namespace smtw {

namespace {

bool matching_less(const Matching& a, const Matching& b, int nm) {
    for (int m = 0; m < nm; ++m) {
        if (a.wife(m) != b.wife(m)) return a.wife(m) < b.wife(m);
    }
    return false;
}

void sort_unique(StableSet& set, const Instance& inst) {
    std::vector<int> idx(set.matchings.size());
    for (size_t i = 0; i < idx.size(); ++i) idx[i] = (int)i;
    std::sort(idx.begin(), idx.end(), [&](int x, int y) {
        return matching_less(set.matchings[x], set.matchings[y], inst.num_men());
    });
    StableSet out;
    for (int i : idx) {
        if (!out.matchings.empty() && out.matchings.back() == set.matchings[i]) continue;
        out.matchings.push_back(set.matchings[i]);
        out.scores.push_back(set.scores[i]);
    }
    set = std::move(out);
}

StableSet enumerate_filter(const Instance& inst) {
    if (inst.total_agents() > 20)
        throw GuardExceeded("matching-filter enumeration guard: more than 20 agents");
    StableSet out;
    Matching mu(inst);
    std::function<void(int)> rec = [&](int m) {
        if (m == inst.num_men()) {
            if (!find_blocking_pair(inst, mu)) {
                out.matchings.push_back(mu);
                out.scores.push_back(score(inst, mu));
            }
            return;
        }
        rec(m + 1);  // m unmatched
        for (int w : inst.list(Side::Man, m)) {
            if (mu.woman_matched(w)) continue;
            mu.match(m, w);
            rec(m + 1);
            mu.unmatch(m, w);
        }
    };
    rec(0);
    sort_unique(out, inst);
    return out;
}

StableSet enumerate_closed_sets(const Instance& inst) {
    RotationStructure rs = build_rotation_structure(inst);
    int nr = rs.num_rotations();
    if (nr > 60)
        throw GuardExceeded("closed-set enumeration guard: too many rotations");
    StableSet out;
    // Depth-first over rotations in topological id order: a set is closed iff
    // every chosen rotation has all its predecessors chosen.
    std::vector<int> chosen;
    std::vector<char> in(nr, 0);
    std::function<void(int)> rec = [&](int r) {
        if (r == nr) {
            Matching mu = eliminate(rs, inst, chosen);
            out.matchings.push_back(mu);
            out.scores.push_back(score(inst, mu));
            return;
        }
        rec(r + 1);
        bool ok = true;
        for (int p : rs.rev_arcs[r])
            if (!in[p]) {
                ok = false;
                break;
            }
        if (ok) {
            in[r] = 1;
            chosen.push_back(r);
            rec(r + 1);
            chosen.pop_back();
            in[r] = 0;
        }
        if (out.matchings.size() > 2000000)
            throw GuardExceeded("closed-set enumeration guard: too many stable matchings");
    };
    rec(0);
    sort_unique(out, inst);
    return out;
}

}  // namespace

StableSet enumerate_stable_strict(const Instance& inst, StrictEnumMethod method) {
    if (inst.has_ties())
        throw ValidationError("strict enumeration requires strict preferences");
    switch (method) {
        case StrictEnumMethod::Filter:
            return enumerate_filter(inst);
        case StrictEnumMethod::ClosedSets:
            return enumerate_closed_sets(inst);
        case StrictEnumMethod::Both: {
            StableSet a = enumerate_closed_sets(inst);
            StableSet b = enumerate_filter(inst);
            if (a.matchings.size() != b.matchings.size())
                throw ValidationError("oracle route disagreement: stable-set sizes differ");
            for (size_t i = 0; i < a.matchings.size(); ++i)
                if (!(a.matchings[i] == b.matchings[i]))
                    throw ValidationError("oracle route disagreement: stable sets differ");
            return a;
        }
    }
    throw ValidationError("unreachable");
}

StableSet enumerate_weakly_stable(const Instance& inst) {
    if (inst.acceptable_pairs() > 16)
        throw GuardExceeded("weak enumeration guard: more than 16 acceptable pairs");
    std::vector<std::pair<int, int>> pairs;
    for (int m = 0; m < inst.num_men(); ++m)
        for (int w : inst.list(Side::Man, m)) pairs.emplace_back(m, w);
    StableSet out;
    Matching mu(inst);
    std::function<void(size_t)> rec = [&](size_t i) {
        if (i == pairs.size()) {
            if (!find_blocking_pair(inst, mu)) {
                out.matchings.push_back(mu);
                out.scores.push_back(score(inst, mu));
            }
            return;
        }
        rec(i + 1);
        auto [m, w] = pairs[i];
        if (!mu.man_matched(m) && !mu.woman_matched(w)) {
            mu.match(m, w);
            rec(i + 1);
            mu.unmatch(m, w);
        }
    };
    rec(0);
    sort_unique(out, inst);
    return out;
}

Objective objective_from_name(const std::string& name) {
    if (name == "sesm") return Objective::Sesm;
    if (name == "bsm") return Objective::Bsm;
    if (name == "max-smt") return Objective::MaxSmt;
    if (name == "min-smt") return Objective::MinSmt;
    if (name == "gsm") return Objective::Gsm;
    throw ValidationError("unknown objective: " + name);
}

std::string objective_name(Objective o) {
    switch (o) {
        case Objective::Sesm: return "sesm";
        case Objective::Bsm: return "bsm";
        case Objective::MaxSmt: return "max-smt";
        case Objective::MinSmt: return "min-smt";
        case Objective::Gsm: return "gsm";
    }
    return "?";
}

OracleResult oracle_optimum(const Instance& inst, Objective objective) {
    OracleResult res;
    if (objective == Objective::MaxSmt || objective == Objective::MinSmt) {
        StableSet set = enumerate_weakly_stable(inst);
        bool maximize = objective == Objective::MaxSmt;
        int best = -1;
        for (size_t i = 0; i < set.matchings.size(); ++i) {
            int sz = set.scores[i].size;
            if (best < 0 || (maximize ? sz > res.optimum : sz < res.optimum)) {
                best = (int)i;
                res.optimum = sz;
            }
        }
        res.witness = set.matchings[best];
        return res;
    }
    StableSet set = enumerate_stable_strict(inst);
    if (objective == Objective::Gsm) {
        for (const auto& sc : set.scores) res.pair_set.emplace_back(sc.sat_m, sc.sat_w);
        std::sort(res.pair_set.begin(), res.pair_set.end());
        res.pair_set.erase(std::unique(res.pair_set.begin(), res.pair_set.end()),
                           res.pair_set.end());
        res.witness = set.matchings[0];
        return res;
    }
    int best = -1;
    for (size_t i = 0; i < set.matchings.size(); ++i) {
        std::int64_t v = objective == Objective::Sesm ? std::abs(set.scores[i].delta)
                                                      : set.scores[i].bal;
        if (best < 0 || v < res.optimum) {
            best = (int)i;
            res.optimum = v;
        }
    }
    res.witness = set.matchings[best];
    return res;
}

std::vector<char> rotations_eliminated(const RotationStructure& rs,
                                       const Instance& inst, const Matching& mu) {
    std::vector<char> in(rs.num_rotations(), 0);
    for (const auto& rot : rs.rotations) {
        int votes = 0;
        for (auto [m, w] : rot.cycle) {
            int cur = inst.rank(Side::Man, m, mu.wife(m));
            int at = inst.rank(Side::Man, m, w);
            if (cur > at) ++votes;
        }
        if (votes != 0 && votes != (int)rot.cycle.size())
            throw ValidationError("matching is inconsistent with rotation structure");
        in[rot.id] = votes > 0;
    }
    return in;
}

}  // namespace smtw
