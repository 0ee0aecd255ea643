#include "smtw/gale_shapley.hpp"

#include <algorithm>
#include <deque>
#include <random>

namespace smtw {

namespace {

// Men (side = Man) or women (side = Woman) propose down their lists.
Matching propose(const Instance& inst, Side side) {
    int np = side == Side::Man ? inst.num_men() : inst.num_women();
    Matching mu(inst);
    std::vector<size_t> next(np, 0);
    std::deque<int> free;
    for (int a = 0; a < np; ++a) free.push_back(a);
    while (!free.empty()) {
        int a = free.front();
        free.pop_front();
        const auto& lst = inst.list(side, a);
        while (next[a] < lst.size()) {
            int b = lst[next[a]++];
            int cur = side == Side::Man ? mu.husband(b) : mu.wife(b);
            if (cur < 0) {
                if (side == Side::Man)
                    mu.match(a, b);
                else
                    mu.match(b, a);
                break;
            }
            if (inst.rank(opposite(side), b, a) < inst.rank(opposite(side), b, cur)) {
                if (side == Side::Man) {
                    mu.unmatch(cur, b);
                    mu.match(a, b);
                } else {
                    mu.unmatch(b, cur);
                    mu.match(b, a);
                }
                free.push_back(cur);
                break;
            }
        }
    }
    return mu;
}

}  // namespace

Matching man_optimal(const Instance& inst) {
    if (inst.has_ties())
        throw ValidationError("man_optimal requires strict preferences");
    return propose(inst, Side::Man);
}

Matching woman_optimal(const Instance& inst) {
    if (inst.has_ties())
        throw ValidationError("woman_optimal requires strict preferences");
    return propose(inst, Side::Woman);
}

LatticeExtremes lattice_extremes(const Instance& inst) {
    LatticeExtremes ex{man_optimal(inst), woman_optimal(inst), {}, {}};
    ex.matched_men.assign(inst.num_men(), 0);
    ex.matched_women.assign(inst.num_women(), 0);
    for (int m = 0; m < inst.num_men(); ++m)
        ex.matched_men[m] = ex.man_optimal.man_matched(m);
    for (int w = 0; w < inst.num_women(); ++w)
        ex.matched_women[w] = ex.man_optimal.woman_matched(w);
    return ex;
}

Instance break_ties(const Instance& inst, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    auto shuffle_side = [&](Side s, int count) {
        std::vector<PrefList> out(count);
        for (int a = 0; a < count; ++a) {
            const auto& lst = inst.list(s, a);
            const auto& ranks = inst.list_ranks(s, a);
            size_t i = 0;
            while (i < lst.size()) {
                size_t j = i;
                while (j < lst.size() && ranks[j] == ranks[i]) ++j;
                std::vector<int> group(lst.begin() + i, lst.begin() + j);
                std::shuffle(group.begin(), group.end(), rng);
                for (int p : group) out[a].groups.push_back({p});
                i = j;
            }
        }
        return out;
    };
    auto men = shuffle_side(Side::Man, inst.num_men());
    auto women = shuffle_side(Side::Woman, inst.num_women());
    return Instance::make(inst.num_men(), inst.num_women(), men, women);
}

Matching stable_with_tiebreak(const Instance& inst, std::uint64_t seed) {
    if (!inst.has_ties()) return man_optimal(inst);
    Instance strict = break_ties(inst, seed);
    Matching mu = man_optimal(strict);
    // Pair ids are shared between the two instances.
    return Matching::from_pairs(inst, mu.pairs());
}

}  // namespace smtw
