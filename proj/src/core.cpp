#include "smtw/core.hpp"

#include <algorithm>

namespace smtw {

namespace {

void build_side(const std::vector<PrefList>& prefs, int own_count, int other_count,
                const char* side_name,
                std::vector<std::vector<int>>& list,
                std::vector<std::vector<int>>& list_ranks,
                std::vector<std::vector<int>>& acc,
                std::vector<std::vector<int>>& acc_rank,
                bool& has_ties) {
    if ((int)prefs.size() != own_count)
        throw ValidationError(std::string(side_name) + " preference count mismatch");
    list.resize(own_count);
    list_ranks.resize(own_count);
    acc.resize(own_count);
    acc_rank.resize(own_count);
    for (int a = 0; a < own_count; ++a) {
        int rank = 0;
        for (const auto& group : prefs[a].groups) {
            if (group.empty())
                throw ValidationError("empty tie group in preference list");
            ++rank;
            if (group.size() > 1) has_ties = true;
            for (int p : group) {
                if (p < 0 || p >= other_count)
                    throw ValidationError("preference entry out of range");
                list[a].push_back(p);
                list_ranks[a].push_back(rank);
            }
        }
        std::vector<int> order(list[a].size());
        for (size_t i = 0; i < order.size(); ++i) order[i] = (int)i;
        std::sort(order.begin(), order.end(),
                  [&](int x, int y) { return list[a][x] < list[a][y]; });
        acc[a].reserve(order.size());
        acc_rank[a].reserve(order.size());
        int prev = -1;
        for (int i : order) {
            if (list[a][i] == prev)
                throw ValidationError("duplicate entry in preference list");
            prev = list[a][i];
            acc[a].push_back(list[a][i]);
            acc_rank[a].push_back(list_ranks[a][i]);
        }
    }
}

}  // namespace

Instance Instance::make(int num_men, int num_women,
                        const std::vector<PrefList>& men,
                        const std::vector<PrefList>& women) {
    if (num_men < 0 || num_women < 0)
        throw ValidationError("negative agent count");
    Instance inst;
    inst.num_men_ = num_men;
    inst.num_women_ = num_women;
    build_side(men, num_men, num_women, "men", inst.men_list_, inst.men_list_ranks_,
               inst.men_acc_, inst.men_acc_rank_, inst.has_ties_);
    build_side(women, num_women, num_men, "women", inst.women_list_,
               inst.women_list_ranks_, inst.women_acc_, inst.women_acc_rank_,
               inst.has_ties_);
    // Acceptability must be symmetric.
    for (int m = 0; m < num_men; ++m)
        for (int w : inst.men_list_[m])
            if (inst.rank(Side::Woman, w, m) == 0)
                throw ValidationError("asymmetric acceptability: man " +
                                      std::to_string(m + 1) + " lists woman " +
                                      std::to_string(w + 1) + " but not vice versa");
    for (int w = 0; w < num_women; ++w) {
        for (int m : inst.women_list_[w])
            if (inst.rank(Side::Man, m, w) == 0)
                throw ValidationError("asymmetric acceptability: woman " +
                                      std::to_string(w + 1) + " lists man " +
                                      std::to_string(m + 1) + " but not vice versa");
        inst.pair_count_ += (std::int64_t)inst.women_list_[w].size();
    }
    return inst;
}

int Instance::rank(Side s, int a, int partner) const {
    const auto& acc = s == Side::Man ? men_acc_[a] : women_acc_[a];
    const auto& acc_rank = s == Side::Man ? men_acc_rank_[a] : women_acc_rank_[a];
    auto it = std::lower_bound(acc.begin(), acc.end(), partner);
    if (it == acc.end() || *it != partner) return 0;
    return acc_rank[it - acc.begin()];
}

Matching Matching::from_pairs(const Instance& inst,
                              const std::vector<std::pair<int, int>>& pairs) {
    Matching mu(inst);
    for (auto [m, w] : pairs) {
        if (m < 0 || m >= inst.num_men() || w < 0 || w >= inst.num_women())
            throw ValidationError("matching pair out of range");
        if (mu.wife_[m] != -1 || mu.husband_[w] != -1)
            throw ValidationError("matching is not injective");
        if (!inst.acceptable(m, w))
            throw ValidationError("matched pair is not mutually acceptable");
        mu.match(m, w);
    }
    return mu;
}

int Matching::size() const {
    int c = 0;
    for (int w : wife_) c += (w >= 0);
    return c;
}

std::vector<std::pair<int, int>> Matching::pairs() const {
    std::vector<std::pair<int, int>> out;
    for (int m = 0; m < (int)wife_.size(); ++m)
        if (wife_[m] >= 0) out.emplace_back(m, wife_[m]);
    return out;
}

void validate_matching(const Instance& inst, const Matching& mu) {
    if (!mu.shaped_for(inst))
        throw ValidationError("matching is not shaped for the instance");
    std::vector<char> seen(inst.num_women(), 0);
    for (int m = 0; m < inst.num_men(); ++m) {
        int w = mu.wife(m);
        if (w < 0) continue;
        if (w >= inst.num_women()) throw ValidationError("wife id out of range");
        if (seen[w]) throw ValidationError("matching is not injective");
        seen[w] = 1;
        if (mu.husband(w) != m) throw ValidationError("matching maps are inconsistent");
        if (!inst.acceptable(m, w))
            throw ValidationError("matched pair is not mutually acceptable");
    }
    for (int w = 0; w < inst.num_women(); ++w)
        if (mu.husband(w) >= 0 && mu.wife(mu.husband(w)) != w)
            throw ValidationError("matching maps are inconsistent");
}

std::optional<std::pair<int, int>> find_blocking_pair(const Instance& inst,
                                                      const Matching& mu) {
    validate_matching(inst, mu);
    for (int m = 0; m < inst.num_men(); ++m) {
        const auto& lst = inst.list(Side::Man, m);
        const auto& ranks = inst.list_ranks(Side::Man, m);
        int m_cur = mu.man_matched(m) ? inst.rank(Side::Man, m, mu.wife(m)) : 0;
        for (size_t i = 0; i < lst.size(); ++i) {
            int w = lst[i];
            if (m_cur != 0 && ranks[i] >= m_cur) break;  // list order = rank order
            int h = mu.husband(w);
            if (h == m) continue;
            if (h < 0) return std::make_pair(m, w);
            if (inst.rank(Side::Woman, w, m) < inst.rank(Side::Woman, w, h))
                return std::make_pair(m, w);
        }
    }
    return std::nullopt;
}

Scores score(const Instance& inst, const Matching& mu) {
    validate_matching(inst, mu);
    Scores s;
    for (int m = 0; m < inst.num_men(); ++m) {
        int w = mu.wife(m);
        if (w < 0) continue;
        s.sat_m += inst.rank(Side::Man, m, w);
        s.sat_w += inst.rank(Side::Woman, w, m);
        ++s.size;
    }
    s.delta = s.sat_m - s.sat_w;
    s.bal = std::max(s.sat_m, s.sat_w);
    return s;
}

Graph primal_graph(const Instance& inst) {
    Graph g = Graph::empty(inst.total_agents());
    for (int m = 0; m < inst.num_men(); ++m)
        for (int w : inst.list(Side::Man, m)) g.add_edge(m, inst.num_men() + w);
    return g;
}

}  // namespace smtw
