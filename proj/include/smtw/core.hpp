#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace smtw {

// Thrown on malformed inputs: asymmetric acceptability, bad rank structure,
// non-injective matchings, syntax errors.
struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Thrown when a brute-force guard would be exceeded.
struct GuardExceeded : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class Side { Man, Woman };

inline Side opposite(Side s) { return s == Side::Man ? Side::Woman : Side::Man; }

// One agent's preference list: partners in rank order, ties as groups.
// groups[i] holds the partner ids sharing rank i+1.
struct PrefList {
    std::vector<std::vector<int>> groups;

    static PrefList strict(std::vector<int> order) {
        PrefList p;
        p.groups.reserve(order.size());
        for (int x : order) p.groups.push_back({x});
        return p;
    }
};

// A (possibly tied, possibly incomplete) two-sided preference instance.
// Agent ids are dense 0-based per side. Immutable after construction.
class Instance {
public:
    Instance() = default;

    // Validates acceptability symmetry and the rank form (image {1..t}).
    static Instance make(int num_men, int num_women,
                         const std::vector<PrefList>& men,
                         const std::vector<PrefList>& women);

    int num_men() const { return num_men_; }
    int num_women() const { return num_women_; }
    int total_agents() const { return num_men_ + num_women_; }
    bool has_ties() const { return has_ties_; }
    std::int64_t acceptable_pairs() const { return pair_count_; }

    // Preference list of agent `a` on side `s`, partners in list order.
    const std::vector<int>& list(Side s, int a) const {
        return s == Side::Man ? men_list_[a] : women_list_[a];
    }
    // Parallel ranks (1-based, non-decreasing; equal rank = tie).
    const std::vector<int>& list_ranks(Side s, int a) const {
        return s == Side::Man ? men_list_ranks_[a] : women_list_ranks_[a];
    }

    // Rank of `partner` in `a`'s list, 0 if unacceptable.
    int rank(Side s, int a, int partner) const;

    bool acceptable(int m, int w) const { return rank(Side::Man, m, w) != 0; }

private:
    int num_men_ = 0;
    int num_women_ = 0;
    bool has_ties_ = false;
    std::int64_t pair_count_ = 0;
    std::vector<std::vector<int>> men_list_, women_list_;
    std::vector<std::vector<int>> men_list_ranks_, women_list_ranks_;
    // Sorted-by-partner lookup tables, parallel id/rank vectors.
    std::vector<std::vector<int>> men_acc_, women_acc_;
    std::vector<std::vector<int>> men_acc_rank_, women_acc_rank_;
};

// Partial injective matching over an instance's agents.
class Matching {
public:
    Matching() = default;
    explicit Matching(const Instance& inst)
        : wife_(inst.num_men(), -1), husband_(inst.num_women(), -1) {}

    // Validates injectivity and mutual acceptability.
    static Matching from_pairs(const Instance& inst,
                               const std::vector<std::pair<int, int>>& pairs);

    int wife(int m) const { return wife_[m]; }
    int husband(int w) const { return husband_[w]; }
    bool man_matched(int m) const { return wife_[m] >= 0; }
    bool woman_matched(int w) const { return husband_[w] >= 0; }

    void match(int m, int w) {
        wife_[m] = w;
        husband_[w] = m;
    }
    void unmatch(int m, int w) {
        wife_[m] = -1;
        husband_[w] = -1;
    }

    int size() const;
    std::vector<std::pair<int, int>> pairs() const;
    bool shaped_for(const Instance& inst) const {
        return (int)wife_.size() == inst.num_men() &&
               (int)husband_.size() == inst.num_women();
    }

    bool operator==(const Matching& o) const {
        return wife_ == o.wife_ && husband_ == o.husband_;
    }

private:
    std::vector<int> wife_;     // per man, -1 if unmatched
    std::vector<int> husband_;  // per woman
};

struct Scores {
    std::int64_t sat_m = 0;
    std::int64_t sat_w = 0;
    std::int64_t delta = 0;           // sat_m - sat_w
    std::int64_t bal = 0;             // max(sat_m, sat_w)
    int size = 0;
};

// Undirected graph; in primal graphs vertex v < num_men is man v and
// vertex num_men + w is woman w.
struct Graph {
    int n = 0;
    std::vector<std::pair<int, int>> edges;
    std::vector<std::vector<int>> adj;

    void add_edge(int u, int v) {
        edges.emplace_back(u, v);
        adj[u].push_back(v);
        adj[v].push_back(u);
    }
    static Graph empty(int n) {
        Graph g;
        g.n = n;
        g.adj.resize(n);
        return g;
    }
};

// Throws ValidationError if mu is structurally invalid over inst.
void validate_matching(const Instance& inst, const Matching& mu);

// First blocking pair by man id, then by position in that man's list.
// Weak stability under ties: both sides must strictly improve.
std::optional<std::pair<int, int>> find_blocking_pair(const Instance& inst,
                                                      const Matching& mu);

Scores score(const Instance& inst, const Matching& mu);

Graph primal_graph(const Instance& inst);

}  // namespace smtw
