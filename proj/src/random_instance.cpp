#include "smtw/random_instance.hpp"

#include <algorithm>
#include <random>

namespace smtw {

Instance random_instance(std::uint64_t seed, const RandomSpec& spec) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> side(spec.min_side, spec.max_side);
    std::bernoulli_distribution edge(spec.edge_prob);
    for (int attempt = 0; attempt < 1000; ++attempt) {
        int nm = side(rng), nw = side(rng);
        std::vector<std::vector<int>> acc_m(nm), acc_w(nw);
        int pairs = 0;
        for (int m = 0; m < nm; ++m)
            for (int w = 0; w < nw; ++w)
                if (edge(rng)) {
                    acc_m[m].push_back(w);
                    acc_w[w].push_back(m);
                    ++pairs;
                }
        if (spec.max_pairs > 0 && pairs > spec.max_pairs) continue;
        auto build = [&](const std::vector<std::vector<int>>& acc) {
            std::vector<PrefList> out(acc.size());
            for (size_t a = 0; a < acc.size(); ++a) {
                std::vector<int> order = acc[a];
                std::shuffle(order.begin(), order.end(), rng);
                size_t i = 0;
                while (i < order.size()) {
                    size_t len = 1;
                    if (spec.ties && i + 1 < order.size()) {
                        std::uniform_int_distribution<size_t> g(1, order.size() - i);
                        // Bias towards short groups.
                        len = std::min(g(rng), (size_t)(rng() % 3 + 1));
                    }
                    std::vector<int> group(order.begin() + i, order.begin() + i + len);
                    out[a].groups.push_back(group);
                    i += len;
                }
            }
            return out;
        };
        return Instance::make(nm, nw, build(acc_m), build(acc_w));
    }
    throw GuardExceeded("random_instance: could not satisfy pair cap");
}

}  // namespace smtw
