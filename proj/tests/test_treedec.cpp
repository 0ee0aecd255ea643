#include <doctest.h>

#include <random>

#include "smtw/formats.hpp"
#include "smtw/treedec.hpp"

using namespace smtw;

namespace {

Graph path3() {
    Graph g = Graph::empty(3);
    g.add_edge(0, 1);
    g.add_edge(1, 2);
    return g;
}

Graph complete(int n) {
    Graph g = Graph::empty(n);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) g.add_edge(i, j);
    return g;
}

Graph cycle(int n) {
    Graph g = Graph::empty(n);
    for (int i = 0; i < n; ++i) g.add_edge(i, (i + 1) % n);
    return g;
}

Graph gnp(std::uint64_t seed, int n, double p) {
    std::mt19937_64 rng(seed);
    std::bernoulli_distribution coin(p);
    Graph g = Graph::empty(n);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (coin(rng)) g.add_edge(i, j);
    return g;
}

}  // namespace

TEST_CASE("validation accepts and rejects with witnesses") {
    Graph g = path3();
    TreeDecomposition td;
    td.num_vertices = 3;
    td.bags = {{0, 1}, {1, 2}};
    td.edges = {{0, 1}};
    CHECK(validate(td, g) == 1);

    TreeDecomposition bad;
    bad.num_vertices = 3;
    bad.bags = {{0}, {2}};
    bad.edges = {{0, 1}};
    try {
        validate(bad, g);
        FAIL("expected error");
    } catch (const ValidationError& e) {
        CHECK(std::string(e.what()).find("uncovered") != std::string::npos);
    }

    TreeDecomposition k4;
    k4.num_vertices = 4;
    k4.bags = {{0, 1, 2, 3}};
    CHECK(validate(k4, complete(4)) == 3);

    // Disconnected occurrences.
    TreeDecomposition disc;
    disc.num_vertices = 3;
    disc.bags = {{0, 1}, {1, 2}, {0, 2}};
    disc.edges = {{0, 1}, {1, 2}};
    CHECK_THROWS_AS(validate(disc, path3()), ValidationError);
}

TEST_CASE("min-fill hits the exact width on easy families") {
    Graph tree = Graph::empty(6);
    tree.add_edge(0, 1);
    tree.add_edge(0, 2);
    tree.add_edge(2, 3);
    tree.add_edge(2, 4);
    tree.add_edge(4, 5);
    auto td = min_fill_decomposition(tree);
    CHECK(validate(td, tree) == 1);

    auto td5 = min_fill_decomposition(complete(5));
    CHECK(validate(td5, complete(5)) == 4);

    auto tdc = min_fill_decomposition(cycle(4));
    CHECK(validate(tdc, cycle(4)) == 2);

    Graph none = Graph::empty(0);
    auto td0 = min_fill_decomposition(none);
    CHECK(validate(td0, none) == -1);

    Graph iso = Graph::empty(3);
    auto tdi = min_fill_decomposition(iso);
    CHECK(validate(tdi, iso) == 0);
}

TEST_CASE("nice conversion structure") {
    Graph g = Graph::empty(2);
    g.add_edge(0, 1);
    TreeDecomposition td = single_bag_decomposition(g);
    NiceTreeDecomposition ntd = make_nice(td, g);
    CHECK(validate_nice(ntd, g) == 1);
    // Leaf, two introduces, two forgets.
    int counts[4] = {0, 0, 0, 0};
    for (auto k : ntd.kind) counts[(int)k]++;
    CHECK(counts[(int)NodeKind::Leaf] == 1);
    CHECK(counts[(int)NodeKind::Introduce] == 2);
    CHECK(counts[(int)NodeKind::Forget] == 2);
    CHECK(counts[(int)NodeKind::Join] == 0);
    CHECK(ntd.bags[ntd.root].empty());
    // Introduces sit below the forgets.
    for (int v = 0; v < ntd.num_nodes(); ++v)
        if (ntd.kind[v] == NodeKind::Forget)
            CHECK(ntd.kind[ntd.children[v][0]] != NodeKind::Leaf);

    // Two equal adjacent bags: still a chain, no join.
    TreeDecomposition eq;
    eq.num_vertices = 2;
    eq.bags = {{0, 1}, {0, 1}};
    eq.edges = {{0, 1}};
    NiceTreeDecomposition ntd2 = make_nice(eq, g);
    CHECK(validate_nice(ntd2, g) == 1);
    for (auto k : ntd2.kind) CHECK(k != NodeKind::Join);

    // A node with three children becomes two binary joins.
    Graph star = Graph::empty(4);
    star.add_edge(0, 1);
    star.add_edge(0, 2);
    star.add_edge(0, 3);
    TreeDecomposition tds;
    tds.num_vertices = 4;
    tds.bags = {{0}, {0, 1}, {0, 2}, {0, 3}};
    tds.edges = {{0, 1}, {0, 2}, {0, 3}};
    NiceTreeDecomposition ntds = make_nice(tds, star);
    CHECK(validate_nice(ntds, star) == 1);
    int joins = 0;
    for (auto k : ntds.kind) joins += k == NodeKind::Join;
    CHECK(joins == 2);
}

TEST_CASE("nice conversion preserves width on random graphs") {
    for (std::uint64_t seed = 1; seed <= 15; ++seed) {
        Graph g = gnp(seed, 9, 0.3);
        TreeDecomposition td = min_fill_decomposition(g);
        int w = validate(td, g);
        NiceTreeDecomposition ntd = make_nice(td, g);
        CHECK(validate_nice(ntd, g) == w);
        CHECK((int)ntd.postorder.size() == ntd.num_nodes());
        // Node count stays O(width * bags + n).
        CHECK(ntd.num_nodes() <= (w + 2) * 2 * td.num_nodes() + g.n + 2);

        TreeDecomposition fat = inflate_width(td, g);
        CHECK(validate(fat, g) >= w);
        NiceTreeDecomposition nfat = make_nice(fat, g);
        CHECK(validate_nice(nfat, g) == fat.width());
    }
}

TEST_CASE("connected subgraphs touch a connected node set") {
    // Proposition: for a connected subgraph S the nodes whose bags meet S
    // induce a subtree.
    std::mt19937_64 rng(7);
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        Graph g = gnp(seed, 9, 0.35);
        TreeDecomposition td = min_fill_decomposition(g);
        NiceTreeDecomposition ntd = make_nice(td, g);
        validate_nice(ntd, g);
        for (int trial = 0; trial < 10; ++trial) {
            // Random connected vertex set by BFS prefix from a random root.
            int start = (int)(rng() % g.n);
            std::vector<int> pick{start};
            std::vector<char> in(g.n, 0);
            in[start] = 1;
            for (size_t i = 0; i < pick.size() && pick.size() < 4; ++i)
                for (int nb : g.adj[pick[i]])
                    if (!in[nb] && rng() % 2 && pick.size() < 4) {
                        in[nb] = 1;
                        pick.push_back(nb);
                    }
            // Touching nodes must induce a connected subtree.
            std::vector<char> touch(ntd.num_nodes(), 0);
            int count = 0, first = -1;
            for (int v = 0; v < ntd.num_nodes(); ++v)
                for (int x : ntd.bags[v])
                    if (in[x]) {
                        touch[v] = 1;
                        ++count;
                        if (first < 0) first = v;
                        break;
                    }
            if (first < 0) continue;
            std::vector<int> stack{first};
            std::vector<char> vis(ntd.num_nodes(), 0);
            vis[first] = 1;
            int reached = 1;
            while (!stack.empty()) {
                int v = stack.back();
                stack.pop_back();
                std::vector<int> nbs;
                if (ntd.parent[v] >= 0) nbs.push_back(ntd.parent[v]);
                for (int c : ntd.children[v])
                    if (c >= 0) nbs.push_back(c);
                for (int nb : nbs)
                    if (touch[nb] && !vis[nb]) {
                        vis[nb] = 1;
                        ++reached;
                        stack.push_back(nb);
                    }
            }
            CHECK(reached == count);
        }
    }
}

TEST_CASE("td format round trip") {
    Graph g = cycle(5);
    TreeDecomposition td = min_fill_decomposition(g);
    TreeDecomposition back = parse_td(format_td(td));
    CHECK(back.num_vertices == td.num_vertices);
    CHECK(back.bags == td.bags);
    CHECK(validate(back, g) == td.width());

    CHECK_THROWS_AS(parse_td("b 1 2\n"), ValidationError);
    TreeDecomposition parsed = parse_td(
        "c comment\n"
        "s td 2 2 3\n"
        "b 1 1 2\n"
        "b 2 2 3\n"
        "1 2\n");
    CHECK(validate(parsed, path3()) == 1);
}

TEST_CASE("graph format") {
    Graph g = parse_graph("c hi\np tw 3 2\n1 2\n2 3\n");
    CHECK(g.n == 3);
    CHECK(g.edges.size() == 2);
    Graph back = parse_graph(format_graph(g));
    CHECK(back.edges == g.edges);
    CHECK_THROWS_AS(parse_graph("1 2\n"), ValidationError);
}
