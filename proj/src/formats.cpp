#include "smtw/formats.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace smtw {

namespace {

std::string strip_comment(const std::string& line, char marker) {
    auto pos = line.find(marker);
    return pos == std::string::npos ? line : line.substr(0, pos);
}

std::vector<std::string> tokens(const std::string& line) {
    std::istringstream is(line);
    std::vector<std::string> out;
    std::string t;
    while (is >> t) out.push_back(t);
    return out;
}

[[noreturn]] void fail(int line_no, const std::string& msg) {
    throw ValidationError(msg + " at line " + std::to_string(line_no));
}

int parse_int(const std::string& t, int line_no) {
    try {
        size_t used = 0;
        int v = std::stoi(t, &used);
        if (used != t.size()) fail(line_no, "bad integer '" + t + "'");
        return v;
    } catch (const ValidationError&) {
        throw;
    } catch (...) {
        fail(line_no, "bad integer '" + t + "'");
    }
}

}  // namespace

Instance parse_instance(const std::string& text) {
    std::istringstream is(text);
    std::string raw;
    int line_no = 0;
    int nm = -1, nw = -1;
    std::vector<PrefList> men, women;
    std::vector<char> seen_m, seen_w;
    while (std::getline(is, raw)) {
        ++line_no;
        std::string line = strip_comment(raw, '#');
        auto toks = tokens(line);
        if (toks.empty()) continue;
        if (toks[0] == "p") {
            if (nm >= 0) fail(line_no, "duplicate header");
            if (toks.size() != 4 || toks[1] != "smti") fail(line_no, "bad header");
            nm = parse_int(toks[2], line_no);
            nw = parse_int(toks[3], line_no);
            if (nm < 0 || nw < 0) fail(line_no, "negative agent count");
            men.resize(nm);
            women.resize(nw);
            seen_m.assign(nm, 0);
            seen_w.assign(nw, 0);
            continue;
        }
        if (toks[0] != "m" && toks[0] != "w") fail(line_no, "unknown directive '" + toks[0] + "'");
        if (nm < 0) fail(line_no, "agent line before header");
        bool man = toks[0] == "m";
        if (toks.size() < 3 || toks[2] != ":") fail(line_no, "expected '<id> :'");
        int id = parse_int(toks[1], line_no);
        int own_count = man ? nm : nw;
        int other_count = man ? nw : nm;
        if (id < 1 || id > own_count)
            fail(line_no, std::string("unknown ") + (man ? "man " : "woman ") +
                              std::to_string(id));
        auto& seen = man ? seen_m : seen_w;
        if (seen[id - 1]) fail(line_no, "duplicate list for " + toks[0] + " " + toks[1]);
        seen[id - 1] = 1;
        PrefList pl;
        bool in_tie = false;
        std::vector<int> group;
        for (size_t i = 3; i < toks.size(); ++i) {
            std::string t = toks[i];
            while (!t.empty() && t.front() == '(') {
                if (in_tie) fail(line_no, "nested tie group");
                in_tie = true;
                t.erase(t.begin());
            }
            int closes = 0;
            while (!t.empty() && t.back() == ')') {
                ++closes;
                t.pop_back();
            }
            if (t.empty()) fail(line_no, "stray parenthesis");
            int p = parse_int(t, line_no);
            if (p < 1 || p > other_count)
                fail(line_no, std::string("unknown ") + (man ? "woman " : "man ") +
                                  std::to_string(p));
            if (in_tie)
                group.push_back(p - 1);
            else
                pl.groups.push_back({p - 1});
            for (int c = 0; c < closes; ++c) {
                if (!in_tie) fail(line_no, "unmatched ')'");
                in_tie = false;
                if (group.empty()) fail(line_no, "empty tie group");
                pl.groups.push_back(group);
                group.clear();
            }
        }
        if (in_tie) fail(line_no, "unterminated tie group");
        (man ? men : women)[id - 1] = std::move(pl);
    }
    if (nm < 0) throw ValidationError("missing 'p smti' header");
    return Instance::make(nm, nw, men, women);
}

std::string format_instance(const Instance& inst) {
    std::ostringstream os;
    os << "p smti " << inst.num_men() << " " << inst.num_women() << "\n";
    auto emit = [&](Side s, int count, char tag) {
        for (int a = 0; a < count; ++a) {
            os << tag << " " << a + 1 << " :";
            const auto& lst = inst.list(s, a);
            const auto& ranks = inst.list_ranks(s, a);
            size_t i = 0;
            while (i < lst.size()) {
                size_t j = i;
                while (j < lst.size() && ranks[j] == ranks[i]) ++j;
                if (j - i == 1) {
                    os << " " << lst[i] + 1;
                } else {
                    os << " (";
                    for (size_t k = i; k < j; ++k) os << (k == i ? "" : " ") << lst[k] + 1;
                    os << ")";
                }
                i = j;
            }
            os << "\n";
        }
    };
    emit(Side::Man, inst.num_men(), 'm');
    emit(Side::Woman, inst.num_women(), 'w');
    return os.str();
}

TreeDecomposition parse_td(const std::string& text) {
    std::istringstream is(text);
    std::string raw;
    int line_no = 0;
    TreeDecomposition td;
    int nb = -1;
    std::vector<char> seen;
    while (std::getline(is, raw)) {
        ++line_no;
        auto toks = tokens(raw);
        if (toks.empty() || toks[0] == "c") continue;
        if (toks[0] == "s") {
            if (nb >= 0) fail(line_no, "duplicate solution line");
            if (toks.size() != 5 || toks[1] != "td") fail(line_no, "bad 's td' line");
            nb = parse_int(toks[2], line_no);
            td.num_vertices = parse_int(toks[4], line_no);
            if (nb < 0) fail(line_no, "negative bag count");
            td.bags.resize(nb);
            seen.assign(nb, 0);
            continue;
        }
        if (nb < 0) fail(line_no, "content before 's td' line");
        if (toks[0] == "b") {
            if (toks.size() < 2) fail(line_no, "bad bag line");
            int id = parse_int(toks[1], line_no);
            if (id < 1 || id > nb) fail(line_no, "bag id out of range");
            if (seen[id - 1]) fail(line_no, "duplicate bag");
            seen[id - 1] = 1;
            for (size_t i = 2; i < toks.size(); ++i) {
                int v = parse_int(toks[i], line_no);
                if (v < 1 || v > td.num_vertices) fail(line_no, "bag vertex out of range");
                td.bags[id - 1].push_back(v - 1);
            }
            std::sort(td.bags[id - 1].begin(), td.bags[id - 1].end());
            continue;
        }
        if (toks.size() != 2) fail(line_no, "bad tree edge line");
        int u = parse_int(toks[0], line_no), v = parse_int(toks[1], line_no);
        if (u < 1 || v < 1 || u > nb || v > nb) fail(line_no, "tree edge out of range");
        td.edges.emplace_back(u - 1, v - 1);
    }
    if (nb < 0) throw ValidationError("missing 's td' line");
    return td;
}

std::string format_td(const TreeDecomposition& td) {
    std::ostringstream os;
    os << "s td " << td.num_nodes() << " " << td.width() + 1 << " " << td.num_vertices
       << "\n";
    for (int b = 0; b < td.num_nodes(); ++b) {
        os << "b " << b + 1;
        for (int v : td.bags[b]) os << " " << v + 1;
        os << "\n";
    }
    for (auto [u, v] : td.edges) os << u + 1 << " " << v + 1 << "\n";
    return os.str();
}

Graph parse_graph(const std::string& text) {
    std::istringstream is(text);
    std::string raw;
    int line_no = 0;
    Graph g;
    bool have_header = false;
    while (std::getline(is, raw)) {
        ++line_no;
        auto toks = tokens(raw);
        if (toks.empty() || toks[0] == "c" || toks[0][0] == '#') continue;
        if (toks[0] == "p") {
            if (have_header) fail(line_no, "duplicate header");
            if (toks.size() != 4 || (toks[1] != "tw" && toks[1] != "edge"))
                fail(line_no, "bad graph header");
            g = Graph::empty(parse_int(toks[2], line_no));
            have_header = true;
            continue;
        }
        if (!have_header) fail(line_no, "edge before header");
        std::vector<std::string> e = toks;
        if (e[0] == "e") e.erase(e.begin());
        if (e.size() != 2) fail(line_no, "bad edge line");
        int u = parse_int(e[0], line_no), v = parse_int(e[1], line_no);
        if (u < 1 || v < 1 || u > g.n || v > g.n) fail(line_no, "edge endpoint out of range");
        g.add_edge(u - 1, v - 1);
    }
    if (!have_header) throw ValidationError("missing graph header");
    return g;
}

std::string format_graph(const Graph& g) {
    std::ostringstream os;
    os << "p tw " << g.n << " " << g.edges.size() << "\n";
    for (auto [u, v] : g.edges) os << u + 1 << " " << v + 1 << "\n";
    return os.str();
}

std::vector<std::vector<int>> parse_partition(const std::string& text) {
    std::istringstream is(text);
    std::string raw;
    int line_no = 0;
    std::vector<std::vector<int>> classes;
    while (std::getline(is, raw)) {
        ++line_no;
        auto toks = tokens(strip_comment(raw, '#'));
        if (toks.empty()) continue;
        std::vector<int> cls;
        for (const auto& t : toks) {
            int v = parse_int(t, line_no);
            if (v < 1) fail(line_no, "partition vertex out of range");
            cls.push_back(v - 1);
        }
        classes.push_back(std::move(cls));
    }
    if (classes.empty()) throw ValidationError("empty partition file");
    return classes;
}

CnfFormula parse_dimacs(const std::string& text) {
    std::istringstream is(text);
    std::string raw;
    int line_no = 0;
    CnfFormula f;
    bool have_header = false;
    std::vector<int> cur;
    while (std::getline(is, raw)) {
        ++line_no;
        auto toks = tokens(raw);
        if (toks.empty() || toks[0] == "c") continue;
        if (toks[0] == "p") {
            if (have_header) fail(line_no, "duplicate header");
            if (toks.size() != 4 || toks[1] != "cnf") fail(line_no, "bad cnf header");
            f.num_vars = parse_int(toks[2], line_no);
            have_header = true;
            continue;
        }
        if (!have_header) fail(line_no, "clause before header");
        for (const auto& t : toks) {
            int lit = parse_int(t, line_no);
            if (lit == 0) {
                f.clauses.push_back(cur);
                cur.clear();
            } else {
                if (std::abs(lit) > f.num_vars) fail(line_no, "literal out of range");
                cur.push_back(lit);
            }
        }
    }
    if (!cur.empty()) f.clauses.push_back(cur);
    if (!have_header) throw ValidationError("missing 'p cnf' header");
    return f;
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open file: " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot open file for writing: " + path);
    out << text;
}

Instance read_instance_file(const std::string& path) {
    return parse_instance(read_text_file(path));
}
TreeDecomposition read_td_file(const std::string& path) {
    return parse_td(read_text_file(path));
}
Graph read_graph_file(const std::string& path) { return parse_graph(read_text_file(path)); }
std::vector<std::vector<int>> read_partition_file(const std::string& path) {
    return parse_partition(read_text_file(path));
}
CnfFormula read_dimacs_file(const std::string& path) {
    return parse_dimacs(read_text_file(path));
}

}  // namespace smtw
