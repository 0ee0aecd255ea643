#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "smtw/core.hpp"
#include "smtw/treedec.hpp"

namespace smtw {

// Instance text format:
//   p smti <#men> <#women>
//   m <id> : <entries>       entries are woman ids in rank order,
//   w <id> : <entries>       parenthesized groups denote ties
// '#' starts a comment; ids are 1-based.
Instance parse_instance(const std::string& text);
Instance read_instance_file(const std::string& path);
std::string format_instance(const Instance& inst);

// PACE-2017-style tree decomposition:
//   s td <#bags> <width+1> <#vertices>
//   b <bag id> <vertices...>
//   <bag id> <bag id>        tree edges
TreeDecomposition parse_td(const std::string& text);
TreeDecomposition read_td_file(const std::string& path);
std::string format_td(const TreeDecomposition& td);

// Edge-list graph: 'p tw <n> <m>' (or 'p edge'), then '<u> <v>' lines.
Graph parse_graph(const std::string& text);
Graph read_graph_file(const std::string& path);
std::string format_graph(const Graph& g);

// Vertex partition: line i lists the 1-based vertices of class i.
std::vector<std::vector<int>> parse_partition(const std::string& text);
std::vector<std::vector<int>> read_partition_file(const std::string& path);

// DIMACS CNF.
struct CnfFormula {
    int num_vars = 0;
    std::vector<std::vector<int>> clauses;  // signed 1-based literals
};
CnfFormula parse_dimacs(const std::string& text);
CnfFormula read_dimacs_file(const std::string& path);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace smtw
