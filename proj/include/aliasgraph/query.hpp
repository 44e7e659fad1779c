// query.hpp - alias queries, list-shape checks, JSON and DOT output.

#ifndef ALIASGRAPH_QUERY_HPP
#define ALIASGRAPH_QUERY_HPP

#include "aliasgraph/calculus.hpp"
#include "aliasgraph/diagram.hpp"
#include "aliasgraph/lang.hpp"

#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace aliasgraph {

using AliasPair = std::pair<std::string, std::string>; // first < second
using PairSet = std::set<AliasPair>;

class QueryError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Every path of length 1..k that can be walked from some root, skipping
// back-pointer and fresh labels.
std::set<PathExpr> diagram_paths(const Diagram& g, unsigned k);

// Paths aliased to p in g, p itself excluded. Candidates are E, plus every
// walkable path up to `depth` labels when given.
std::set<PathExpr> query_alias(const Diagram& g, const PathExpr& p, const ExprUniverse& universe,
                               std::optional<unsigned> depth = std::nullopt);

// Unordered pairs of distinct members of E that may alias.
PairSet alias_pairs(const Diagram& g, const ExprUniverse& universe);

// Resolves "a.b" against the scope of a routine: the first name is a local
// label if the routine declares it, a field otherwise.
PathExpr scoped_path(const RoutineDecl* routine, std::string_view text);

// Bounded list-shape checks, evaluated root by root. tl^i means i tl-steps.
bool check_acyclic(const Diagram& g, const PathExpr& p, const Label& via, unsigned k);
// Y.tl^i.hd and Y.tl^(i+1).hd never share a node.
bool check_successive_heads(const Diagram& g, const PathExpr& y, const Label& hd, const Label& tl, unsigned k);
// X.tl^i and Y.tl^j never share a node.
bool check_disjoint_tails(const Diagram& g, const PathExpr& x, const PathExpr& y, const Label& tl, unsigned k);
// X.tl^i.hd and Y.tl^j.hd share a node only when i = j.
bool check_pairwise_heads(const Diagram& g, const PathExpr& x, const PathExpr& y, const Label& hd,
                          const Label& tl, unsigned k);
// Heads of Y share nothing with tails of Y, with each other, or with any
// head or tail of X.
bool check_unaliased_y(const Diagram& g, const PathExpr& x, const PathExpr& y, const Label& hd, const Label& tl,
                       unsigned k);
// Some root sees no head of X shared with any head of Y.
bool has_unaliased_world(const Diagram& g, const PathExpr& x, const PathExpr& y, const Label& hd, const Label& tl,
                         unsigned k);

struct DeutschResult {
    bool p1 = false, p2 = false, p3 = false, p4 = false, p5 = false;
    bool unaliased_world = false;
};

// Runs P1-P4 on the diagram at L2 and P5 on the one at L3.
DeutschResult check_deutsch(const Diagram& at_l2, const Diagram& at_l3, const PathExpr& x, const PathExpr& y,
                            const Label& hd, const Label& tl, unsigned k = 3);

struct PointReport {
    std::string label;
    PairSet pairs;
    bool operator==(const PointReport&) const = default;
};

struct QueryAnswer {
    std::string path;
    std::string at; // empty: routine exit
    std::vector<std::string> aliases;
    bool operator==(const QueryAnswer&) const = default;
};

struct AnalysisReport {
    std::string program;
    std::string entry;
    std::vector<PointReport> points;
    PairSet final_pairs;
    std::vector<std::string> diagnostics;
    std::optional<std::map<std::string, std::string>> deutsch;
    std::vector<QueryAnswer> queries;

    bool operator==(const AnalysisReport&) const = default;
};

std::string emit_json(const AnalysisReport& report);
AnalysisReport report_from_json(std::string_view text);

// Graphviz rendering: roots drawn with two circles, back-pointers dashed.
std::string emit_dot(const Diagram& g);

} // namespace aliasgraph

#endif // ALIASGRAPH_QUERY_HPP
