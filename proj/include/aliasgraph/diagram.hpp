// diagram.hpp
//
// Alias diagrams: rooted, labeled multigraphs whose nodes abstract run-time
// objects and whose labeled edges abstract references. Every primitive the
// rule engine needs (link/unlink/relink, rerooting, node inclusion, union,
// cloning, dot distribution) lives here, together with value sets, alias
// sets and completion sets over a finite expression universe.

#ifndef ALIASGRAPH_DIAGRAM_HPP
#define ALIASGRAPH_DIAGRAM_HPP

#include <compare>
#include <cstdint>
#include <map>
#include <memory>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace aliasgraph {

class DiagramError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct NodeId {
    std::uint32_t value = 0;

    auto operator<=>(const NodeId&) const = default;
    std::string str() const { return "n" + std::to_string(value); }
};

using NodeSet = std::set<NodeId>;

// Field: attribute of an object. Local: formal, local or Result of a routine
// invocation, tagged with the call depth so nested frames never collide.
// Back: primed back-pointer introduced by dot distribution, tagged with the
// call depth. Fresh: the per-site alias variable of the creation policy.
enum class LabelKind : std::uint8_t { Field, Local, Back, Fresh };

struct Label {
    std::string name;
    LabelKind kind = LabelKind::Field;
    std::uint32_t tag = 0;

    static Label field(std::string name) { return {std::move(name), LabelKind::Field, 0}; }
    static Label local(std::string name, std::uint32_t depth) {
        return {std::move(name), LabelKind::Local, depth};
    }
    static Label back(std::string name, std::uint32_t depth) {
        return {std::move(name), LabelKind::Back, depth};
    }
    static Label fresh(std::string name, std::uint32_t site) {
        return {std::move(name), LabelKind::Fresh, site};
    }

    bool primed() const { return kind == LabelKind::Back; }
    std::string display() const;

    auto operator<=>(const Label&) const = default;
};

// A dotted sequence of labels. The empty sequence denotes Current.
class PathExpr {
public:
    PathExpr() = default;
    explicit PathExpr(std::vector<Label> segments) : segments_(std::move(segments)) {}

    // Parses "a.b.c" into field labels; "Current" (or "") is the empty path.
    static PathExpr parse(std::string_view text);

    const std::vector<Label>& segments() const { return segments_; }
    bool is_current() const { return segments_.empty(); }
    std::size_t size() const { return segments_.size(); }

    PathExpr then(const Label& label) const;
    PathExpr concat(const PathExpr& tail) const;
    PathExpr prefix(std::size_t length) const;
    bool has_proper_prefix(const PathExpr& p) const;
    bool has_primed_label() const;

    std::string str() const;

    auto operator<=>(const PathExpr&) const = default;
    bool operator==(const PathExpr&) const = default;

private:
    std::vector<Label> segments_;
};

// Expressions of the analyzed program plus all their prefixes.
class ExprUniverse {
public:
    ExprUniverse() = default;
    ExprUniverse(std::initializer_list<PathExpr> paths) {
        for (const auto& p : paths) insert(p);
    }

    // Inserts p and every non-empty prefix of p.
    void insert(const PathExpr& p);
    bool contains(const PathExpr& p) const { return exprs_.count(p) != 0; }
    const std::set<PathExpr>& members() const { return exprs_; }
    std::size_t size() const { return exprs_.size(); }
    auto begin() const { return exprs_.begin(); }
    auto end() const { return exprs_.end(); }

private:
    std::set<PathExpr> exprs_;
};

struct Edge {
    Label label;
    NodeId source;
    NodeId target;

    auto operator<=>(const Edge&) const = default;
};

using EdgeSet = std::set<Edge>;

class ChangeListener {
public:
    virtual ~ChangeListener() = default;
    virtual void edge_added(const Edge& e) = 0;
    virtual void edge_removed(const Edge& e) = 0;
};

// Hands out node ids. Shared between copies of a diagram so that ids are
// never reused within one analysis run.
class NodeCounter {
public:
    NodeId next() { return NodeId{next_++}; }
    void reserve_above(NodeId id) {
        if (id.value >= next_) next_ = id.value + 1;
    }

private:
    std::uint32_t next_ = 0;
};

class Diagram {
public:
    // A diagram always has at least one root; the default one is a single
    // fresh root with no edges.
    Diagram();
    explicit Diagram(std::shared_ptr<NodeCounter> counter);

    // Copies share the id counter but never the change listener.
    Diagram(const Diagram& other);
    Diagram& operator=(const Diagram& other);
    Diagram(Diagram&&) noexcept = default;
    Diagram& operator=(Diagram&&) noexcept = default;
    ~Diagram() = default;

    const NodeSet& nodes() const { return nodes_; }
    const NodeSet& roots() const { return roots_; }
    const EdgeSet& edges() const { return edges_; }
    bool contains(NodeId n) const { return nodes_.count(n) != 0; }
    NodeId root() const { return *roots_.begin(); }
    const std::shared_ptr<NodeCounter>& counter() const { return counter_; }

    NodeId include();
    NodeId add_node(NodeId id);

    bool add_edge(const Edge& e);
    bool add_edge(const Label& label, NodeId source, NodeId target) {
        return add_edge(Edge{label, source, target});
    }
    bool remove_edge(const Edge& e);
    bool has_edge(const Edge& e) const { return edges_.count(e) != 0; }

    NodeSet successors(NodeId source, const Label& label) const;
    // label -> targets for one source; empty map if none.
    const std::map<Label, NodeSet>& out(NodeId source) const;
    NodeSet image(const NodeSet& sources, const Label& label) const;

    NodeSet value_set(const PathExpr& p) const;
    NodeSet value_set_from(NodeId start, const PathExpr& p) const;

    void link(const Label& t, const NodeSet& targets);
    void unlink(const Label& t);
    void unlink(std::span<const Label> labels);
    void relink(const Label& t, const NodeSet& targets);
    void bulk_link(std::span<const Label> formals, std::span<const PathExpr> actuals);
    void reroot(const NodeSet& new_roots);

    // Structure-preserving copy over fresh node ids; the map sends every
    // node of this diagram to its image.
    std::pair<Diagram, std::map<NodeId, NodeId>> clone() const;

    // Adds k fresh roots per current root (paired positionally, root-major)
    // without copying any edge. Returns the new roots.
    std::vector<NodeId> clone_roots(std::size_t k);

    // Adds back-pointer `back` from every node of V(x) to every root.
    void dot_distribute(const PathExpr& x, const Label& back);
    // Same, but each node of V_r(x) only points back to the root r it was
    // reached from.
    void dot_distribute_per_root(const PathExpr& x, const Label& back);

    void unite(const Diagram& other);

    // Removes every edge carrying the label, from any source.
    void remove_label(const Label& label);

    // Subgraph reachable from the roots.
    Diagram reachable_part() const;

    void set_listener(ChangeListener* listener) { listener_ = listener; }

    bool operator==(const Diagram& other) const {
        return nodes_ == other.nodes_ && roots_ == other.roots_ && edges_ == other.edges_;
    }

private:
    void require_nodes(const NodeSet& xs, const char* op) const;

    std::shared_ptr<NodeCounter> counter_;
    NodeSet nodes_;
    NodeSet roots_;
    EdgeSet edges_;
    std::map<NodeId, std::map<Label, NodeSet>> out_;
    std::map<Label, std::set<std::pair<NodeId, NodeId>>> by_label_;
    ChangeListener* listener_ = nullptr;
};

Diagram unite(Diagram a, const Diagram& b);

// Paths of `universe` whose value set meets the value set of p when both are
// evaluated from the same root.
std::set<PathExpr> alias_set(const Diagram& g, const PathExpr& p, const ExprUniverse& universe);

// Members of `universe` that extend p by at least one label.
std::set<PathExpr> completions(const PathExpr& p, const ExprUniverse& universe);

// Whether two paths share a node when evaluated from some common root.
bool aliased(const Diagram& g, const PathExpr& p, const PathExpr& q);

// Label-preserving isomorphism between the root-reachable parts, mapping
// roots onto roots.
bool isomorphic(const Diagram& a, const Diagram& b);

} // namespace aliasgraph

#endif // ALIASGRAPH_DIAGRAM_HPP
