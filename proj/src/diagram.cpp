// diagram.cpp

#include "aliasgraph/diagram.hpp"

#include <algorithm>
#include <deque>
#include <functional>

namespace aliasgraph {

std::string Label::display() const {
    switch (kind) {
    case LabelKind::Field:
        return name;
    case LabelKind::Local:
        return tag == 0 ? name : name + "@" + std::to_string(tag);
    case LabelKind::Back:
        return tag == 0 ? name + "'" : name + "'@" + std::to_string(tag);
    case LabelKind::Fresh:
        return "f" + name + "#" + std::to_string(tag);
    }
    return name;
}

// ---------------------------------------------------------------------------
// PathExpr

PathExpr PathExpr::parse(std::string_view text) {
    std::vector<Label> segs;
    if (text.empty() || text == "Current") return PathExpr{};
    std::size_t start = 0;
    while (start <= text.size()) {
        auto dot = text.find('.', start);
        auto piece = text.substr(start, dot == std::string_view::npos ? std::string_view::npos
                                                                       : dot - start);
        if (piece.empty()) throw DiagramError("malformed path expression: " + std::string(text));
        if (piece != "Current") segs.push_back(Label::field(std::string(piece)));
        if (dot == std::string_view::npos) break;
        start = dot + 1;
    }
    return PathExpr{std::move(segs)};
}

PathExpr PathExpr::then(const Label& label) const {
    auto segs = segments_;
    segs.push_back(label);
    return PathExpr{std::move(segs)};
}

PathExpr PathExpr::concat(const PathExpr& tail) const {
    auto segs = segments_;
    segs.insert(segs.end(), tail.segments_.begin(), tail.segments_.end());
    return PathExpr{std::move(segs)};
}

PathExpr PathExpr::prefix(std::size_t length) const {
    length = std::min(length, segments_.size());
    return PathExpr{std::vector<Label>(segments_.begin(), segments_.begin() + length)};
}

bool PathExpr::has_proper_prefix(const PathExpr& p) const {
    if (p.size() >= size()) return false;
    return std::equal(p.segments_.begin(), p.segments_.end(), segments_.begin());
}

bool PathExpr::has_primed_label() const {
    return std::any_of(segments_.begin(), segments_.end(), [](const Label& l) { return l.primed(); });
}

std::string PathExpr::str() const {
    if (segments_.empty()) return "Current";
    std::string out;
    for (const auto& seg : segments_) {
        if (!out.empty()) out += '.';
        out += seg.display();
    }
    return out;
}

void ExprUniverse::insert(const PathExpr& p) {
    for (std::size_t len = 1; len <= p.size(); ++len) exprs_.insert(p.prefix(len));
}

// ---------------------------------------------------------------------------
// Diagram

Diagram::Diagram() : Diagram(std::make_shared<NodeCounter>()) {}

Diagram::Diagram(std::shared_ptr<NodeCounter> counter) : counter_(std::move(counter)) {
    auto r = counter_->next();
    nodes_.insert(r);
    roots_.insert(r);
}

Diagram::Diagram(const Diagram& other)
    : counter_(other.counter_),
      nodes_(other.nodes_),
      roots_(other.roots_),
      edges_(other.edges_),
      out_(other.out_),
      by_label_(other.by_label_) {}

Diagram& Diagram::operator=(const Diagram& other) {
    // The listener belongs to the object, not to the value.
    if (this != &other) {
        counter_ = other.counter_;
        nodes_ = other.nodes_;
        roots_ = other.roots_;
        edges_ = other.edges_;
        out_ = other.out_;
        by_label_ = other.by_label_;
    }
    return *this;
}

NodeId Diagram::include() {
    NodeId n = counter_->next();
    while (nodes_.count(n)) n = counter_->next();
    nodes_.insert(n);
    return n;
}

NodeId Diagram::add_node(NodeId id) {
    counter_->reserve_above(id);
    nodes_.insert(id);
    return id;
}

bool Diagram::add_edge(const Edge& e) {
    if (!contains(e.source) || !contains(e.target))
        throw DiagramError("edge endpoint outside the diagram: " + e.label.display());
    if (!edges_.insert(e).second) return false;
    out_[e.source][e.label].insert(e.target);
    by_label_[e.label].insert({e.source, e.target});
    if (listener_) listener_->edge_added(e);
    return true;
}

bool Diagram::remove_edge(const Edge& e) {
    if (edges_.erase(e) == 0) return false;
    auto& per_source = out_[e.source];
    auto& targets = per_source[e.label];
    targets.erase(e.target);
    if (targets.empty()) per_source.erase(e.label);
    if (per_source.empty()) out_.erase(e.source);
    auto& pairs = by_label_[e.label];
    pairs.erase({e.source, e.target});
    if (pairs.empty()) by_label_.erase(e.label);
    if (listener_) listener_->edge_removed(e);
    return true;
}

const std::map<Label, NodeSet>& Diagram::out(NodeId source) const {
    static const std::map<Label, NodeSet> empty;
    auto it = out_.find(source);
    return it == out_.end() ? empty : it->second;
}

NodeSet Diagram::successors(NodeId source, const Label& label) const {
    const auto& m = out(source);
    auto it = m.find(label);
    return it == m.end() ? NodeSet{} : it->second;
}

NodeSet Diagram::image(const NodeSet& sources, const Label& label) const {
    NodeSet result;
    for (auto s : sources) {
        const auto& m = out(s);
        auto it = m.find(label);
        if (it != m.end()) result.insert(it->second.begin(), it->second.end());
    }
    return result;
}

NodeSet Diagram::value_set(const PathExpr& p) const {
    NodeSet current = roots_;
    for (const auto& seg : p.segments()) {
        if (current.empty()) break;
        current = image(current, seg);
    }
    return current;
}

NodeSet Diagram::value_set_from(NodeId start, const PathExpr& p) const {
    NodeSet current{start};
    for (const auto& seg : p.segments()) {
        if (current.empty()) break;
        current = image(current, seg);
    }
    return current;
}

void Diagram::require_nodes(const NodeSet& xs, const char* op) const {
    for (auto x : xs)
        if (!contains(x)) throw DiagramError(std::string(op) + ": node " + x.str() + " not in diagram");
}

void Diagram::link(const Label& t, const NodeSet& targets) {
    require_nodes(targets, "link");
    for (auto r : roots_)
        for (auto x : targets) add_edge(t, r, x);
}

void Diagram::unlink(const Label& t) {
    for (auto r : roots_)
        for (auto x : successors(r, t)) remove_edge(Edge{t, r, x});
}

void Diagram::unlink(std::span<const Label> labels) {
    for (const auto& t : labels) unlink(t);
}

void Diagram::relink(const Label& t, const NodeSet& targets) {
    require_nodes(targets, "relink");
    unlink(t);
    link(t, targets);
}

void Diagram::bulk_link(std::span<const Label> formals, std::span<const PathExpr> actuals) {
    if (formals.size() != actuals.size())
        throw DiagramError("bulk_link: " + std::to_string(formals.size()) + " formals but " +
                           std::to_string(actuals.size()) + " actuals");
    std::vector<NodeSet> values;
    values.reserve(actuals.size());
    for (const auto& a : actuals) values.push_back(value_set(a));
    for (std::size_t i = 0; i < formals.size(); ++i) link(formals[i], values[i]);
}

void Diagram::reroot(const NodeSet& new_roots) {
    if (new_roots.empty()) throw DiagramError("reroot: an alias diagram needs at least one root");
    require_nodes(new_roots, "reroot");
    roots_ = new_roots;
}

std::pair<Diagram, std::map<NodeId, NodeId>> Diagram::clone() const {
    // Fresh ids come from the shared counter so the copy is disjoint from this
    // diagram and from anything else drawn in the same run.
    std::map<NodeId, NodeId> iso;
    for (auto n : nodes_) iso[n] = counter_->next();
    Diagram result(*this);
    result.listener_ = nullptr;
    result.nodes_.clear();
    result.roots_.clear();
    result.edges_.clear();
    result.out_.clear();
    result.by_label_.clear();
    for (auto [old_id, new_id] : iso) result.nodes_.insert(new_id);
    for (auto r : roots_) result.roots_.insert(iso.at(r));
    for (const auto& e : edges_) result.add_edge(e.label, iso.at(e.source), iso.at(e.target));
    return {std::move(result), std::move(iso)};
}

std::vector<NodeId> Diagram::clone_roots(std::size_t k) {
    std::vector<NodeId> added;
    const NodeSet originals = roots_;
    for (std::size_t i = 0; i < k; ++i) {
        for (auto r : originals) {
            (void)r;
            NodeId n = include();
            roots_.insert(n);
            added.push_back(n);
        }
    }
    return added;
}

void Diagram::dot_distribute(const PathExpr& x, const Label& back) {
    auto targets = value_set(x);
    if (targets.empty())
        throw DiagramError("dot distribution over '" + x.str() + "': target is definitely Void");
    for (auto o : targets)
        for (auto r : roots_) add_edge(back, o, r);
}

void Diagram::dot_distribute_per_root(const PathExpr& x, const Label& back) {
    bool any = false;
    for (auto r : NodeSet(roots_)) {
        for (auto o : value_set_from(r, x)) {
            add_edge(back, o, r);
            any = true;
        }
    }
    if (!any) throw DiagramError("dot distribution over '" + x.str() + "': target is definitely Void");
}

void Diagram::unite(const Diagram& other) {
    for (auto n : other.nodes_) add_node(n);
    roots_.insert(other.roots_.begin(), other.roots_.end());
    for (const auto& e : other.edges_) add_edge(e);
}

Diagram unite(Diagram a, const Diagram& b) {
    a.unite(b);
    return a;
}

void Diagram::remove_label(const Label& label) {
    auto it = by_label_.find(label);
    if (it == by_label_.end()) return;
    auto pairs = it->second;
    for (auto [s, t] : pairs) remove_edge(Edge{label, s, t});
}

Diagram Diagram::reachable_part() const {
    NodeSet seen = roots_;
    std::deque<NodeId> work(roots_.begin(), roots_.end());
    while (!work.empty()) {
        auto n = work.front();
        work.pop_front();
        for (const auto& [label, targets] : out(n))
            for (auto t : targets)
                if (seen.insert(t).second) work.push_back(t);
    }
    Diagram result(*this);
    for (const auto& e : edges_)
        if (!seen.count(e.source)) result.remove_edge(e);
    result.nodes_ = seen;
    return result;
}

// ---------------------------------------------------------------------------
// Queries

bool aliased(const Diagram& g, const PathExpr& p, const PathExpr& q) {
    for (auto r : g.roots()) {
        auto vp = g.value_set_from(r, p);
        if (vp.empty()) continue;
        auto vq = g.value_set_from(r, q);
        for (auto n : vq)
            if (vp.count(n)) return true;
    }
    return false;
}

std::set<PathExpr> alias_set(const Diagram& g, const PathExpr& p, const ExprUniverse& universe) {
    std::set<PathExpr> result;
    for (const auto& q : universe)
        if (aliased(g, p, q)) result.insert(q);
    return result;
}

std::set<PathExpr> completions(const PathExpr& p, const ExprUniverse& universe) {
    std::set<PathExpr> result;
    for (const auto& w : universe)
        if (w.has_proper_prefix(p)) result.insert(w);
    return result;
}

namespace {

struct Signature {
    bool root = false;
    std::map<Label, std::size_t> out;
    std::map<Label, std::size_t> in;
    auto operator<=>(const Signature&) const = default;
};

std::map<NodeId, Signature> signatures(const Diagram& g) {
    std::map<NodeId, Signature> sig;
    for (auto n : g.nodes()) sig[n].root = g.roots().count(n) != 0;
    for (const auto& e : g.edges()) {
        ++sig[e.source].out[e.label];
        ++sig[e.target].in[e.label];
    }
    return sig;
}

} // namespace

bool isomorphic(const Diagram& a_full, const Diagram& b_full) {
    const Diagram a = a_full.reachable_part();
    const Diagram b = b_full.reachable_part();
    if (a.nodes().size() != b.nodes().size() || a.roots().size() != b.roots().size() ||
        a.edges().size() != b.edges().size())
        return false;

    auto sig_a = signatures(a);
    auto sig_b = signatures(b);
    {
        std::multiset<Signature> ma, mb;
        for (auto& [n, s] : sig_a) ma.insert(s);
        for (auto& [n, s] : sig_b) mb.insert(s);
        if (ma != mb) return false;
    }

    // BFS order keeps already-mapped neighbours close, which prunes early.
    std::vector<NodeId> order;
    {
        NodeSet seen;
        std::deque<NodeId> work(a.roots().begin(), a.roots().end());
        for (auto r : a.roots()) seen.insert(r);
        while (!work.empty()) {
            auto n = work.front();
            work.pop_front();
            order.push_back(n);
            for (const auto& [label, targets] : a.out(n))
                for (auto t : targets)
                    if (seen.insert(t).second) work.push_back(t);
        }
    }

    std::map<NodeId, NodeId> map_ab;
    std::set<NodeId> used_b;

    auto consistent = [&](NodeId na, NodeId nb) {
        for (const auto& [label, targets] : a.out(na)) {
            for (auto t : targets) {
                NodeId tb;
                if (t == na) tb = nb;
                else if (auto it = map_ab.find(t); it != map_ab.end()) tb = it->second;
                else continue;
                if (!b.has_edge(Edge{label, nb, tb})) return false;
            }
        }
        for (const auto& e : a.edges()) {
            if (e.target != na || e.source == na) continue;
            auto it = map_ab.find(e.source);
            if (it == map_ab.end()) continue;
            if (!b.has_edge(Edge{e.label, it->second, nb})) return false;
        }
        return true;
    };

    std::function<bool(std::size_t)> search = [&](std::size_t i) -> bool {
        if (i == order.size()) return true;
        NodeId na = order[i];
        for (auto nb : b.nodes()) {
            if (used_b.count(nb) || sig_a[na] != sig_b[nb]) continue;
            if (!consistent(na, nb)) continue;
            map_ab[na] = nb;
            used_b.insert(nb);
            if (search(i + 1)) return true;
            map_ab.erase(na);
            used_b.erase(nb);
        }
        return false;
    };
    return search(0);
}

} // namespace aliasgraph
