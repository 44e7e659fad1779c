// query.cpp

#include "aliasgraph/query.hpp"

#include <json.hpp>

#include <deque>
#include <sstream>

namespace aliasgraph {

std::set<PathExpr> diagram_paths(const Diagram& g, unsigned k) {
    std::set<PathExpr> out;
    // (path, nodes reached) frontier; paths are unique per level.
    std::map<PathExpr, NodeSet> level{{PathExpr{}, g.roots()}};
    for (unsigned len = 1; len <= k && !level.empty(); ++len) {
        std::map<PathExpr, NodeSet> next;
        for (const auto& [p, nodes] : level)
            for (auto n : nodes)
                for (const auto& [label, targets] : g.out(n)) {
                    if (label.kind == LabelKind::Back || label.kind == LabelKind::Fresh) continue;
                    auto& slot = next[p.then(label)];
                    slot.insert(targets.begin(), targets.end());
                }
        for (const auto& [p, nodes] : next) out.insert(p);
        level = std::move(next);
    }
    return out;
}

std::set<PathExpr> query_alias(const Diagram& g, const PathExpr& p, const ExprUniverse& universe,
                               std::optional<unsigned> depth) {
    if (depth && *depth < p.size())
        throw QueryError("depth bound " + std::to_string(*depth) + " is shorter than '" + p.str() + "'");
    std::set<PathExpr> candidates = universe.members();
    if (depth) {
        auto more = diagram_paths(g, *depth);
        candidates.insert(more.begin(), more.end());
    }
    std::set<PathExpr> out;
    for (const auto& q : candidates)
        if (q != p && aliased(g, p, q)) out.insert(q);
    return out;
}

PairSet alias_pairs(const Diagram& g, const ExprUniverse& universe) {
    std::vector<PathExpr> es(universe.begin(), universe.end());
    PairSet out;
    for (std::size_t i = 0; i < es.size(); ++i)
        for (std::size_t j = i + 1; j < es.size(); ++j) {
            auto a = es[i].str();
            auto b = es[j].str();
            if (a == b || !aliased(g, es[i], es[j])) continue;
            if (b < a) std::swap(a, b);
            out.insert({a, b});
        }
    return out;
}

PathExpr scoped_path(const RoutineDecl* routine, std::string_view text) {
    PathExpr raw = PathExpr::parse(text);
    if (raw.is_current() || !routine) return raw;
    auto segs = raw.segments();
    const auto& first = segs.front().name;
    bool local = first == "Result" && routine->result_type;
    for (const auto& v : routine->formals) local = local || v.name == first;
    for (const auto& v : routine->locals) local = local || v.name == first;
    if (local) segs.front() = Label::local(first, 0);
    return PathExpr{std::move(segs)};
}

// ---------------------------------------------------------------------------
// Shape checks

namespace {

NodeSet step(const Diagram& g, const NodeSet& from, const Label& l) { return g.image(from, l); }

// V_r(p.tl^i) for i = 0..k.
std::vector<NodeSet> tails(const Diagram& g, NodeId r, const PathExpr& p, const Label& tl, unsigned k) {
    std::vector<NodeSet> out{g.value_set_from(r, p)};
    for (unsigned i = 1; i <= k; ++i) out.push_back(step(g, out.back(), tl));
    return out;
}

std::vector<NodeSet> heads(const Diagram& g, const std::vector<NodeSet>& ts, const Label& hd) {
    std::vector<NodeSet> out;
    for (const auto& t : ts) out.push_back(step(g, t, hd));
    return out;
}

bool meet(const NodeSet& a, const NodeSet& b) {
    for (auto n : a)
        if (b.count(n)) return true;
    return false;
}

bool on_cycle(const Diagram& g, NodeId n, const Label& via) {
    NodeSet seen;
    std::deque<NodeId> work;
    for (auto s : g.successors(n, via)) {
        if (seen.insert(s).second) work.push_back(s);
    }
    while (!work.empty()) {
        auto m = work.front();
        work.pop_front();
        if (m == n) return true;
        for (auto s : g.successors(m, via))
            if (seen.insert(s).second) work.push_back(s);
    }
    return false;
}

} // namespace

bool check_acyclic(const Diagram& g, const PathExpr& p, const Label& via, unsigned k) {
    for (auto r : g.roots())
        for (const auto& level : tails(g, r, p, via, k))
            for (auto n : level)
                if (on_cycle(g, n, via)) return false;
    return true;
}

bool check_successive_heads(const Diagram& g, const PathExpr& y, const Label& hd, const Label& tl, unsigned k) {
    for (auto r : g.roots()) {
        auto h = heads(g, tails(g, r, y, tl, k), hd);
        for (unsigned i = 0; i + 1 < h.size(); ++i)
            if (meet(h[i], h[i + 1])) return false;
    }
    return true;
}

bool check_disjoint_tails(const Diagram& g, const PathExpr& x, const PathExpr& y, const Label& tl, unsigned k) {
    for (auto r : g.roots()) {
        auto tx = tails(g, r, x, tl, k);
        auto ty = tails(g, r, y, tl, k);
        for (const auto& a : tx)
            for (const auto& b : ty)
                if (meet(a, b)) return false;
    }
    return true;
}

bool check_pairwise_heads(const Diagram& g, const PathExpr& x, const PathExpr& y, const Label& hd,
                          const Label& tl, unsigned k) {
    for (auto r : g.roots()) {
        auto hx = heads(g, tails(g, r, x, tl, k), hd);
        auto hy = heads(g, tails(g, r, y, tl, k), hd);
        for (std::size_t i = 0; i < hx.size(); ++i)
            for (std::size_t j = 0; j < hy.size(); ++j)
                if (i != j && meet(hx[i], hy[j])) return false;
    }
    return true;
}

bool check_unaliased_y(const Diagram& g, const PathExpr& x, const PathExpr& y, const Label& hd, const Label& tl,
                       unsigned k) {
    for (auto r : g.roots()) {
        auto tx = tails(g, r, x, tl, k);
        auto ty = tails(g, r, y, tl, k);
        auto hx = heads(g, tx, hd);
        auto hy = heads(g, ty, hd);
        for (std::size_t i = 0; i < hy.size(); ++i) {
            for (std::size_t j = 0; j < ty.size(); ++j) {
                if (meet(hy[i], ty[j])) return false;
                if (j != i && meet(hy[i], hy[j])) return false;
            }
            for (std::size_t j = 0; j < tx.size(); ++j)
                if (meet(hy[i], hx[j]) || meet(hy[i], tx[j])) return false;
        }
    }
    return true;
}

bool has_unaliased_world(const Diagram& g, const PathExpr& x, const PathExpr& y, const Label& hd, const Label& tl,
                         unsigned k) {
    for (auto r : g.roots()) {
        auto hx = heads(g, tails(g, r, x, tl, k), hd);
        auto hy = heads(g, tails(g, r, y, tl, k), hd);
        bool clean = true;
        for (const auto& a : hx)
            for (const auto& b : hy) clean = clean && !meet(a, b);
        if (clean) return true;
    }
    return false;
}

DeutschResult check_deutsch(const Diagram& at_l2, const Diagram& at_l3, const PathExpr& x, const PathExpr& y,
                            const Label& hd, const Label& tl, unsigned k) {
    DeutschResult d;
    d.p1 = check_acyclic(at_l2, x, tl, k) && check_acyclic(at_l2, y, tl, k);
    d.p2 = check_successive_heads(at_l2, y, hd, tl, k);
    d.p3 = check_disjoint_tails(at_l2, x, y, tl, k);
    d.p4 = check_pairwise_heads(at_l2, x, y, hd, tl, k);
    d.p5 = check_unaliased_y(at_l3, x, y, hd, tl, k);
    d.unaliased_world = has_unaliased_world(at_l2, x, y, hd, tl, k);
    return d;
}

// ---------------------------------------------------------------------------
// JSON

namespace {

using nlohmann::json;

json pairs_json(const PairSet& ps) {
    json arr = json::array();
    for (const auto& [a, b] : ps) arr.push_back(json::array({a, b}));
    return arr;
}

PairSet pairs_from(const json& arr) {
    PairSet out;
    for (const auto& p : arr) {
        if (!p.is_array() || p.size() != 2) throw QueryError("malformed alias pair");
        auto a = p[0].get<std::string>();
        auto b = p[1].get<std::string>();
        if (b < a) std::swap(a, b);
        out.insert({a, b});
    }
    return out;
}

} // namespace

std::string emit_json(const AnalysisReport& r) {
    json j;
    j["program"] = r.program;
    j["entry"] = r.entry;
    json points = json::array();
    for (const auto& p : r.points) points.push_back({{"label", p.label}, {"pairs", pairs_json(p.pairs)}});
    j["points"] = points;
    j["final"] = {{"pairs", pairs_json(r.final_pairs)}};
    j["diagnostics"] = r.diagnostics;
    if (r.deutsch) j["deutsch"] = *r.deutsch;
    if (!r.queries.empty()) {
        json qs = json::array();
        for (const auto& q : r.queries) qs.push_back({{"path", q.path}, {"at", q.at}, {"aliases", q.aliases}});
        j["queries"] = qs;
    }
    return j.dump(2) + "\n";
}

AnalysisReport report_from_json(std::string_view text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw QueryError(std::string("invalid report: ") + e.what());
    }
    AnalysisReport r;
    try {
        r.program = j.value("program", "");
        r.entry = j.value("entry", "");
        if (j.contains("points"))
            for (const auto& p : j["points"]) r.points.push_back({p.at("label").get<std::string>(), pairs_from(p.at("pairs"))});
        if (j.contains("final")) r.final_pairs = pairs_from(j["final"].at("pairs"));
        if (j.contains("diagnostics")) r.diagnostics = j["diagnostics"].get<std::vector<std::string>>();
        if (j.contains("deutsch")) r.deutsch = j["deutsch"].get<std::map<std::string, std::string>>();
        if (j.contains("queries"))
            for (const auto& q : j["queries"])
                r.queries.push_back({q.at("path").get<std::string>(), q.value("at", ""),
                                     q.at("aliases").get<std::vector<std::string>>()});
    } catch (const json::exception& e) {
        throw QueryError(std::string("invalid report: ") + e.what());
    }
    return r;
}

// ---------------------------------------------------------------------------
// DOT

namespace {

std::string quoted(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    return out + "\"";
}

} // namespace

std::string emit_dot(const Diagram& g) {
    std::ostringstream os;
    os << "digraph alias {\n";
    os << "  node [shape=circle];\n";
    for (auto n : g.nodes()) {
        os << "  " << n.str();
        if (g.roots().count(n)) os << " [peripheries=2]";
        os << ";\n";
    }
    for (auto n : g.nodes())
        for (const auto& [label, targets] : g.out(n))
            for (auto t : targets) {
                os << "  " << n.str() << " -> " << t.str() << " [label=" << quoted(label.display());
                if (label.primed()) os << ", style=dashed";
                os << "];\n";
            }
    os << "}\n";
    return os.str();
}

} // namespace aliasgraph
