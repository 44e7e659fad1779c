#include "support/fixtures.hpp"

#include <cstdlib>
#include <iostream>

namespace fixtures {

NodeId n(unsigned v) { return NodeId{v}; }

NodeSet nodes(std::initializer_list<unsigned> vs) {
    NodeSet out;
    for (auto v : vs) out.insert(n(v));
    return out;
}

PathExpr path(const std::string& text) { return PathExpr::parse(text); }

Diagram diagram(const std::vector<EdgeSpec>& edges, const std::vector<unsigned>& roots) {
    Diagram g;
    for (auto r : roots) g.add_node(n(r));
    for (const auto& e : edges) {
        g.add_node(n(e.from));
        g.add_node(n(e.to));
        Label l = Label::field(e.label);
        if (!e.label.empty() && e.label.back() == '\'') l = Label::back(e.label.substr(0, e.label.size() - 1), 1);
        g.add_edge(l, n(e.from), n(e.to));
    }
    NodeSet rs;
    for (auto r : roots) rs.insert(n(r));
    g.reroot(rs);
    return g;
}

Program parse(const std::string& text) {
    try {
        return parse_program(text, "fixture.oo");
    } catch (const ParseError& e) {
        for (const auto& d : e.diagnostics()) std::cerr << d.str() << '\n';
        std::abort();
    }
}

const Block& body(const Program& p, const std::string& cls, const std::string& routine) {
    const RoutineDecl* r = p.classes.lookup_routine(cls, routine);
    if (!r) {
        std::cerr << "fixture: no routine " << cls << "." << routine << '\n';
        std::abort();
    }
    return r->body;
}

Diagram run(const Program& p, const std::string& cls, const std::string& routine, Diagram g, AnalysisOptions opts) {
    Engine e(p, opts);
    e.execute(g, body(p, cls, routine), cls);
    return g;
}

Diagram figure2a() { return diagram({{"a", 0, 1}, {"d", 0, 1}, {"b", 1, 2}, {"c", 0, 2}}); }

Diagram figure2b() {
    Diagram g = diagram({{"v", 0, 4}, {"w", 0, 4}, {"x", 4, 2}});
    return g;
}

Diagram abx() { return diagram({{"a", 0, 1}, {"b", 0, 2}, {"x", 0, 3}}); }

Diagram figure14() { return diagram({{"a", 0, 1}, {"b", 0, 3}, {"x", 0, 2}}); }

} // namespace fixtures
