#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "aliasgraph/diagram.hpp"
#include "support/fixtures.hpp"

#include <random>

using namespace aliasgraph;
using namespace fixtures;

namespace {

const ExprUniverse kE{path("a"), path("b"), path("c"), path("d"), path("a.b"), path("d.b")};

EdgeSet field_edges(std::initializer_list<EdgeSpec> es) {
    EdgeSet out;
    for (const auto& e : es) out.insert(Edge{Label::field(e.label), n(e.from), n(e.to)});
    return out;
}

// Plain walk used as an independent check of value_set.
NodeSet walk(const Diagram& g, const PathExpr& p) {
    NodeSet cur = g.roots();
    for (const auto& l : p.segments()) {
        NodeSet next;
        for (const auto& e : g.edges())
            if (e.label == l && cur.count(e.source)) next.insert(e.target);
        cur = next;
    }
    return cur;
}

Diagram random_diagram(std::mt19937& rng, std::shared_ptr<NodeCounter> counter) {
    Diagram g(counter);
    NodeId root = g.root();
    std::vector<NodeId> ns{root};
    for (int i = 0; i < 3; ++i) ns.push_back(g.include());
    const char* labels[] = {"a", "b", "c"};
    std::uniform_int_distribution<std::size_t> pick(0, ns.size() - 1);
    for (int i = 0; i < 6; ++i) g.add_edge(Label::field(labels[i % 3]), ns[pick(rng)], ns[pick(rng)]);
    return g;
}

} // namespace

TEST_CASE("path expressions") {
    CHECK(path("a.b").str() == "a.b");
    CHECK(path("Current").is_current());
    CHECK(path("").is_current());
    CHECK(path("a").concat(path("Current")) == path("a"));
    CHECK(path("Current").concat(path("a")) == path("a"));
    CHECK(path("a.b").concat(path("c")) == path("a").concat(path("b.c")));
    CHECK(path("a.b.c").has_proper_prefix(path("a.b")));
    CHECK_FALSE(path("a.b").has_proper_prefix(path("a.b")));
    CHECK_THROWS_AS(PathExpr::parse("a..b"), DiagramError);
}

TEST_CASE("expression universe is prefix closed") {
    ExprUniverse E;
    E.insert(path("a.b.c"));
    CHECK(E.contains(path("a")));
    CHECK(E.contains(path("a.b")));
    CHECK(E.size() == 3);
}

TEST_CASE("value_set") {
    Diagram g = figure2a();
    CHECK(g.value_set(path("a.b")) == nodes({2}));
    CHECK(g.value_set(path("Current")) == g.roots());
    CHECK(g.value_set(path("a.b.b")).empty());
    CHECK(g.value_set(path("zzz")).empty());
    for (const auto& p : kE) CHECK(g.value_set(p) == walk(g, p));
}

TEST_CASE("alias_set") {
    Diagram g = figure2a();
    CHECK(alias_set(g, path("c"), kE) == std::set<PathExpr>{path("c"), path("a.b"), path("d.b")});
    CHECK(alias_set(g, path("zzz"), kE).empty());
    // brute force over all pairs
    std::set<PathExpr> want;
    for (const auto& q : kE) {
        NodeSet a = walk(g, path("a")), b = walk(g, q);
        for (auto x : a)
            if (b.count(x)) want.insert(q);
    }
    CHECK(want == std::set<PathExpr>{path("a"), path("d")});
    CHECK(alias_set(g, path("a"), kE) == want);
}

TEST_CASE("alias_set is symmetric") {
    Diagram g = figure2a();
    for (const auto& p : kE)
        for (const auto& q : kE) CHECK(alias_set(g, p, kE).count(q) == alias_set(g, q, kE).count(p));
}

TEST_CASE("alias_set is judged root by root") {
    // two roots: a and b point to the same node, but from different roots
    Diagram g = diagram({{"a", 0, 2}, {"b", 1, 2}}, {0, 1});
    CHECK_FALSE(aliased(g, path("a"), path("b")));
    g.add_edge(Label::field("b"), n(0), n(2));
    CHECK(aliased(g, path("a"), path("b")));
}

TEST_CASE("completions") {
    CHECK(completions(path("d"), kE) == std::set<PathExpr>{path("d.b")});
    CHECK(completions(path("a.b"), kE).empty());
    std::set<PathExpr> all(kE.begin(), kE.end());
    CHECK(completions(path("Current"), kE) == all);
}

TEST_CASE("link") {
    Diagram g = figure2a();
    auto before = g.edges();
    g.link(Label::field("f"), nodes({1}));
    CHECK(g.has_edge(Edge{Label::field("f"), n(0), n(1)}));
    CHECK(g.edges().size() == before.size() + 1);

    Diagram h = figure2a();
    h.link(Label::field("t"), {});
    CHECK(h == figure2a());

    Diagram two = diagram({{"a", 0, 2}}, {0, 1});
    auto count = two.edges().size();
    two.link(Label::field("t"), nodes({2}));
    CHECK(two.edges().size() == count + 2);

    CHECK_THROWS_AS(figure2a().link(Label::field("t"), nodes({42})), DiagramError);
}

TEST_CASE("unlink") {
    Diagram g = figure2a();
    g.unlink(Label::field("d"));
    CHECK(g.edges() == field_edges({{"a", 0, 1}, {"b", 1, 2}, {"c", 0, 2}}));

    Diagram h = figure2a();
    h.unlink(Label::field("q"));
    CHECK(h == figure2a());

    Diagram k = diagram({{"t", 0, 1}, {"t", 1, 2}});
    k.unlink(Label::field("t"));
    CHECK(k.edges() == field_edges({{"t", 1, 2}}));
}

TEST_CASE("unlink list") {
    Diagram g = figure2a();
    std::vector<Label> cd{Label::field("c"), Label::field("d")};
    g.unlink(cd);
    CHECK(g.edges() == field_edges({{"a", 0, 1}, {"b", 1, 2}}));

    Diagram h = figure2a();
    h.unlink(std::vector<Label>{});
    CHECK(h == figure2a());

    Diagram twice = figure2a(), once = figure2a();
    twice.unlink(std::vector<Label>{Label::field("a"), Label::field("a")});
    once.unlink(Label::field("a"));
    CHECK(twice == once);

    Diagram dc = figure2a();
    dc.unlink(std::vector<Label>{Label::field("d"), Label::field("c")});
    CHECK(dc.edges() == g.edges());
}

TEST_CASE("relink") {
    Diagram g = figure2a();
    g.relink(Label::field("a"), nodes({2}));
    CHECK(g.has_edge(Edge{Label::field("a"), n(0), n(2)}));
    CHECK_FALSE(g.has_edge(Edge{Label::field("a"), n(0), n(1)}));

    Diagram same = figure2a();
    same.relink(Label::field("a"), same.value_set(path("a")));
    CHECK(same == figure2a());

    Diagram r = figure2a(), u = figure2a();
    r.relink(Label::field("d"), {});
    u.unlink(Label::field("d"));
    CHECK(r == u);
}

TEST_CASE("unlink after link drops pre-existing edges too; relink is unlink then link") {
    Diagram a = figure2a(), b = figure2a();
    a.link(Label::field("a"), nodes({2}));
    a.unlink(Label::field("a"));
    b.unlink(Label::field("a"));
    CHECK(a == b);

    Diagram r = figure2a(), s = figure2a();
    r.relink(Label::field("c"), nodes({1}));
    s.unlink(Label::field("c"));
    s.link(Label::field("c"), nodes({1}));
    CHECK(r.edges() == s.edges());
}

TEST_CASE("bulk_link") {
    Diagram g = figure2a();
    std::vector<Label> formals{Label::field("c"), Label::field("d")};
    std::vector<PathExpr> actuals{path("a"), path("a.b")};
    g.bulk_link(formals, actuals);
    CHECK(g.has_edge(Edge{Label::field("c"), n(0), n(1)}));
    CHECK(g.has_edge(Edge{Label::field("d"), n(0), n(2)}));

    Diagram h = figure2a();
    h.bulk_link(std::vector<Label>{}, std::vector<PathExpr>{});
    CHECK(h == figure2a());

    Diagram self = figure2a();
    self.bulk_link(std::vector<Label>{Label::field("a")}, std::vector<PathExpr>{path("a")});
    CHECK(self == figure2a());

    // all values are taken before any link: x gets V(y), y gets the old V(x)
    Diagram swap = diagram({{"x", 0, 1}, {"y", 0, 2}});
    swap.bulk_link(std::vector<Label>{Label::field("y"), Label::field("x")},
                   std::vector<PathExpr>{path("x"), path("y")});
    CHECK(swap.value_set(path("y")) == nodes({1, 2}));
    CHECK(swap.value_set(path("x")) == nodes({1, 2}));

    CHECK_THROWS_AS(figure2a().bulk_link(formals, std::vector<PathExpr>{path("a")}), DiagramError);
}

TEST_CASE("reroot") {
    Diagram g = figure2a();
    g.reroot(nodes({2}));
    CHECK(g.roots() == nodes({2}));
    CHECK(g.edges() == figure2a().edges());

    Diagram same = figure2a();
    same.reroot(same.roots());
    CHECK(same == figure2a());

    Diagram r = figure2a();
    r.reroot(nodes({1}));
    CHECK(r.value_set(path("b")) == nodes({2}));

    CHECK_THROWS_AS(figure2a().reroot({}), DiagramError);
    CHECK_THROWS_AS(figure2a().reroot(nodes({9})), DiagramError);
}

TEST_CASE("include") {
    Diagram g = figure2a();
    NodeId a = g.include();
    NodeId b = g.include();
    CHECK(a != b);
    CHECK(g.contains(a));
    CHECK(g.out(a).empty());
    Diagram before = figure2a();
    for (const auto& p : kE) CHECK(g.value_set(p) == before.value_set(p));
}

TEST_CASE("union") {
    Diagram g = figure2a();
    Diagram g1 = figure2b();
    Diagram u = unite(g, g1);
    CHECK(u.edges() == field_edges({{"a", 0, 1}, {"d", 0, 1}, {"c", 0, 2}, {"b", 1, 2}, {"v", 0, 4}, {"w", 0, 4},
                                    {"x", 4, 2}}));
    CHECK(unite(g, g) == g);

    std::mt19937 rng(3);
    auto counter = std::make_shared<NodeCounter>();
    for (int i = 0; i < 20; ++i) {
        Diagram a = random_diagram(rng, counter), b = random_diagram(rng, counter), c = random_diagram(rng, counter);
        CHECK(unite(a, b) == unite(b, a));
        CHECK(unite(unite(a, b), c) == unite(a, unite(b, c)));
    }
}

TEST_CASE("union never loses aliasing") {
    Diagram g = figure2a();
    Diagram h = diagram({{"a", 0, 3}, {"c", 0, 3}});
    Diagram u = unite(g, h);
    for (const auto& p : kE) {
        auto got = alias_set(u, p, kE);
        for (const auto& q : alias_set(g, p, kE)) CHECK(got.count(q));
        for (const auto& q : alias_set(h, p, kE)) CHECK(got.count(q));
    }
}

TEST_CASE("clone") {
    Diagram g = figure2a();
    auto [c, phi] = g.clone();
    for (auto x : c.nodes()) CHECK_FALSE(g.contains(x));
    CHECK(isomorphic(g, c));
    CHECK(c.edges().size() == g.edges().size());
    for (const auto& p : kE) {
        NodeSet image;
        for (auto x : g.value_set(p)) image.insert(phi.at(x));
        CHECK(c.value_set(p) == image);
    }

    Diagram lone;
    auto [lc, lphi] = lone.clone();
    CHECK(lc.roots().size() == 1);
    CHECK(lc.edges().empty());
    CHECK(*lc.roots().begin() != lone.root());
}

TEST_CASE("clone_roots") {
    Diagram g = figure14();
    auto added = g.clone_roots(1);
    REQUIRE(added.size() == 1);
    CHECK(g.roots().size() == 2);
    CHECK(g.out(added[0]).empty());
    CHECK(g.edges() == figure14().edges());

    Diagram h = figure14();
    CHECK(h.clone_roots(0).empty());
    CHECK(h == figure14());

    Diagram k = figure14();
    k.clone_roots(3);
    CHECK(k.roots().size() == 4);
}

TEST_CASE("dot distribution") {
    Diagram g = diagram({{"a", 0, 1}, {"b", 0, 2}, {"d", 1, 1}});
    Label back = Label::back("b", 1);
    Diagram before = g;
    g.dot_distribute(path("b"), back);
    CHECK(g.has_edge(Edge{back, n(2), n(0)}));
    CHECK(g.edges().size() == before.edges().size() + 1);
    for (const auto& p : {path("a"), path("b"), path("a.d"), path("a.d.d")}) CHECK(g.value_set(p) == before.value_set(p));

    Diagram f8 = abx();
    f8.dot_distribute(path("a"), Label::back("a", 1));
    CHECK(f8.has_edge(Edge{Label::back("a", 1), n(1), n(0)}));
    CHECK(Label::back("a", 1).display() == "a'@1");

    CHECK_THROWS_AS(figure2a().dot_distribute(path("zzz"), back), DiagramError);
}

TEST_CASE("per-root dot distribution points back only to the root it came from") {
    Diagram g = diagram({{"x", 0, 2}, {"x", 1, 3}}, {0, 1});
    g.dot_distribute_per_root(path("x"), Label::back("x", 1));
    CHECK(g.has_edge(Edge{Label::back("x", 1), n(2), n(0)}));
    CHECK(g.has_edge(Edge{Label::back("x", 1), n(3), n(1)}));
    CHECK_FALSE(g.has_edge(Edge{Label::back("x", 1), n(2), n(1)}));
}

TEST_CASE("invariants survive every operation") {
    Diagram g = figure2a();
    auto ok = [](const Diagram& d) {
        if (d.roots().empty()) return false;
        for (auto r : d.roots())
            if (!d.contains(r)) return false;
        for (const auto& e : d.edges())
            if (!d.contains(e.source) || !d.contains(e.target)) return false;
        return true;
    };
    g.link(Label::field("z"), nodes({2}));
    CHECK(ok(g));
    g.unlink(Label::field("a"));
    CHECK(ok(g));
    g.reroot(nodes({1, 2}));
    CHECK(ok(g));
    g.include();
    CHECK(ok(g));
    g.remove_label(Label::field("b"));
    CHECK(ok(g));
    CHECK(ok(unite(g, figure2b())));
}

TEST_CASE("isomorphism") {
    CHECK(isomorphic(figure2a(), diagram({{"a", 5, 7}, {"d", 5, 7}, {"b", 7, 9}, {"c", 5, 9}}, {5})));
    CHECK_FALSE(isomorphic(figure2a(), diagram({{"a", 0, 1}, {"d", 0, 2}, {"b", 1, 2}, {"c", 0, 2}})));
    // unreachable junk is ignored
    Diagram junk = figure2a();
    NodeId j = junk.include();
    junk.add_edge(Label::field("a"), j, n(1));
    CHECK(isomorphic(junk, figure2a()));
    // roots must map onto roots
    CHECK_FALSE(isomorphic(diagram({{"a", 0, 1}}, {0}), diagram({{"a", 0, 1}}, {0, 1})));
}
