#include "support/oracles.hpp"

#include <functional>
#include <stdexcept>

namespace oracles {

namespace {

NodeId the_root(const Diagram& g) {
    if (g.roots().size() != 1) throw std::logic_error("oracle world must have one root");
    return *g.roots().begin();
}

enum class T3 { T, F, U };

T3 neg(T3 t) { return t == T3::T ? T3::F : t == T3::F ? T3::T : T3::U; }

T3 judge(const Diagram& w, const Cond& c) {
    NodeId r = the_root(w);
    switch (c.kind) {
    case Cond::Kind::Eq:
    case Cond::Kind::Neq: {
        T3 eq = T3::U;
        if (c.e == c.f) {
            eq = T3::T;
        } else {
            auto a = w.value_set_from(r, c.e);
            auto b = w.value_set_from(r, c.f);
            bool meet = false;
            for (auto x : a) meet = meet || b.count(x);
            if (!a.empty() && !b.empty() && !meet) eq = T3::F;
        }
        return c.kind == Cond::Kind::Eq ? eq : neg(eq);
    }
    case Cond::Kind::EqVoid:
    case Cond::Kind::NeqVoid: {
        T3 v = w.value_set_from(r, c.e).empty() ? T3::T : T3::U;
        return c.kind == Cond::Kind::EqVoid ? v : neg(v);
    }
    case Cond::Kind::Not: return neg(judge(w, c.inner.front()));
    }
    return T3::U;
}

void set_field(Diagram& w, NodeId m, const Label& a, const NodeSet& vs) {
    for (auto old : w.successors(m, a)) w.remove_edge(Edge{a, m, old});
    for (auto v : vs) w.add_edge(a, m, v);
}

void store(Diagram& w, const PathExpr& target, const NodeSet& vs) {
    NodeId r = the_root(w);
    const Label& a = target.segments().back();
    if (target.size() == 1) {
        set_field(w, r, a, vs);
        return;
    }
    for (auto m : w.value_set_from(r, target.prefix(target.size() - 1))) set_field(w, m, a, vs);
}

} // namespace

std::vector<Diagram> split_worlds(const Diagram& g) {
    std::vector<Diagram> out;
    for (auto r : g.roots()) {
        Diagram w = g;
        w.reroot({r});
        out.push_back(std::move(w));
    }
    return out;
}

void NaiveWorlds::apply(const Instr& in, std::vector<Diagram>& worlds) {
    std::visit(
        [&](const auto& n) {
            using X = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<X, Assign>) {
                std::vector<NodeSet> vals;
                for (auto& w : worlds)
                    vals.push_back(n.source.is_void ? NodeSet{} : w.value_set_from(the_root(w), n.source.path));
                for (std::size_t i = 0; i < worlds.size(); ++i) store(worlds[i], n.target, vals[i]);
            } else if constexpr (std::is_same_v<X, Create>) {
                for (auto& w : worlds) {
                    NodeId fresh;
                    if (cap_ == 0) {
                        fresh = w.include();
                    } else {
                        unsigned k = ++count_[&in];
                        if (k <= cap_) {
                            fresh = w.include();
                            if (k == cap_) reuse_[&in] = fresh;
                        } else {
                            fresh = reuse_.at(&in);
                            w.add_node(fresh);
                        }
                    }
                    store(w, n.target, {fresh});
                }
            } else if constexpr (std::is_same_v<X, Compound>) {
                worlds = run(n.body, std::move(worlds));
            } else if constexpr (std::is_same_v<X, Choice>) {
                std::vector<Diagram> all;
                for (const auto& b : n.branches) {
                    auto part = run(b, worlds);
                    for (auto& w : part) all.push_back(std::move(w));
                }
                worlds = std::move(all);
            } else if constexpr (std::is_same_v<X, Guard>) {
                bool all_false = !worlds.empty();
                for (const auto& w : worlds) all_false = all_false && judge(w, n.cond) == T3::F;
                if (!all_false) worlds = run(n.body, std::move(worlds));
            } else {
                throw std::logic_error("naive oracle: loops and calls are not supported");
            }
        },
        in.node);
}

std::vector<Diagram> NaiveWorlds::run(const Block& b, std::vector<Diagram> worlds) {
    for (const auto& in : b) apply(in, worlds);
    return worlds;
}

PairSet world_pairs(const std::vector<Diagram>& worlds, const ExprUniverse& E) {
    PairSet out;
    for (const auto& w : worlds) {
        auto ps = alias_pairs(w, E);
        out.insert(ps.begin(), ps.end());
    }
    return out;
}

// ---------------------------------------------------------------------------
// Concrete

namespace {

constexpr int kVoid = -1;

struct Heap {
    std::vector<std::map<std::string, int>> objs{1};

    int field(int o, const std::string& a) const {
        auto it = objs[o].find(a);
        return it == objs[o].end() ? kVoid : it->second;
    }
    // kVoid for a void result; nullopt when a void object is dereferenced.
    std::optional<int> eval(const PathExpr& p) const {
        int cur = 0;
        for (const auto& l : p.segments()) {
            if (cur == kVoid) return std::nullopt;
            cur = field(cur, l.name);
        }
        return cur;
    }
};

struct Aborted {};

class Concrete {
public:
    Concrete(const ExprUniverse& E, unsigned unroll) : E_(E), unroll_(unroll) {}

    PairSet pairs;
    std::size_t executions = 0;

    using K = std::function<void(const Heap&)>;

    void block(const Block& b, std::size_t i, const Heap& h, const K& k) {
        if (i == b.size()) {
            k(h);
            return;
        }
        instr(b[i], h, [&](const Heap& h2) { block(b, i + 1, h2, k); });
    }

    void finish(const Heap& h) {
        ++executions;
        std::vector<std::pair<std::string, int>> vals;
        for (const auto& p : E_) {
            auto v = h.eval(p);
            if (v && *v != kVoid) vals.push_back({p.str(), *v});
        }
        for (std::size_t i = 0; i < vals.size(); ++i)
            for (std::size_t j = i + 1; j < vals.size(); ++j)
                if (vals[i].second == vals[j].second && vals[i].first != vals[j].first) {
                    auto a = vals[i].first, b = vals[j].first;
                    if (b < a) std::swap(a, b);
                    pairs.insert({a, b});
                }
    }

private:
    const ExprUniverse& E_;
    unsigned unroll_;

    bool cond(const Heap& h, const Cond& c) {
        auto need = [&](const PathExpr& p) {
            auto v = h.eval(p);
            if (!v) throw Aborted{};
            return *v;
        };
        switch (c.kind) {
        case Cond::Kind::Eq: return need(c.e) == need(c.f);
        case Cond::Kind::Neq: return need(c.e) != need(c.f);
        case Cond::Kind::EqVoid: return need(c.e) == kVoid;
        case Cond::Kind::NeqVoid: return need(c.e) != kVoid;
        case Cond::Kind::Not: return !cond(h, c.inner.front());
        }
        return false;
    }

    void store(Heap& h, const PathExpr& target, int v) {
        int obj = 0;
        if (target.size() > 1) {
            auto o = h.eval(target.prefix(target.size() - 1));
            if (!o || *o == kVoid) throw Aborted{};
            obj = *o;
        }
        h.objs[obj][target.segments().back().name] = v;
    }

    void loop(const Loop& l, unsigned done, const Heap& h, const K& k) {
        k(h);
        if (done < unroll_) block(l.body, 0, h, [&](const Heap& h2) { loop(l, done + 1, h2, k); });
    }

    void instr(const Instr& in, const Heap& h, const K& k) {
        try {
            std::visit(
                [&](const auto& n) {
                    using X = std::decay_t<decltype(n)>;
                    if constexpr (std::is_same_v<X, Assign>) {
                        Heap h2 = h;
                        int v = kVoid;
                        if (!n.source.is_void) {
                            auto e = h.eval(n.source.path);
                            if (!e) throw Aborted{};
                            v = *e;
                        }
                        store(h2, n.target, v);
                        k(h2);
                    } else if constexpr (std::is_same_v<X, Create>) {
                        Heap h2 = h;
                        h2.objs.emplace_back();
                        store(h2, n.target, static_cast<int>(h2.objs.size()) - 1);
                        k(h2);
                    } else if constexpr (std::is_same_v<X, Compound>) {
                        block(n.body, 0, h, k);
                    } else if constexpr (std::is_same_v<X, Choice>) {
                        for (const auto& b : n.branches) block(b, 0, h, k);
                    } else if constexpr (std::is_same_v<X, Guard>) {
                        if (cond(h, n.cond)) block(n.body, 0, h, k);
                    } else if constexpr (std::is_same_v<X, Loop>) {
                        loop(n, 0, h, k);
                    } else {
                        throw std::logic_error("concrete oracle: calls are not supported");
                    }
                },
                in.node);
        } catch (const Aborted&) {
            // this execution fails at run time; nothing to observe
        }
    }
};

std::size_t g_last_executions = 0;

} // namespace

PairSet concrete_pairs(const Block& b, const ExprUniverse& E, unsigned unroll) {
    Concrete c(E, unroll);
    c.block(b, 0, Heap{}, [&](const Heap& h) { c.finish(h); });
    g_last_executions = c.executions;
    return c.pairs;
}

std::size_t last_execution_count() { return g_last_executions; }

// ---------------------------------------------------------------------------
// Loop oracle

Diagram iterated_union(const Block& body, const Diagram& g, unsigned cap, unsigned max_rounds) {
    NaiveWorlds interp(cap);
    Diagram u = g;
    for (unsigned i = 0; i < max_rounds; ++i) {
        std::vector<Diagram> one{u};
        one = interp.run(body, std::move(one));
        Diagram next = unite(u, one.front());
        if (next.nodes() == u.nodes() && next.edges() == u.edges()) return u;
        u = std::move(next);
    }
    throw std::runtime_error("iterated union did not stabilize");
}

} // namespace oracles
