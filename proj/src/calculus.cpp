// calculus.cpp - rule engine over alias diagrams.

#include "aliasgraph/calculus.hpp"

#include <algorithm>
#include <deque>

namespace aliasgraph {

std::string to_string(Tri t) {
    switch (t) {
    case Tri::True: return "true";
    case Tri::False: return "false";
    case Tri::Unknown: return "unknown";
    }
    return "unknown";
}

namespace {

Tri negate(Tri t) {
    if (t == Tri::True) return Tri::False;
    if (t == Tri::False) return Tri::True;
    return Tri::Unknown;
}

bool disjoint(const NodeSet& a, const NodeSet& b) {
    for (auto n : a)
        if (b.count(n)) return false;
    return true;
}

bool heap_label(const Label& l) { return l.kind == LabelKind::Field || l.kind == LabelKind::Fresh; }

} // namespace

Engine::Engine(const Program& program, AnalysisOptions options, EngineHooks hooks)
    : program_(program), options_(options), hooks_(std::move(hooks)) {
    if (options_.cap == 0) options_.cap = 1;
    if (options_.max_iters == 0) options_.max_iters = 1;
    g_.set_listener(this);
}

Engine::~Engine() { g_.set_listener(nullptr); }

void Engine::edge_added(const Edge& e) {
    for (auto* log : logs_) log->on_add(e);
}

void Engine::edge_removed(const Edge& e) {
    for (auto* log : logs_) log->on_remove(e);
}

void Engine::reset(Diagram g) {
    g_ = std::move(g);
    g_.set_listener(this);
    logs_.clear();
    frames_.clear();
    fixpoint_depth_ = 0;
    create_count_.clear();
    fx_node_.clear();
    memo_.clear();
    origin_.clear();
    points_.clear();
    diags_.clear();
    diag_seen_.clear();
    ceiling_hit_ = false;
    stats_ = {};
}

void Engine::diag(Diagnostic::Severity sev, SourceLoc loc, std::string msg) {
    std::string key = std::to_string(loc.line) + ":" + std::to_string(loc.col) + ":" + msg;
    if (!diag_seen_.insert(key).second) return;
    diags_.push_back({sev, program_.file, loc, std::move(msg)});
}

NodeId Engine::origin(NodeId n) const {
    auto it = origin_.find(n);
    return it == origin_.end() ? n : it->second;
}

std::uint32_t Engine::site_id(const void* key) {
    auto [it, fresh] = sites_.emplace(key, static_cast<std::uint32_t>(sites_.size()));
    (void)fresh;
    return it->second;
}

PathExpr Engine::retag(const PathExpr& p) const {
    if (p.is_current() || p.segments()[0].kind != LabelKind::Local) return p;
    std::uint32_t depth = frames_.empty() ? 0 : frames_.back().depth;
    auto segs = p.segments();
    segs[0].tag = depth;
    return PathExpr{std::move(segs)};
}

NodeSet Engine::values_from(NodeId root, const Operand& o) const {
    if (o.is_void) return {};
    return g_.value_set_from(root, retag(o.path));
}

Engine::RootValues Engine::values(const Operand& o) const {
    RootValues out;
    for (auto r : g_.roots()) out[r] = values_from(r, o);
    return out;
}

// ---------------------------------------------------------------------------
// Assignment and creation

// Per-root reach over every label, the root included.
std::map<NodeId, NodeSet> Engine::reach_by_root() const {
    std::map<NodeId, NodeSet> out;
    for (auto r : g_.roots()) {
        NodeSet& seen = out[r];
        seen.insert(r);
        std::deque<NodeId> work{r};
        while (!work.empty()) {
            auto n = work.front();
            work.pop_front();
            for (const auto& [label, targets] : g_.out(n))
                for (auto t : targets)
                    if (seen.insert(t).second) work.push_back(t);
        }
    }
    return out;
}

// Worlds share every node a choice did not touch. Before a strong update of
// such a node, the worlds that would see different results get their own
// copy of it and of every node leading to it. Returns the nodes still shared
// by disagreeing worlds (only when the memo inside a fixpoint folds copies
// back together); those get a weak update.
NodeSet Engine::privatize(const PathExpr& x, RootValues& vals, std::uint32_t site) {
    auto denoted = [&](NodeId r) { return x.size() == 0 ? NodeSet{r} : g_.value_set_from(r, x); };
    using Key = std::optional<NodeSet>;
    for (unsigned round = 0;; ++round) {
        if (g_.roots().size() < 2) return {};
        auto reach = reach_by_root();
        std::map<NodeId, NodeSet> X;
        NodeSet targets;
        for (auto r : g_.roots()) {
            X[r] = denoted(r);
            targets.insert(X[r].begin(), X[r].end());
        }
        NodeSet conflicts;
        std::optional<std::pair<NodeId, std::map<Key, NodeSet>>> first;
        for (auto m : targets) {
            std::map<Key, NodeSet> classes;
            for (auto r : g_.roots()) {
                if (!reach[r].count(m)) continue;
                Key k;
                if (X[r].count(m)) k = vals[r];
                classes[k].insert(r);
            }
            if (classes.size() < 2) continue;
            conflicts.insert(m);
            if (!first) first.emplace(m, std::move(classes));
        }
        if (conflicts.empty() || round >= 8) return conflicts;
        ++stats_.privatizations;

        const NodeId m = first->first;
        // ancestors of m
        std::map<NodeId, std::vector<NodeId>> pred;
        for (const auto& e : g_.edges()) pred[e.target].push_back(e.source);
        NodeSet anc{m};
        std::deque<NodeId> work{m};
        while (!work.empty()) {
            auto n = work.front();
            work.pop_front();
            for (auto p : pred[n])
                if (anc.insert(p).second) work.push_back(p);
        }

        NodeSet roots = g_.roots();
        std::vector<Edge> fresh_edges;
        RootValues moved;
        std::size_t k = 0;
        for (const auto& [key, K] : first->second) {
            if (k++ == 0) continue; // the first class keeps the originals
            NodeSet C;
            for (auto r : K)
                for (auto n : reach[r])
                    if (anc.count(n)) C.insert(n);
            std::map<NodeId, NodeId> phi;
            for (auto c : C) phi[c] = clone_node(site, 1000 + k, c);
            auto map_node = [&](NodeId n) {
                auto it = phi.find(n);
                return it == phi.end() ? n : it->second;
            };
            for (auto c : C)
                for (const auto& [label, ts] : g_.out(c))
                    for (auto t : ts) fresh_edges.push_back({label, phi.at(c), map_node(t)});
            for (auto r : K) {
                roots.erase(r);
                NodeId nr = map_node(r);
                roots.insert(nr);
                NodeSet vs;
                for (auto v : vals[r]) vs.insert(map_node(v));
                moved[nr].insert(vs.begin(), vs.end());
            }
        }
        for (const auto& e : fresh_edges) g_.add_edge(e);
        for (const auto& [r, vs] : moved) vals[r].insert(vs.begin(), vs.end());
        g_.reroot(roots);
        for (auto it = vals.begin(); it != vals.end();)
            it = roots.count(it->first) ? std::next(it) : vals.erase(it);
    }
}

void Engine::assign_values(const PathExpr& target_raw, const RootValues& vals_in, SourceLoc loc) {
    PathExpr target = retag(target_raw);
    const Label& a = target.segments().back();
    PathExpr x = target.prefix(target.size() - 1);
    RootValues vals = vals_in;
    for (auto r : g_.roots()) vals[r];
    const NodeSet weak = privatize(x, vals, site_id(&target_raw));

    // x.a := s : every object x may denote gets its a-field replaced by the
    // values s has in the worlds where x denotes it.
    std::map<NodeId, NodeSet> upd;
    for (auto r : g_.roots()) {
        const auto& vs = vals[r];
        NodeSet ms = x.size() == 0 ? NodeSet{r} : g_.value_set_from(r, x);
        for (auto m : ms) upd[m].insert(vs.begin(), vs.end());
    }
    if (upd.empty()) {
        diag(Diagnostic::Severity::Warning, loc,
             "target '" + target_raw.prefix(target_raw.size() - 1).str() + "' is Void here; assignment has no effect");
        return;
    }
    for (const auto& [m, vs] : upd) {
        if (!weak.count(m))
            for (auto old : g_.successors(m, a)) g_.remove_edge(Edge{a, m, old});
        for (auto v : vs) g_.add_edge(a, m, v);
    }
}

void Engine::run_assign(const Assign& a, SourceLoc loc) { assign_values(a.target, values(a.source), loc); }

void Engine::run_create(const Create& c, const Instr& in) {
    const std::uint32_t site = site_id(&in);
    const Label label = retag(c.target).segments().front();
    RootValues vals;
    for (auto r : NodeSet(g_.roots())) {
        if (fixpoint_depth_ == 0) {
            vals[r] = {g_.include()};
            continue;
        }
        unsigned k = ++create_count_[{site, r}];
        if (k <= options_.cap) {
            NodeId n = g_.include();
            vals[r] = {n};
            if (k == options_.cap) {
                g_.add_edge(Label::fresh(label.name, site), r, n);
                fx_node_[{site, r}] = n;
            }
        } else {
            vals[r] = {fx_node_.at({site, r})};
        }
    }
    assign_values(c.target, vals, in.loc);
}

void Engine::enter_fixpoint() { ++fixpoint_depth_; }

void Engine::exit_fixpoint() {
    if (--fixpoint_depth_ > 0) return;
    create_count_.clear();
    fx_node_.clear();
    memo_.clear();
    std::vector<Edge> fresh;
    for (const auto& e : g_.edges())
        if (e.label.kind == LabelKind::Fresh) fresh.push_back(e);
    for (const auto& e : fresh) g_.remove_edge(e);
}

// ---------------------------------------------------------------------------
// Conditions

Tri Engine::eval_root(NodeId r, const Cond& c, const Diagram& g) const {
    switch (c.kind) {
    case Cond::Kind::Eq:
    case Cond::Kind::Neq: {
        Tri eq = Tri::Unknown;
        if (c.e == c.f) {
            eq = Tri::True;
        } else {
            auto ve = g.value_set_from(r, retag(c.e));
            auto vf = g.value_set_from(r, retag(c.f));
            if (!ve.empty() && !vf.empty() && disjoint(ve, vf)) eq = Tri::False;
        }
        return c.kind == Cond::Kind::Eq ? eq : negate(eq);
    }
    case Cond::Kind::EqVoid:
    case Cond::Kind::NeqVoid: {
        Tri is_void = g.value_set_from(r, retag(c.e)).empty() ? Tri::True : Tri::Unknown;
        return c.kind == Cond::Kind::EqVoid ? is_void : negate(is_void);
    }
    case Cond::Kind::Not:
        return negate(eval_root(r, c.inner.front(), g));
    }
    return Tri::Unknown;
}

Tri Engine::evaluate_cond(const Diagram& g, const Cond& c) const {
    std::optional<Tri> agreed;
    for (auto r : g.roots()) {
        Tri t = eval_root(r, c, g);
        if (t == Tri::Unknown) return Tri::Unknown;
        if (agreed && *agreed != t) return Tri::Unknown;
        agreed = t;
    }
    return agreed.value_or(Tri::Unknown);
}

void Engine::run_guard(const Guard& g) {
    if (evaluate_cond(g_, g.cond) == Tri::False) return;
    run_block(g.body);
}

// ---------------------------------------------------------------------------
// Choice

NodeId Engine::clone_node(std::uint32_t site, std::size_t branch, NodeId c) {
    NodeId base = origin(c);
    if (fixpoint_depth_ > 0) {
        auto key = std::make_tuple(site, branch, base);
        if (auto it = memo_.find(key); it != memo_.end()) {
            g_.add_node(it->second);
            return it->second;
        }
        NodeId n = g_.include();
        origin_[n] = base;
        memo_.emplace(key, n);
        return n;
    }
    NodeId n = g_.include();
    origin_[n] = base;
    return n;
}

void Engine::choice(const std::vector<std::function<void()>>& branches, std::uint32_t site) {
    ++stats_.choices;
    const NodeSet R0 = g_.roots();
    const NodeSet O0 = g_.nodes();
    EdgeSet before;
    if (hooks_.after_restore) before = g_.edges();

    struct World {
        EdgeSet A, D;
        NodeSet R;
    };
    std::vector<World> worlds;
    std::vector<std::size_t> world_branch;

    for (std::size_t i = 0; i < branches.size(); ++i) {
        DeltaLog log;
        logs_.push_back(&log);
        branches[i]();
        logs_.pop_back();
        World w{std::move(log.added), std::move(log.deleted), g_.roots()};
        // get back to the starting state
        for (const auto& e : w.A) g_.remove_edge(e);
        for (const auto& e : w.D) g_.add_edge(e);
        g_.reroot(R0);
        if (hooks_.after_restore) hooks_.after_restore(i, g_, before);
        bool dup = std::any_of(worlds.begin(), worlds.end(), [&](const World& o) {
            return o.A == w.A && o.D == w.D && o.R == w.R;
        });
        if (!dup) {
            worlds.push_back(std::move(w));
            world_branch.push_back(i);
        }
    }

    auto apply_first = [&] {
        const World& w = worlds.front();
        for (const auto& e : w.D) g_.remove_edge(e);
        for (const auto& e : w.A) g_.add_edge(e);
        g_.reroot(w.R);
    };
    if (worlds.size() == 1) {
        apply_first();
        return;
    }

    // Nodes whose outgoing edges some branch changed, and everything that
    // can reach them from the roots, must exist once per world.
    std::map<NodeId, std::vector<NodeId>> succ, pred;
    auto note = [&](const Edge& e) {
        succ[e.source].push_back(e.target);
        pred[e.target].push_back(e.source);
    };
    for (const auto& e : g_.edges()) note(e);
    NodeSet modified;
    for (const auto& w : worlds) {
        for (const auto& e : w.A) {
            note(e);
            modified.insert(e.source);
        }
        for (const auto& e : w.D) modified.insert(e.source);
    }
    auto closure = [](const NodeSet& start, const std::map<NodeId, std::vector<NodeId>>& adj) {
        NodeSet seen = start;
        std::deque<NodeId> work(start.begin(), start.end());
        while (!work.empty()) {
            auto n = work.front();
            work.pop_front();
            auto it = adj.find(n);
            if (it == adj.end()) continue;
            for (auto m : it->second)
                if (seen.insert(m).second) work.push_back(m);
        }
        return seen;
    };
    const NodeSet reach = closure(R0, succ);
    const NodeSet anc = closure(modified, pred);
    NodeSet C = R0;
    for (auto n : anc)
        if (reach.count(n) && O0.count(n)) C.insert(n);

    std::vector<Edge> clone_edges;
    NodeSet extra_roots;
    for (std::size_t b = 1; b < worlds.size(); ++b) {
        const World& w = worlds[b];
        std::map<NodeId, NodeId> phi;
        for (auto c : C) phi[c] = clone_node(site, world_branch[b], c);
        auto map_node = [&](NodeId n) {
            auto it = phi.find(n);
            return it == phi.end() ? n : it->second;
        };
        for (auto c : C)
            for (const auto& [label, targets] : g_.out(c))
                for (auto t : targets)
                    if (!w.D.count(Edge{label, c, t})) clone_edges.push_back({label, phi.at(c), map_node(t)});
        for (const auto& e : w.A) clone_edges.push_back({e.label, map_node(e.source), map_node(e.target)});
        for (auto r : w.R) extra_roots.insert(map_node(r));
    }

    apply_first();
    for (const auto& e : clone_edges) g_.add_edge(e);
    NodeSet roots = g_.roots();
    roots.insert(extra_roots.begin(), extra_roots.end());
    g_.reroot(roots);
}

// ---------------------------------------------------------------------------
// Loops

void Engine::run_loop(const Loop& l, SourceLoc loc) {
    enter_fixpoint();
    EdgeSet D;
    NodeSet prev_nodes = g_.nodes();
    NodeSet prev_roots = g_.roots();
    EdgeSet prev_edges = g_.edges();
    for (unsigned iter = 1;; ++iter) {
        DeltaLog log;
        logs_.push_back(&log);
        run_block(l.body);
        logs_.pop_back();
        D.insert(log.deleted.begin(), log.deleted.end());
        for (const auto& e : D) g_.add_edge(e);
        ++stats_.loop_iterations;
        if (hooks_.after_loop_iteration) hooks_.after_loop_iteration(iter, g_);
        if (g_.nodes() == prev_nodes && g_.roots() == prev_roots && g_.edges() == prev_edges) break;
        if (iter >= options_.max_iters) {
            ceiling_hit_ = true;
            diag(Diagnostic::Severity::Error, loc,
                 "loop did not stabilize within " + std::to_string(options_.max_iters) + " iterations");
            break;
        }
        prev_nodes = g_.nodes();
        prev_roots = g_.roots();
        prev_edges = g_.edges();
    }
    exit_fixpoint();
}

// ---------------------------------------------------------------------------
// Calls

void Engine::run_call(const Call& c, const Instr& in) {
    const std::string K = c.target ? c.static_type : frames_.back().cls;
    std::vector<Version> versions;
    if (!c.target && frames_.size() == 1) {
        const RoutineDecl* r = program_.classes.lookup_routine(K, c.routine);
        if (!r) throw std::logic_error("unresolved routine " + c.routine);
        versions.push_back({K, r});
    } else {
        versions = program_.classes.heirs_redefining(K, c.routine);
    }
    if (versions.size() == 1) {
        run_version(c, versions.front(), in.loc);
        return;
    }
    std::vector<std::function<void()>> branches;
    for (const auto& v : versions) branches.push_back([this, &c, v, &in] { run_version(c, v, in.loc); });
    choice(branches, site_id(&in));
}

void Engine::run_version(const Call& c, const Version& v, SourceLoc loc) {
    ++stats_.calls;
    const std::uint32_t d = frames_.back().depth + 1;
    RootValues caller_results;
    if (c.target) {
        const PathExpr x = retag(*c.target);
        const Label back = Label::back(c.target->str(), d);
        const NodeSet caller_roots = g_.roots();
        NodeSet callee_roots;
        for (auto r : caller_roots)
            for (auto o : g_.value_set_from(r, x)) {
                g_.add_edge(back, o, r);
                callee_roots.insert(o);
            }
        if (callee_roots.empty()) {
            diag(Diagnostic::Severity::Error, loc, "call to '" + c.routine + "' on '" + c.target->str() +
                                                      "' which is Void here");
            return;
        }
        std::map<NodeId, std::vector<NodeSet>> actuals;
        for (auto o : callee_roots) {
            auto& vs = actuals[o];
            for (const auto& a : c.actuals) {
                if (a.is_void) vs.push_back({});
                else vs.push_back(g_.value_set_from(o, PathExpr{{back}}.concat(retag(a.path))));
            }
        }
        g_.reroot(callee_roots);
        RootValues results = invoke(v, actuals, loc);
        NodeSet roots_back;
        for (auto o : g_.roots())
            for (auto r : g_.successors(o, back)) {
                roots_back.insert(r);
                auto it = results.find(o);
                if (it != results.end()) caller_results[r].insert(it->second.begin(), it->second.end());
            }
        g_.remove_label(back);
        g_.reroot(roots_back.empty() ? caller_roots : roots_back);
    } else {
        std::map<NodeId, std::vector<NodeSet>> actuals;
        for (auto r : g_.roots()) {
            auto& vs = actuals[r];
            for (const auto& a : c.actuals) vs.push_back(values_from(r, a));
        }
        caller_results = invoke(v, actuals, loc);
    }
    if (c.result_to) assign_values(*c.result_to, caller_results, loc);
}

Engine::RootValues Engine::invoke(const Version& v, const std::map<NodeId, std::vector<NodeSet>>& actuals,
                                  SourceLoc loc) {
    const RoutineDecl& r = *v.routine;
    const std::uint32_t d = frames_.back().depth + 1;

    Frame frame;
    frame.routine = &r;
    frame.cls = v.type;
    frame.depth = d;
    frame.fingerprint.routine = &r;
    frame.fingerprint.roots = g_.roots();
    frame.fingerprint.actuals = actuals;

    std::optional<std::size_t> outer;
    for (std::size_t i = 0; i < frames_.size(); ++i)
        if (frames_[i].routine == &r) {
            outer = i;
            break;
        }

    if (outer) {
        // Recursion: the outermost activation owns a fixpoint context so
        // that creation sites stop producing new nodes.
        if (!frames_[*outer].owns_fixpoint) {
            frames_[*outer].owns_fixpoint = true;
            enter_fixpoint();
        }
        for (const auto& e : g_.edges())
            if (heap_label(e.label)) frame.fingerprint.heap.insert(e);
        std::optional<std::size_t> cut;
        for (std::size_t i = frames_.size(); i-- > 0;)
            if (frames_[i].fingerprint == frame.fingerprint) {
                cut = i;
                break;
            }
        if (!cut && frames_.size() > options_.max_call_depth) {
            diag(Diagnostic::Severity::Warning, loc, "recursion on '" + r.name + "' cut at call depth " +
                                                         std::to_string(options_.max_call_depth));
            for (std::size_t i = frames_.size(); i-- > 0;)
                if (frames_[i].routine == &r) {
                    cut = i;
                    break;
                }
        }
        if (cut) {
            ++stats_.cuts;
            Frame& target = frames_[*cut];
            target.hit = true;
            for (const auto& e : target.summary.edges)
                if (g_.contains(e.source) && g_.contains(e.target)) g_.add_edge(e);
            RootValues out;
            for (auto root : g_.roots()) out[root] = target.summary.result;
            return out;
        }
    } else {
        for (const auto& e : g_.edges())
            if (heap_label(e.label)) frame.fingerprint.heap.insert(e);
    }

    // Bind formals.
    for (const auto& [root, vs] : actuals)
        for (std::size_t i = 0; i < r.formals.size() && i < vs.size(); ++i)
            for (auto n : vs[i]) g_.add_edge(Label::local(r.formals[i].name, d), root, n);

    frames_.push_back(std::move(frame));
    const std::size_t me = frames_.size() - 1;
    DeltaLog log;
    logs_.push_back(&log);
    const NodeSet entry_roots = g_.roots();
    const Label result_label = Label::local("Result", d);

    RootValues results;
    for (unsigned iter = 1;; ++iter) {
        run_block(r.body);
        results.clear();
        for (auto root : g_.roots()) results[root] = g_.successors(root, result_label);
        if (!frames_[me].hit) break;

        Summary effect;
        for (const auto& e : log.added)
            if (heap_label(e.label)) effect.edges.insert(e);
        for (const auto& [root, vs] : results) effect.result.insert(vs.begin(), vs.end());
        Summary& sum = frames_[me].summary;
        bool grew = !std::includes(sum.edges.begin(), sum.edges.end(), effect.edges.begin(), effect.edges.end()) ||
                    !std::includes(sum.result.begin(), sum.result.end(), effect.result.begin(), effect.result.end());
        if (!grew) break;
        if (iter >= options_.max_iters) {
            ceiling_hit_ = true;
            diag(Diagnostic::Severity::Error, loc,
                 "recursion on '" + r.name + "' did not stabilize within " + std::to_string(options_.max_iters) +
                     " rounds");
            break;
        }
        sum.edges.insert(effect.edges.begin(), effect.edges.end());
        sum.result.insert(effect.result.begin(), effect.result.end());
        frames_[me].hit = false;
        ++stats_.recursion_reruns;
        // Undo the invocation and analyze the body again.
        EdgeSet add_back = log.deleted;
        EdgeSet take_out = log.added;
        for (const auto& e : take_out) g_.remove_edge(e);
        for (const auto& e : add_back) g_.add_edge(e);
        g_.reroot(entry_roots);
    }

    if (logs_.back() != &log) throw std::logic_error("unbalanced delta logs");
    logs_.pop_back();
    const bool owned = frames_[me].owns_fixpoint;
    frames_.pop_back();
    if (owned) exit_fixpoint();

    // Scope exit.
    for (const auto& f : r.formals) g_.remove_label(Label::local(f.name, d));
    for (const auto& l : r.locals) g_.remove_label(Label::local(l.name, d));
    g_.remove_label(result_label);
    return results;
}

// ---------------------------------------------------------------------------
// Dispatch

void Engine::run_instr(const Instr& in) {
    std::visit(
        [&](const auto& n) {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, Assign>) {
                run_assign(n, in.loc);
            } else if constexpr (std::is_same_v<T, Create>) {
                run_create(n, in);
            } else if constexpr (std::is_same_v<T, Compound>) {
                run_block(n.body);
            } else if constexpr (std::is_same_v<T, Choice>) {
                std::vector<std::function<void()>> branches;
                for (const auto& b : n.branches) branches.push_back([this, &b] { run_block(b); });
                choice(branches, site_id(&in));
            } else if constexpr (std::is_same_v<T, Guard>) {
                run_guard(n);
            } else if constexpr (std::is_same_v<T, Loop>) {
                run_loop(n, in.loc);
            } else if constexpr (std::is_same_v<T, Call>) {
                run_call(n, in);
            }
        },
        in.node);
}

void Engine::run_block(const Block& b) {
    for (const auto& in : b) {
        run_instr(in);
        if (options_.snapshots && !in.label.empty() && frames_.size() == 1) {
            auto it = points_.find(in.label);
            if (it == points_.end()) points_.emplace(in.label, g_);
            else it->second.unite(g_);
        }
    }
}

// ---------------------------------------------------------------------------
// Entry points

AnalysisResult Engine::analyze(const Version& entry) {
    reset(Diagram{});
    Frame f;
    f.routine = entry.routine;
    f.cls = entry.type;
    f.depth = 0;
    frames_.push_back(std::move(f));
    run_block(entry.routine->body);
    frames_.clear();

    AnalysisResult out;
    out.final_diagram = g_;
    out.points = points_;
    out.diagnostics = diags_;
    out.ceiling_hit = ceiling_hit_;
    out.stats = stats_;
    for (auto r : g_.roots()) out.root_origin[r] = origin(r);
    return out;
}

void Engine::execute(Diagram& g, const Block& body, const std::string& cls) {
    reset(g);
    Frame f;
    f.cls = cls;
    frames_.push_back(std::move(f));
    run_block(body);
    frames_.clear();
    g = g_;
}

void Engine::execute_choice(Diagram& g, const std::vector<std::function<void(Engine&)>>& branches,
                            const std::string& cls) {
    reset(g);
    Frame f;
    f.cls = cls;
    frames_.push_back(std::move(f));
    std::vector<std::function<void()>> bs;
    for (const auto& b : branches) bs.push_back([this, &b] { b(*this); });
    choice(bs, site_id(&branches));
    frames_.clear();
    g = g_;
}

} // namespace aliasgraph
