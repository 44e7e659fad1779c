// calculus.hpp - the rule engine.
//
// Engine runs instructions over one alias diagram. Each root of the diagram
// is treated as its own world: choices split worlds by cloning the part of
// the diagram a branch touched, so aliasing is always judged per root.

#ifndef ALIASGRAPH_CALCULUS_HPP
#define ALIASGRAPH_CALCULUS_HPP

#include "aliasgraph/diagram.hpp"
#include "aliasgraph/lang.hpp"

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

namespace aliasgraph {

enum class Tri { True, False, Unknown };

std::string to_string(Tri t);

// Net additions and deletions since the log was opened. An edge added and
// then removed (or the reverse) appears in neither set.
struct DeltaLog {
    EdgeSet added;
    EdgeSet deleted;

    void on_add(const Edge& e) {
        if (deleted.erase(e) == 0) added.insert(e);
    }
    void on_remove(const Edge& e) {
        if (added.erase(e) == 0) deleted.insert(e);
    }
};

struct AnalysisOptions {
    unsigned cap = 1;          // creation policy N
    unsigned max_iters = 1000; // per loop or recursive frame
    bool snapshots = false;    // record diagrams after labeled entry instructions
    unsigned max_call_depth = 256;
};

// Observation points for tests.
struct EngineHooks {
    // After branch `index` of a choice ran and the diagram was restored.
    std::function<void(std::size_t index, const Diagram& restored, const EdgeSet& before)> after_restore;
    // After each loop iteration (D already put back).
    std::function<void(unsigned iteration, const Diagram&)> after_loop_iteration;
};

struct AnalysisStats {
    unsigned loop_iterations = 0;
    unsigned recursion_reruns = 0;
    unsigned choices = 0;
    unsigned calls = 0;
    unsigned cuts = 0;
    unsigned privatizations = 0;
};

struct AnalysisResult {
    Diagram final_diagram;
    std::map<std::string, Diagram> points;
    std::vector<Diagnostic> diagnostics;
    bool ceiling_hit = false;
    AnalysisStats stats;
    // Every final root traced back to the node it was cloned from.
    std::map<NodeId, NodeId> root_origin;
};

class Engine : public ChangeListener {
public:
    Engine(const Program& program, AnalysisOptions options = {}, EngineHooks hooks = {});
    ~Engine() override;

    Engine(const Engine&) = delete;
    Engine& operator=(const Engine&) = delete;

    // Runs `entry` from a diagram with a single fresh root.
    AnalysisResult analyze(const Version& entry);

    // Runs a block on g with `cls` as the class of Current, locals at depth 0.
    void execute(Diagram& g, const Block& body, const std::string& cls);

    // Runs arbitrary branches as one choice on g (used to check the A/D
    // machinery against other implementations).
    void execute_choice(Diagram& g, const std::vector<std::function<void(Engine&)>>& branches,
                        const std::string& cls);

    Tri evaluate_cond(const Diagram& g, const Cond& c) const;

    const std::vector<Diagnostic>& diagnostics() const { return diags_; }
    bool ceiling_hit() const { return ceiling_hit_; }
    const AnalysisStats& stats() const { return stats_; }
    NodeId origin(NodeId n) const;

    void edge_added(const Edge& e) override;
    void edge_removed(const Edge& e) override;

    // Single instructions, exposed for tests.
    void run_instr(const Instr& in);
    void run_block(const Block& b);

private:
    struct Summary {
        EdgeSet edges;
        NodeSet result;
    };

    struct Fingerprint {
        const RoutineDecl* routine = nullptr;
        NodeSet roots;
        std::map<NodeId, std::vector<NodeSet>> actuals;
        EdgeSet heap;
        bool operator==(const Fingerprint&) const = default;
    };

    struct Frame {
        const RoutineDecl* routine = nullptr;
        std::string cls;
        std::uint32_t depth = 0;
        Fingerprint fingerprint;
        bool hit = false;
        bool owns_fixpoint = false;
        Summary summary;
    };

    using RootValues = std::map<NodeId, NodeSet>;

    void reset(Diagram g);
    PathExpr retag(const PathExpr& p) const;
    NodeSet values_from(NodeId root, const Operand& o) const;
    RootValues values(const Operand& o) const;
    void assign_values(const PathExpr& target, const RootValues& vals, SourceLoc loc);
    std::map<NodeId, NodeSet> reach_by_root() const;
    NodeSet privatize(const PathExpr& x, RootValues& vals, std::uint32_t site);

    void run_assign(const Assign& a, SourceLoc loc);
    void run_create(const Create& c, const Instr& in);
    void run_guard(const Guard& g);
    void run_loop(const Loop& l, SourceLoc loc);
    void run_call(const Call& c, const Instr& in);
    void run_version(const Call& c, const Version& v, SourceLoc loc);
    void choice(const std::vector<std::function<void()>>& branches, std::uint32_t site);

    // Binds, runs and unbinds one invocation; returns Result per callee root.
    RootValues invoke(const Version& v, const std::map<NodeId, std::vector<NodeSet>>& actuals,
                      SourceLoc loc);

    Tri eval_root(NodeId r, const Cond& c, const Diagram& g) const;

    void enter_fixpoint();
    void exit_fixpoint();
    std::uint32_t site_id(const void* key);
    NodeId clone_node(std::uint32_t site, std::size_t branch, NodeId c);

    void diag(Diagnostic::Severity sev, SourceLoc loc, std::string msg);

    const Program& program_;
    AnalysisOptions options_;
    EngineHooks hooks_;

    Diagram g_;
    std::vector<DeltaLog*> logs_;
    std::vector<Frame> frames_;

    int fixpoint_depth_ = 0;
    std::map<std::pair<std::uint32_t, NodeId>, unsigned> create_count_;
    std::map<std::pair<std::uint32_t, NodeId>, NodeId> fx_node_;
    std::map<std::tuple<std::uint32_t, std::size_t, NodeId>, NodeId> memo_;
    std::map<NodeId, NodeId> origin_;
    std::map<const void*, std::uint32_t> sites_;

    std::map<std::string, Diagram> points_;
    std::vector<Diagnostic> diags_;
    std::set<std::string> diag_seen_;
    bool ceiling_hit_ = false;
    AnalysisStats stats_;
};

} // namespace aliasgraph

#endif // ALIASGRAPH_CALCULUS_HPP
