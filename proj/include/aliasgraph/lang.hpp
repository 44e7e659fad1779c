// lang.hpp - source language: AST, parser, class table.
//
// Programs are a handful of classes with reference attributes and routines
// whose bodies use assignment, creation, non-deterministic choice, guards,
// loops and (qualified) calls. Conditions compare references only.

#ifndef ALIASGRAPH_LANG_HPP
#define ALIASGRAPH_LANG_HPP

#include "aliasgraph/diagram.hpp"

#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace aliasgraph {

struct SourceLoc {
    int line = 0;
    int col = 0;
};

struct Diagnostic {
    enum class Severity { Error, Warning };

    Severity severity = Severity::Error;
    std::string file;
    SourceLoc loc;
    std::string message;

    std::string str() const;
};

class ParseError : public std::runtime_error {
public:
    explicit ParseError(std::vector<Diagnostic> diags);
    const std::vector<Diagnostic>& diagnostics() const { return diags_; }

private:
    std::vector<Diagnostic> diags_;
};

// A path, or the Void literal.
struct Operand {
    PathExpr path;
    bool is_void = false;

    bool operator==(const Operand&) const = default;
    std::string str() const { return is_void ? "Void" : path.str(); }
};

struct Cond {
    enum class Kind { Eq, Neq, EqVoid, NeqVoid, Not };

    Kind kind = Kind::Eq;
    PathExpr e;
    PathExpr f;
    std::vector<Cond> inner; // exactly one element for Not

    static Cond eq(PathExpr a, PathExpr b) { return {Kind::Eq, std::move(a), std::move(b), {}}; }
    static Cond neq(PathExpr a, PathExpr b) { return {Kind::Neq, std::move(a), std::move(b), {}}; }
    static Cond eq_void(PathExpr a) { return {Kind::EqVoid, std::move(a), {}, {}}; }
    static Cond neq_void(PathExpr a) { return {Kind::NeqVoid, std::move(a), {}, {}}; }
    static Cond negate(Cond c) { return {Kind::Not, {}, {}, {std::move(c)}}; }

    bool operator==(const Cond&) const = default;
    std::string str() const;
};

struct Instr;
using Block = std::vector<Instr>;

struct Assign {
    PathExpr target;
    Operand source;
    bool operator==(const Assign&) const = default;
};

struct Create {
    PathExpr target;
    bool operator==(const Create&) const = default;
};

struct Compound {
    Block body;
    bool operator==(const Compound&) const;
};

struct Guard {
    Cond cond;
    Block body;
    bool operator==(const Guard&) const;
};

// `from_if` remembers that the choice came from if/elseif/else so that
// printing gives back the same surface form.
struct Choice {
    std::vector<Block> branches;
    bool from_if = false;
    bool operator==(const Choice&) const;
};

struct Loop {
    Block body;
    bool operator==(const Loop&) const;
};

struct Call {
    std::optional<PathExpr> target; // qualified call when set
    std::string routine;
    std::vector<Operand> actuals;
    std::optional<PathExpr> result_to; // y := f (...)
    std::string static_type;           // class the routine is looked up in
    bool operator==(const Call&) const = default;
};

struct Instr {
    using Node = std::variant<Assign, Create, Compound, Choice, Guard, Loop, Call>;

    Node node;
    std::string label; // program point label, e.g. "L1"; may be empty
    SourceLoc loc;
    int point = -1; // unique id within the program

    bool operator==(const Instr& o) const { return label == o.label && node == o.node; }
};

struct VarDecl {
    std::string name;
    std::string type;
    bool operator==(const VarDecl&) const = default;
};

struct RoutineDecl {
    std::string name;
    std::string owner;
    std::vector<VarDecl> formals;
    std::vector<VarDecl> locals;
    std::optional<std::string> result_type;
    Block body;
    SourceLoc loc;

    bool operator==(const RoutineDecl& o) const {
        return name == o.name && owner == o.owner && formals == o.formals && locals == o.locals &&
               result_type == o.result_type && body == o.body;
    }
};

struct ClassDecl {
    std::string name;
    std::optional<std::string> parent;
    std::set<std::string> redefines;
    std::vector<VarDecl> attributes;
    std::vector<RoutineDecl> routines;
    bool implicit = false; // holder for top-level routines
    SourceLoc loc;

    const RoutineDecl* own_routine(const std::string& name) const;
    bool operator==(const ClassDecl& o) const {
        return name == o.name && parent == o.parent && redefines == o.redefines &&
               attributes == o.attributes && routines == o.routines && implicit == o.implicit;
    }
};

struct Version {
    std::string type;
    const RoutineDecl* routine = nullptr;
};

class ClassTable {
public:
    void add(ClassDecl c);

    const ClassDecl* find(const std::string& name) const;
    bool has(const std::string& name) const { return find(name) != nullptr; }
    const std::map<std::string, ClassDecl>& classes() const { return classes_; }
    std::map<std::string, ClassDecl>& classes() { return classes_; }

    // Attribute type, inherited ones included.
    std::optional<std::string> attribute_type(const std::string& cls, const std::string& name) const;
    // The version of `name` that an object of dynamic type `cls` runs.
    const RoutineDecl* lookup_routine(const std::string& cls, const std::string& name) const;
    bool conforms(const std::string& descendant, const std::string& ancestor) const;
    std::vector<std::string> direct_heirs(const std::string& cls) const;

    // The version seen from `static_type` first, then every descendant that
    // redefines the routine, topologically and then by name.
    std::vector<Version> heirs_redefining(const std::string& static_type,
                                          const std::string& routine) const;

private:
    std::map<std::string, ClassDecl> classes_;
};

struct Program {
    std::string file;
    ClassTable classes;
    std::optional<std::string> main_class; // holds the anonymous block, if any
    std::vector<Diagnostic> warnings;
    int point_count = 0;

    // Accepts "Class.routine" or a bare routine name (looked up in the
    // implicit class first, then in every class when unique).
    std::optional<Version> find_entry(const std::string& spec) const;
    // Default entry: `main` of the implicit class.
    std::optional<Version> default_entry() const;
};

// Throws ParseError with every error found.
Program parse_program(std::string_view text, const std::string& file = "<input>");

Choice desugar_conditional(const std::vector<std::pair<Cond, Block>>& arms,
                           std::optional<Block> else_part);

ExprUniverse build_expr_universe(const Program& program);
ExprUniverse build_expr_universe(const Block& body);

std::string print_program(const Program& program);
std::string print_block(const Block& block, int indent = 0);

// Visits every instruction, nested ones included, in source order.
template <typename F>
void for_each_instr(const Block& block, F&& f) {
    for (const auto& in : block) {
        f(in);
        std::visit(
            [&](const auto& n) {
                using T = std::decay_t<decltype(n)>;
                if constexpr (std::is_same_v<T, Compound> || std::is_same_v<T, Guard> ||
                              std::is_same_v<T, Loop>) {
                    for_each_instr(n.body, f);
                } else if constexpr (std::is_same_v<T, Choice>) {
                    for (const auto& b : n.branches) for_each_instr(b, f);
                }
            },
            in.node);
    }
}

} // namespace aliasgraph

#endif // ALIASGRAPH_LANG_HPP
