// lang.cpp - lexer, recursive-descent parser, name resolution, printer.

#include "aliasgraph/lang.hpp"

#include <algorithm>
#include <cctype>
#include <deque>
#include <functional>
#include <sstream>

namespace aliasgraph {

std::string Diagnostic::str() const {
    std::ostringstream os;
    os << file << ':' << loc.line << ':' << loc.col << ": "
       << (severity == Severity::Error ? "error: " : "warning: ") << message;
    return os.str();
}

namespace {

std::string join_messages(const std::vector<Diagnostic>& diags) {
    std::string out;
    for (const auto& d : diags) {
        if (!out.empty()) out += '\n';
        out += d.str();
    }
    return out;
}

} // namespace

ParseError::ParseError(std::vector<Diagnostic> diags)
    : std::runtime_error(join_messages(diags)), diags_(std::move(diags)) {}

std::string Cond::str() const {
    switch (kind) {
    case Kind::Eq: return e.str() + " = " + f.str();
    case Kind::Neq: return e.str() + " /= " + f.str();
    case Kind::EqVoid: return e.str() + " = Void";
    case Kind::NeqVoid: return e.str() + " /= Void";
    case Kind::Not: return "not (" + inner.front().str() + ")";
    }
    return {};
}

bool Compound::operator==(const Compound& o) const { return body == o.body; }
bool Guard::operator==(const Guard& o) const { return cond == o.cond && body == o.body; }
bool Choice::operator==(const Choice& o) const {
    return from_if == o.from_if && branches == o.branches;
}
bool Loop::operator==(const Loop& o) const { return body == o.body; }

const RoutineDecl* ClassDecl::own_routine(const std::string& rname) const {
    for (const auto& r : routines)
        if (r.name == rname) return &r;
    return nullptr;
}

// ---------------------------------------------------------------------------
// Class table

void ClassTable::add(ClassDecl c) {
    auto name = c.name;
    classes_.insert_or_assign(name, std::move(c));
}

const ClassDecl* ClassTable::find(const std::string& name) const {
    auto it = classes_.find(name);
    return it == classes_.end() ? nullptr : &it->second;
}

std::optional<std::string> ClassTable::attribute_type(const std::string& cls,
                                                      const std::string& name) const {
    std::set<std::string> seen;
    for (const ClassDecl* c = find(cls); c && seen.insert(c->name).second;
         c = c->parent ? find(*c->parent) : nullptr) {
        for (const auto& a : c->attributes)
            if (a.name == name) return a.type;
    }
    return std::nullopt;
}

const RoutineDecl* ClassTable::lookup_routine(const std::string& cls, const std::string& name) const {
    std::set<std::string> seen;
    for (const ClassDecl* c = find(cls); c && seen.insert(c->name).second;
         c = c->parent ? find(*c->parent) : nullptr) {
        if (auto r = c->own_routine(name)) return r;
    }
    return nullptr;
}

bool ClassTable::conforms(const std::string& descendant, const std::string& ancestor) const {
    std::set<std::string> seen;
    for (const ClassDecl* c = find(descendant); c && seen.insert(c->name).second;
         c = c->parent ? find(*c->parent) : nullptr) {
        if (c->name == ancestor) return true;
    }
    return false;
}

std::vector<std::string> ClassTable::direct_heirs(const std::string& cls) const {
    std::vector<std::string> out;
    for (const auto& [name, c] : classes_)
        if (c.parent && *c.parent == cls) out.push_back(name);
    return out;
}

std::vector<Version> ClassTable::heirs_redefining(const std::string& static_type,
                                                  const std::string& routine) const {
    const RoutineDecl* own = lookup_routine(static_type, routine);
    if (!own)
        throw std::invalid_argument("unknown routine '" + routine + "' in class " + static_type);
    std::vector<Version> out{{static_type, own}};
    // Breadth-first over the heir tree gives a topological order; each level
    // is sorted by name because direct_heirs walks a sorted map.
    std::deque<std::string> level{static_type};
    std::set<std::string> seen{static_type};
    while (!level.empty()) {
        std::vector<std::string> next;
        for (const auto& c : level)
            for (const auto& h : direct_heirs(c))
                if (seen.insert(h).second) next.push_back(h);
        std::sort(next.begin(), next.end());
        for (const auto& h : next)
            if (auto r = find(h)->own_routine(routine)) out.push_back({h, r});
        level.assign(next.begin(), next.end());
    }
    return out;
}

std::optional<Version> Program::find_entry(const std::string& spec) const {
    auto dot = spec.find('.');
    if (dot != std::string::npos) {
        auto cls = spec.substr(0, dot);
        auto name = spec.substr(dot + 1);
        if (!classes.has(cls)) return std::nullopt;
        if (auto r = classes.lookup_routine(cls, name)) return Version{cls, r};
        return std::nullopt;
    }
    if (main_class)
        if (auto r = classes.lookup_routine(*main_class, spec)) return Version{*main_class, r};
    std::optional<Version> found;
    for (const auto& [name, c] : classes.classes()) {
        if (auto r = c.own_routine(spec)) {
            if (found) return std::nullopt; // ambiguous
            found = Version{name, r};
        }
    }
    return found;
}

std::optional<Version> Program::default_entry() const {
    if (!main_class) return std::nullopt;
    if (auto r = classes.lookup_routine(*main_class, "main")) return Version{*main_class, r};
    return std::nullopt;
}

Choice desugar_conditional(const std::vector<std::pair<Cond, Block>>& arms,
                           std::optional<Block> else_part) {
    Choice ch;
    ch.from_if = true;
    for (const auto& [c, body] : arms) {
        Instr g;
        g.node = Guard{c, body};
        ch.branches.push_back({std::move(g)});
    }
    Instr last;
    last.node = Guard{Cond::negate(arms.back().first), else_part.value_or(Block{})};
    ch.branches.push_back({std::move(last)});
    return ch;
}

// ---------------------------------------------------------------------------
// Lexer

namespace {

enum class Tok {
    Ident,
    Keyword,
    Assign,  // :=
    Colon,   // :
    Semi,    // ;
    Comma,   // ,
    Dot,     // .
    LParen,  // (
    RParen,  // )
    Eq,      // =
    Neq,     // /=
    End,
};

struct Token {
    Tok kind = Tok::End;
    std::string text;
    SourceLoc loc;
};

const std::set<std::string>& keywords() {
    static const std::set<std::string> kw = {
        "class", "inherit", "redefine", "feature", "end",   "local", "do",    "if",
        "then",  "elseif",  "else",     "loop",    "from",  "until", "create", "not",
        "Void",  "Current"};
    return kw;
}

struct Abort {};

class Lexer {
public:
    Lexer(std::string_view text, std::vector<Diagnostic>& diags, const std::string& file)
        : text_(text), diags_(diags), file_(file) {}

    std::vector<Token> run() {
        std::vector<Token> out;
        while (true) {
            skip_space();
            SourceLoc loc{line_, col_};
            if (pos_ >= text_.size()) {
                out.push_back({Tok::End, "", loc});
                return out;
            }
            char c = text_[pos_];
            if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
                std::string word;
                while (pos_ < text_.size() &&
                       (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
                    word += advance();
                out.push_back({keywords().count(word) ? Tok::Keyword : Tok::Ident, word, loc});
                continue;
            }
            advance();
            switch (c) {
            case ':':
                if (peek() == '=') {
                    advance();
                    out.push_back({Tok::Assign, ":=", loc});
                } else {
                    out.push_back({Tok::Colon, ":", loc});
                }
                break;
            case ';': out.push_back({Tok::Semi, ";", loc}); break;
            case ',': out.push_back({Tok::Comma, ",", loc}); break;
            case '.': out.push_back({Tok::Dot, ".", loc}); break;
            case '(': out.push_back({Tok::LParen, "(", loc}); break;
            case ')': out.push_back({Tok::RParen, ")", loc}); break;
            case '=': out.push_back({Tok::Eq, "=", loc}); break;
            case '/':
                if (peek() == '=') {
                    advance();
                    out.push_back({Tok::Neq, "/=", loc});
                    break;
                }
                [[fallthrough]];
            default:
                diags_.push_back({Diagnostic::Severity::Error, file_, loc,
                                  std::string("unexpected character '") + c + "'"});
                throw Abort{};
            }
        }
    }

private:
    char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }
    char advance() {
        char c = text_[pos_++];
        if (c == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        return c;
    }
    void skip_space() {
        while (pos_ < text_.size()) {
            char c = text_[pos_];
            if (std::isspace(static_cast<unsigned char>(c))) {
                advance();
            } else if (c == '-' && pos_ + 1 < text_.size() && text_[pos_ + 1] == '-') {
                while (pos_ < text_.size() && text_[pos_] != '\n') advance();
            } else {
                break;
            }
        }
    }

    std::string_view text_;
    std::size_t pos_ = 0;
    int line_ = 1;
    int col_ = 1;
    std::vector<Diagnostic>& diags_;
    const std::string& file_;
};

// ---------------------------------------------------------------------------
// Parser. Produces unresolved paths (every label a Field); the resolver
// fixes label kinds and turns some assignments into function calls.

const char* const kMainClass = "MAIN";

class Parser {
public:
    Parser(std::vector<Token> toks, std::vector<Diagnostic>& diags, const std::string& file)
        : toks_(std::move(toks)), diags_(diags), file_(file) {}

    std::vector<ClassDecl> classes;
    ClassDecl main{kMainClass, std::nullopt, {}, {}, {}, true, {}};
    bool has_main_block = false;
    std::vector<Diagnostic> warnings;

    void parse_top() {
        if (at_end()) {
            error(cur().loc, "empty program");
        }
        while (!at_end()) {
            if (is_kw("class")) {
                classes.push_back(parse_class());
            } else if (is_kw("local") || is_kw("do")) {
                if (has_main_block) error(cur().loc, "more than one anonymous main block");
                has_main_block = true;
                RoutineDecl r;
                r.name = "main";
                r.owner = kMainClass;
                r.loc = cur().loc;
                parse_routine_tail(r);
                main.routines.push_back(std::move(r));
            } else if (cur().kind == Tok::Ident) {
                auto loc = cur().loc;
                auto name = take().text;
                RoutineDecl r;
                r.name = name;
                r.owner = kMainClass;
                r.loc = loc;
                parse_routine_signature(r);
                parse_routine_tail(r);
                main.routines.push_back(std::move(r));
            } else {
                error(cur().loc, "expected 'class', a routine or a main block, found '" + cur().text + "'");
            }
        }
    }

private:
    const Token& cur() const { return toks_[pos_]; }
    const Token& ahead(std::size_t k) const { return toks_[std::min(pos_ + k, toks_.size() - 1)]; }
    bool at_end() const { return cur().kind == Tok::End; }
    bool is_kw(const char* kw) const { return cur().kind == Tok::Keyword && cur().text == kw; }
    Token take() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }

    [[noreturn]] void error(SourceLoc loc, std::string msg) {
        diags_.push_back({Diagnostic::Severity::Error, file_, loc, std::move(msg)});
        throw Abort{};
    }
    std::string describe(const Token& t) const {
        return t.kind == Tok::End ? "end of input" : "'" + t.text + "'";
    }
    void expect_kw(const char* kw) {
        if (!is_kw(kw)) error(cur().loc, std::string("expected '") + kw + "', found " + describe(cur()));
        take();
    }
    void expect(Tok k, const char* what) {
        if (cur().kind != k) error(cur().loc, std::string("expected ") + what + ", found " + describe(cur()));
        take();
    }
    std::string ident(const char* what) {
        if (cur().kind != Tok::Ident) error(cur().loc, std::string("expected ") + what + ", found " + describe(cur()));
        return take().text;
    }
    void skip_semis() {
        while (cur().kind == Tok::Semi) take();
    }

    ClassDecl parse_class() {
        ClassDecl c;
        c.loc = cur().loc;
        expect_kw("class");
        c.name = ident("class name");
        if (is_kw("inherit")) {
            take();
            c.parent = ident("parent class name");
            if (is_kw("redefine")) {
                take();
                c.redefines.insert(ident("routine name"));
                while (cur().kind == Tok::Comma) {
                    take();
                    c.redefines.insert(ident("routine name"));
                }
                expect_kw("end");
            }
        }
        while (is_kw("feature")) {
            take();
            while (cur().kind == Tok::Ident) parse_feature(c);
        }
        expect_kw("end");
        return c;
    }

    void parse_feature(ClassDecl& c) {
        auto loc = cur().loc;
        std::vector<std::string> names{ident("feature name")};
        while (cur().kind == Tok::Comma) {
            take();
            names.push_back(ident("feature name"));
        }
        if (names.size() > 1) {
            expect(Tok::Colon, "':'");
            auto type = ident("type name");
            for (auto& n : names) c.attributes.push_back({n, type});
            skip_semis();
            return;
        }
        if (cur().kind == Tok::Colon) {
            take();
            auto type = ident("type name");
            if (!is_kw("local") && !is_kw("do")) {
                c.attributes.push_back({names[0], type});
                skip_semis();
                return;
            }
            RoutineDecl r;
            r.name = names[0];
            r.owner = c.name;
            r.loc = loc;
            r.result_type = type;
            parse_routine_tail(r);
            c.routines.push_back(std::move(r));
            return;
        }
        RoutineDecl r;
        r.name = names[0];
        r.owner = c.name;
        r.loc = loc;
        parse_routine_signature(r);
        parse_routine_tail(r);
        c.routines.push_back(std::move(r));
    }

    void parse_decl_group(std::vector<VarDecl>& out) {
        std::vector<std::string> names{ident("name")};
        while (cur().kind == Tok::Comma) {
            take();
            names.push_back(ident("name"));
        }
        expect(Tok::Colon, "':'");
        auto type = ident("type name");
        for (auto& n : names) out.push_back({n, type});
    }

    void parse_routine_signature(RoutineDecl& r) {
        if (cur().kind == Tok::LParen) {
            take();
            if (cur().kind != Tok::RParen) {
                parse_decl_group(r.formals);
                while (cur().kind == Tok::Semi) {
                    take();
                    parse_decl_group(r.formals);
                }
            }
            expect(Tok::RParen, "')'");
        }
        if (cur().kind == Tok::Colon) {
            take();
            r.result_type = ident("result type");
        }
    }

    void parse_routine_tail(RoutineDecl& r) {
        if (is_kw("local")) {
            take();
            while (cur().kind == Tok::Ident) {
                parse_decl_group(r.locals);
                skip_semis();
            }
        }
        expect_kw("do");
        r.body = parse_block();
        expect_kw("end");
    }

    bool block_ends() const {
        if (at_end()) return true;
        if (cur().kind != Tok::Keyword) return false;
        const auto& t = cur().text;
        return t == "end" || t == "else" || t == "elseif" || t == "until";
    }

    Block parse_block() {
        Block out;
        skip_semis();
        while (!block_ends()) {
            auto instrs = parse_instr();
            for (auto& in : instrs) out.push_back(std::move(in));
            skip_semis();
        }
        return out;
    }

    PathExpr parse_path() {
        std::vector<Label> segs;
        if (is_kw("Current")) {
            take();
        } else {
            segs.push_back(Label::field(ident("a name")));
        }
        while (cur().kind == Tok::Dot) {
            take();
            segs.push_back(Label::field(ident("a name after '.'")));
        }
        return PathExpr{std::move(segs)};
    }

    Operand parse_operand() {
        if (is_kw("Void")) {
            take();
            return {{}, true};
        }
        if (cur().kind != Tok::Ident && !is_kw("Current"))
            error(cur().loc, "expected an expression, found " + describe(cur()));
        return {parse_path(), false};
    }

    std::vector<Operand> parse_args() {
        std::vector<Operand> args;
        expect(Tok::LParen, "'('");
        if (cur().kind != Tok::RParen) {
            args.push_back(parse_operand());
            while (cur().kind == Tok::Comma) {
                take();
                args.push_back(parse_operand());
            }
        }
        expect(Tok::RParen, "')'");
        return args;
    }

    Cond parse_cond() {
        if (is_kw("not")) {
            take();
            return Cond::negate(parse_cond());
        }
        if (cur().kind == Tok::LParen) {
            take();
            auto c = parse_cond();
            expect(Tok::RParen, "')'");
            return c;
        }
        auto loc = cur().loc;
        auto lhs = parse_operand();
        bool eq;
        if (cur().kind == Tok::Eq) eq = true;
        else if (cur().kind == Tok::Neq) eq = false;
        else error(cur().loc, "expected '=' or '/=' in condition, found " + describe(cur()));
        take();
        auto rhs = parse_operand();
        if (lhs.is_void && rhs.is_void) error(loc, "comparison of Void with Void");
        if (lhs.is_void) std::swap(lhs, rhs);
        if (rhs.is_void) return eq ? Cond::eq_void(lhs.path) : Cond::neq_void(lhs.path);
        return eq ? Cond::eq(lhs.path, rhs.path) : Cond::neq(lhs.path, rhs.path);
    }

    static Instr make(Instr::Node node, SourceLoc loc) {
        Instr in;
        in.node = std::move(node);
        in.loc = loc;
        return in;
    }

    std::vector<Instr> parse_instr() {
        std::string label;
        if (cur().kind == Tok::Ident && ahead(1).kind == Tok::Colon) {
            label = take().text;
            take();
        }
        auto loc = cur().loc;
        std::vector<Instr> out;
        if (is_kw("create")) {
            take();
            out.push_back(make(Create{parse_path()}, loc));
        } else if (is_kw("if")) {
            take();
            std::vector<std::pair<Cond, Block>> arms;
            auto c = parse_cond();
            expect_kw("then");
            arms.emplace_back(std::move(c), parse_block());
            std::optional<Block> else_part;
            while (is_kw("elseif")) {
                take();
                auto ci = parse_cond();
                expect_kw("then");
                arms.emplace_back(std::move(ci), parse_block());
            }
            if (is_kw("else")) {
                take();
                else_part = parse_block();
            }
            expect_kw("end");
            out.push_back(make(desugar_conditional(arms, else_part), loc));
        } else if (is_kw("then")) {
            take();
            Choice ch;
            ch.branches.push_back(parse_block());
            if (!is_kw("else")) error(cur().loc, "a choice needs at least two branches; expected 'else'");
            while (is_kw("else")) {
                take();
                ch.branches.push_back(parse_block());
            }
            expect_kw("end");
            out.push_back(make(std::move(ch), loc));
        } else if (is_kw("loop")) {
            take();
            auto body = parse_block();
            expect_kw("end");
            out.push_back(make(Loop{std::move(body)}, loc));
        } else if (is_kw("from")) {
            take();
            auto init = parse_block();
            auto until_loc = cur().loc;
            expect_kw("until");
            parse_cond();
            warnings.push_back({Diagnostic::Severity::Warning, file_, until_loc,
                                "loop exit condition is ignored by the analysis"});
            expect_kw("loop");
            auto body = parse_block();
            expect_kw("end");
            for (auto& in : init) out.push_back(std::move(in));
            out.push_back(make(Loop{std::move(body)}, loc));
        } else if (cur().kind == Tok::Ident || is_kw("Current")) {
            auto path = parse_path();
            if (cur().kind == Tok::Assign) {
                take();
                if (is_kw("Void")) {
                    take();
                    out.push_back(make(Assign{path, {{}, true}}, loc));
                } else {
                    auto rhs = parse_path();
                    if (cur().kind == Tok::LParen) {
                        out.push_back(make(raw_call(rhs, parse_args(), path, loc), loc));
                    } else {
                        out.push_back(make(Assign{path, {rhs, false}}, loc));
                    }
                }
            } else {
                std::vector<Operand> args;
                if (cur().kind == Tok::LParen) args = parse_args();
                out.push_back(make(raw_call(path, std::move(args), std::nullopt, loc), loc));
            }
        } else {
            error(cur().loc, "expected an instruction, found " + describe(cur()));
        }
        if (!label.empty()) {
            if (out.empty()) error(loc, "label without instruction");
            out.front().label = label;
        }
        return out;
    }

    Call raw_call(const PathExpr& path, std::vector<Operand> args, std::optional<PathExpr> result_to,
                  SourceLoc loc) {
        if (path.is_current()) error(loc, "Current is not a routine");
        Call c;
        c.routine = path.segments().back().name;
        if (path.size() > 1) c.target = path.prefix(path.size() - 1);
        c.actuals = std::move(args);
        c.result_to = std::move(result_to);
        return c;
    }

    std::vector<Token> toks_;
    std::size_t pos_ = 0;
    std::vector<Diagnostic>& diags_;
    const std::string& file_;
};

// ---------------------------------------------------------------------------
// Resolver

struct Scope {
    const ClassDecl* cls = nullptr;
    const RoutineDecl* routine = nullptr;
    std::map<std::string, std::string> locals; // name -> type, formals included
    std::set<std::string> formals;
};

class Resolver {
public:
    Resolver(ClassTable& table, std::vector<Diagnostic>& diags, const std::string& file)
        : table_(table), diags_(diags), file_(file) {}

    void run() {
        check_classes();
        if (!diags_.empty()) return;
        for (auto& [name, c] : table_.classes()) {
            for (auto& r : c.routines) {
                Scope s;
                s.cls = &c;
                s.routine = &r;
                if (!build_scope(c, r, s)) continue;
                resolve_block(r.body, s);
            }
        }
    }

private:
    void error(SourceLoc loc, std::string msg) {
        diags_.push_back({Diagnostic::Severity::Error, file_, loc, std::move(msg)});
    }

    void check_type(const std::string& t, SourceLoc loc) {
        if (!table_.has(t)) error(loc, "unknown type '" + t + "'");
    }

    void check_classes() {
        for (auto& [name, c] : table_.classes()) {
            if (c.parent && !table_.has(*c.parent)) {
                error(c.loc, "class " + name + " inherits from unknown class '" + *c.parent + "'");
                continue;
            }
            // Cycle check: walk up at most |classes| steps.
            std::set<std::string> seen{name};
            for (auto p = c.parent; p; p = table_.find(*p)->parent) {
                if (!seen.insert(*p).second) {
                    error(c.loc, "cyclic inheritance involving class " + name);
                    break;
                }
                if (!table_.has(*p)) break;
            }
        }
        if (!diags_.empty()) return;
        for (auto& [name, c] : table_.classes()) {
            std::set<std::string> features;
            for (const auto& a : c.attributes) {
                check_type(a.type, c.loc);
                if (!features.insert(a.name).second)
                    error(c.loc, "duplicate feature '" + a.name + "' in class " + name);
                if (c.parent && table_.attribute_type(*c.parent, a.name))
                    error(c.loc, "attribute '" + a.name + "' of class " + name + " is already inherited");
            }
            for (const auto& r : c.routines) {
                if (!features.insert(r.name).second)
                    error(r.loc, "duplicate feature '" + r.name + "' in class " + name);
                const RoutineDecl* inherited = c.parent ? table_.lookup_routine(*c.parent, r.name) : nullptr;
                if (inherited && !c.redefines.count(r.name))
                    error(r.loc, "routine '" + r.name + "' of class " + name +
                                     " is inherited; list it in a redefine clause");
                if (inherited && inherited->formals.size() != r.formals.size())
                    error(r.loc, "redefinition of '" + r.name + "' changes the number of arguments");
                if (c.parent && table_.attribute_type(*c.parent, r.name))
                    error(r.loc, "routine '" + r.name + "' clashes with an inherited attribute");
            }
            for (const auto& rd : c.redefines) {
                if (!c.own_routine(rd))
                    error(c.loc, "class " + name + " redefines '" + rd + "' but gives no new version");
                else if (!c.parent || !table_.lookup_routine(*c.parent, rd))
                    error(c.loc, "class " + name + " redefines '" + rd + "' which it does not inherit");
            }
        }
    }

    bool build_scope(const ClassDecl& c, const RoutineDecl& r, Scope& s) {
        bool ok = true;
        auto add = [&](const VarDecl& v, bool formal) {
            check_type(v.type, r.loc);
            if (v.name == "Result") {
                error(r.loc, "'Result' cannot be declared");
                ok = false;
                return;
            }
            if (!s.locals.emplace(v.name, v.type).second) {
                error(r.loc, "duplicate name '" + v.name + "' in routine " + r.name);
                ok = false;
            }
            if (table_.attribute_type(c.name, v.name)) {
                error(r.loc, "'" + v.name + "' in routine " + r.name + " hides an attribute of " + c.name);
                ok = false;
            }
            if (formal) s.formals.insert(v.name);
        };
        for (const auto& f : r.formals) add(f, true);
        for (const auto& l : r.locals) add(l, false);
        if (r.result_type) {
            check_type(*r.result_type, r.loc);
            s.locals.emplace("Result", *r.result_type);
        }
        return ok;
    }

    // Resolves label kinds along p; returns the static type or nullopt after
    // reporting an error.
    std::optional<std::string> resolve_path(PathExpr& p, const Scope& s, SourceLoc loc) {
        std::vector<Label> segs = p.segments();
        std::string type = s.cls->name;
        for (std::size_t i = 0; i < segs.size(); ++i) {
            auto& seg = segs[i];
            if (i == 0) {
                if (auto it = s.locals.find(seg.name); it != s.locals.end()) {
                    seg = Label::local(seg.name, 0);
                    type = it->second;
                    continue;
                }
                if (seg.name == "Result") {
                    error(loc, "'Result' used in routine " + s.routine->name + " which returns nothing");
                    return std::nullopt;
                }
            }
            auto at = table_.attribute_type(type, seg.name);
            if (!at) {
                std::string where = i == 0 ? "routine " + s.routine->name : "class " + type;
                error(loc, "unknown name '" + seg.name + "' in " + where);
                return std::nullopt;
            }
            seg = Label::field(seg.name);
            type = *at;
        }
        p = PathExpr{std::move(segs)};
        return type;
    }

    std::optional<std::string> static_type(const PathExpr& prefix, const Scope& s, SourceLoc loc) {
        PathExpr copy = prefix;
        return resolve_path(copy, s, loc);
    }

    void resolve_target(PathExpr& t, const Scope& s, SourceLoc loc, const char* what) {
        if (t.is_current()) {
            error(loc, std::string("Current cannot be the target of ") + what);
            return;
        }
        if (t.size() == 1 && s.formals.count(t.segments()[0].name)) {
            error(loc, "formal argument '" + t.segments()[0].name + "' cannot be the target of " + what);
            return;
        }
        resolve_path(t, s, loc);
    }

    void resolve_operand(Operand& o, const Scope& s, SourceLoc loc) {
        if (!o.is_void) resolve_path(o.path, s, loc);
    }

    void resolve_cond(Cond& c, const Scope& s, SourceLoc loc) {
        switch (c.kind) {
        case Cond::Kind::Eq:
        case Cond::Kind::Neq:
            resolve_path(c.e, s, loc);
            resolve_path(c.f, s, loc);
            break;
        case Cond::Kind::EqVoid:
        case Cond::Kind::NeqVoid:
            resolve_path(c.e, s, loc);
            break;
        case Cond::Kind::Not:
            resolve_cond(c.inner.front(), s, loc);
            break;
        }
    }

    // Returns false after reporting an error.
    bool resolve_call(Call& c, const Scope& s, SourceLoc loc) {
        std::string type = s.cls->name;
        if (c.target) {
            auto t = resolve_path(*c.target, s, loc);
            if (!t) return false;
            type = *t;
        }
        const RoutineDecl* r = table_.lookup_routine(type, c.routine);
        if (!r) {
            error(loc, "unknown routine '" + c.routine + "' in class " + type);
            return false;
        }
        if (r->formals.size() != c.actuals.size()) {
            error(loc, "routine '" + c.routine + "' expects " + std::to_string(r->formals.size()) +
                           " argument(s), got " + std::to_string(c.actuals.size()));
            return false;
        }
        for (auto& a : c.actuals) resolve_operand(a, s, loc);
        if (c.result_to) {
            if (!r->result_type) {
                error(loc, "routine '" + c.routine + "' returns no value");
                return false;
            }
            resolve_target(*c.result_to, s, loc, "an assignment");
        }
        c.static_type = type;
        return true;
    }

    // Whether `name` names a routine rather than an attribute or variable in
    // the context where it occurs.
    bool names_routine(const PathExpr& p, const Scope& s, SourceLoc loc) {
        if (p.is_current()) return false;
        const auto& last = p.segments().back().name;
        std::string type = s.cls->name;
        if (p.size() == 1) {
            if (s.locals.count(last) || last == "Result") return false;
        } else {
            auto t = static_type(p.prefix(p.size() - 1), s, loc);
            if (!t) return false;
            type = *t;
        }
        return !table_.attribute_type(type, last) && table_.lookup_routine(type, last);
    }

    void resolve_block(Block& block, const Scope& s) {
        for (auto& in : block) resolve_instr(in, s);
    }

    void resolve_instr(Instr& in, const Scope& s) {
        auto loc = in.loc;
        if (auto* a = std::get_if<Assign>(&in.node)) {
            if (!a->source.is_void && names_routine(a->source.path, s, loc)) {
                Call c;
                const auto& p = a->source.path;
                c.routine = p.segments().back().name;
                if (p.size() > 1) c.target = p.prefix(p.size() - 1);
                c.result_to = a->target;
                in.node = std::move(c);
                resolve_call(std::get<Call>(in.node), s, loc);
                return;
            }
            resolve_target(a->target, s, loc, "an assignment");
            resolve_operand(a->source, s, loc);
        } else if (auto* cr = std::get_if<Create>(&in.node)) {
            if (cr->target.size() > 1) {
                error(loc, "creation target must be a plain name");
                return;
            }
            resolve_target(cr->target, s, loc, "a creation");
        } else if (auto* c = std::get_if<Call>(&in.node)) {
            resolve_call(*c, s, loc);
        } else if (auto* cp = std::get_if<Compound>(&in.node)) {
            resolve_block(cp->body, s);
        } else if (auto* ch = std::get_if<Choice>(&in.node)) {
            for (auto& b : ch->branches) resolve_block(b, s);
        } else if (auto* g = std::get_if<Guard>(&in.node)) {
            resolve_cond(g->cond, s, loc);
            resolve_block(g->body, s);
        } else if (auto* l = std::get_if<Loop>(&in.node)) {
            resolve_block(l->body, s);
        }
    }

    ClassTable& table_;
    std::vector<Diagnostic>& diags_;
    const std::string& file_;
};

void number_points(Block& block, int& next, std::set<std::string>& labels,
                   std::vector<Diagnostic>& diags, const std::string& file) {
    for (auto& in : block) {
        in.point = next++;
        if (!in.label.empty() && !labels.insert(in.label).second)
            diags.push_back({Diagnostic::Severity::Error, file, in.loc, "duplicate label '" + in.label + "'"});
        std::visit(
            [&](auto& n) {
                using T = std::decay_t<decltype(n)>;
                if constexpr (std::is_same_v<T, Compound> || std::is_same_v<T, Guard> ||
                              std::is_same_v<T, Loop>) {
                    number_points(n.body, next, labels, diags, file);
                } else if constexpr (std::is_same_v<T, Choice>) {
                    for (auto& b : n.branches) number_points(b, next, labels, diags, file);
                }
            },
            in.node);
    }
}

} // namespace

Program parse_program(std::string_view text, const std::string& file) {
    std::vector<Diagnostic> diags;
    Program prog;
    prog.file = file;
    try {
        Lexer lex(text, diags, file);
        Parser p(lex.run(), diags, file);
        p.parse_top();
        prog.warnings = std::move(p.warnings);
        for (auto& c : p.classes) {
            if (prog.classes.has(c.name) || (c.name == kMainClass && !p.main.routines.empty())) {
                diags.push_back({Diagnostic::Severity::Error, file, c.loc, "duplicate class '" + c.name + "'"});
                continue;
            }
            prog.classes.add(std::move(c));
        }
        if (!p.main.routines.empty()) {
            prog.main_class = kMainClass;
            prog.classes.add(std::move(p.main));
        }
    } catch (const Abort&) {
    }
    if (!diags.empty()) throw ParseError(std::move(diags));

    Resolver(prog.classes, diags, file).run();
    std::set<std::string> labels;
    int next = 0;
    for (auto& [name, c] : prog.classes.classes())
        for (auto& r : c.routines) number_points(r.body, next, labels, diags, file);
    prog.point_count = next;
    if (!diags.empty()) throw ParseError(std::move(diags));
    return prog;
}

// ---------------------------------------------------------------------------
// Expression universe

namespace {

void add_cond(ExprUniverse& u, const Cond& c) {
    if (c.kind == Cond::Kind::Not) return add_cond(u, c.inner.front());
    u.insert(c.e);
    u.insert(c.f);
}

} // namespace

ExprUniverse build_expr_universe(const Block& body) {
    ExprUniverse u;
    for_each_instr(body, [&](const Instr& in) {
        std::visit(
            [&](const auto& n) {
                using T = std::decay_t<decltype(n)>;
                if constexpr (std::is_same_v<T, Assign>) {
                    u.insert(n.target);
                    if (!n.source.is_void) u.insert(n.source.path);
                } else if constexpr (std::is_same_v<T, Create>) {
                    u.insert(n.target);
                } else if constexpr (std::is_same_v<T, Guard>) {
                    add_cond(u, n.cond);
                } else if constexpr (std::is_same_v<T, Call>) {
                    if (n.target) u.insert(*n.target);
                    for (const auto& a : n.actuals)
                        if (!a.is_void) u.insert(a.path);
                    if (n.result_to) u.insert(*n.result_to);
                }
            },
            in.node);
    });
    return u;
}

ExprUniverse build_expr_universe(const Program& program) {
    ExprUniverse u;
    for (const auto& [name, c] : program.classes.classes())
        for (const auto& r : c.routines)
            for (const auto& p : build_expr_universe(r.body)) u.insert(p);
    return u;
}

// ---------------------------------------------------------------------------
// Printer

namespace {

std::string pad(int indent) { return std::string(static_cast<std::size_t>(indent) * 4, ' '); }

std::string args_str(const std::vector<Operand>& actuals) {
    if (actuals.empty()) return "";
    std::string s = " (";
    for (std::size_t i = 0; i < actuals.size(); ++i) {
        if (i) s += ", ";
        s += actuals[i].str();
    }
    return s + ")";
}

void print_instr(std::ostringstream& os, const Instr& in, int indent);

void print_body(std::ostringstream& os, const Block& b, int indent) {
    for (const auto& in : b) print_instr(os, in, indent);
}

void print_instr(std::ostringstream& os, const Instr& in, int indent) {
    std::string lab = in.label.empty() ? "" : in.label + ": ";
    std::visit(
        [&](const auto& n) {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, Assign>) {
                os << pad(indent) << lab << n.target.str() << " := " << n.source.str() << '\n';
            } else if constexpr (std::is_same_v<T, Create>) {
                os << pad(indent) << lab << "create " << n.target.str() << '\n';
            } else if constexpr (std::is_same_v<T, Call>) {
                os << pad(indent) << lab;
                if (n.result_to) os << n.result_to->str() << " := ";
                if (n.target) os << n.target->str() << '.';
                os << n.routine << args_str(n.actuals) << '\n';
            } else if constexpr (std::is_same_v<T, Compound>) {
                // Only built programmatically; printed inline.
                print_body(os, n.body, indent);
            } else if constexpr (std::is_same_v<T, Loop>) {
                os << pad(indent) << lab << "loop\n";
                print_body(os, n.body, indent + 1);
                os << pad(indent) << "end\n";
            } else if constexpr (std::is_same_v<T, Guard>) {
                os << pad(indent) << lab << "if " << n.cond.str() << " then\n";
                print_body(os, n.body, indent + 1);
                os << pad(indent) << "end\n";
            } else if constexpr (std::is_same_v<T, Choice>) {
                if (n.from_if) {
                    for (std::size_t i = 0; i + 1 < n.branches.size(); ++i) {
                        const auto& g = std::get<Guard>(n.branches[i].front().node);
                        os << pad(indent) << (i == 0 ? lab + "if " : std::string("elseif ")) << g.cond.str()
                           << " then\n";
                        print_body(os, g.body, indent + 1);
                    }
                    os << pad(indent) << "else\n";
                    print_body(os, std::get<Guard>(n.branches.back().front().node).body, indent + 1);
                    os << pad(indent) << "end\n";
                } else {
                    for (std::size_t i = 0; i < n.branches.size(); ++i) {
                        os << pad(indent) << (i == 0 ? lab + "then" : std::string("else")) << '\n';
                        print_body(os, n.branches[i], indent + 1);
                    }
                    os << pad(indent) << "end\n";
                }
            }
        },
        in.node);
}

std::string decls_str(const std::vector<VarDecl>& ds, const char* sep) {
    std::string s;
    for (std::size_t i = 0; i < ds.size(); ++i) {
        if (i) s += sep;
        s += ds[i].name + ": " + ds[i].type;
    }
    return s;
}

void print_routine(std::ostringstream& os, const RoutineDecl& r, int indent, bool anonymous) {
    if (!anonymous) {
        os << pad(indent) << r.name;
        if (!r.formals.empty()) os << " (" << decls_str(r.formals, "; ") << ")";
        if (r.result_type) os << ": " << *r.result_type;
        os << '\n';
    }
    if (!r.locals.empty()) os << pad(indent + (anonymous ? 0 : 1)) << "local " << decls_str(r.locals, "; ") << '\n';
    os << pad(indent + (anonymous ? 0 : 1)) << "do\n";
    print_body(os, r.body, indent + (anonymous ? 1 : 2));
    os << pad(indent + (anonymous ? 0 : 1)) << "end\n";
}

} // namespace

std::string print_block(const Block& block, int indent) {
    std::ostringstream os;
    print_body(os, block, indent);
    return os.str();
}

std::string print_program(const Program& program) {
    std::ostringstream os;
    for (const auto& [name, c] : program.classes.classes()) {
        if (c.implicit) continue;
        os << "class " << name;
        if (c.parent) {
            os << " inherit " << *c.parent;
            if (!c.redefines.empty()) {
                os << " redefine ";
                bool first = true;
                for (const auto& r : c.redefines) {
                    os << (first ? "" : ", ") << r;
                    first = false;
                }
                os << " end";
            }
        }
        os << '\n';
        if (!c.attributes.empty() || !c.routines.empty()) os << "feature\n";
        for (const auto& a : c.attributes) os << "    " << a.name << ": " << a.type << '\n';
        for (const auto& r : c.routines) print_routine(os, r, 1, false);
        os << "end\n\n";
    }
    if (program.main_class) {
        const auto* m = program.classes.find(*program.main_class);
        for (const auto& r : m->routines)
            if (r.name != "main") print_routine(os, r, 0, false);
        if (auto r = m->own_routine("main")) print_routine(os, *r, 0, true);
    }
    return os.str();
}

} // namespace aliasgraph
