// cli.cpp

#include "aliasgraph/cli.hpp"

#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <unistd.h>

namespace aliasgraph {

namespace fs = std::filesystem;

bool color_from_env() {
    if (const char* v = std::getenv("ALIASGRAPH_COLOR")) return std::string(v) == "1";
    return isatty(STDERR_FILENO) != 0;
}

namespace {

std::string paint(const std::string& msg, bool error, bool color) {
    if (!color) return msg;
    return std::string(error ? "\033[31m" : "\033[33m") + msg + "\033[0m";
}

std::optional<std::string> slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return std::nullopt;
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string yes_no(bool b) { return b ? "yes" : "no"; }

} // namespace

Outcome analyze_source(const std::string& text, const RunConfig& config) {
    Outcome o;
    o.report.program = config.input;
    Program program;
    try {
        program = parse_program(text, config.input);
    } catch (const ParseError& e) {
        for (const auto& d : e.diagnostics()) o.messages.push_back(paint(d.str(), true, config.color));
        o.status = kInputError;
        return o;
    }
    for (const auto& w : program.warnings) {
        o.messages.push_back(paint(w.str(), false, config.color));
        o.report.diagnostics.push_back(w.str());
    }

    std::optional<Version> entry = config.entry ? program.find_entry(*config.entry) : program.default_entry();
    if (!entry) {
        std::string what = config.entry ? "entry routine '" + *config.entry + "' not found"
                                        : "no entry routine; pass --entry Class.routine";
        o.messages.push_back(paint(config.input + ": error: " + what, true, config.color));
        o.status = kInputError;
        return o;
    }
    o.report.entry = entry->type + "." + entry->routine->name;

    AnalysisOptions opts;
    opts.cap = config.cap;
    opts.max_iters = config.max_iters;
    opts.snapshots = config.points || config.at.has_value() || config.deutsch;
    Engine engine(program, opts);
    AnalysisResult res = engine.analyze(*entry);

    bool errors = false;
    for (const auto& d : res.diagnostics) {
        bool err = d.severity == Diagnostic::Severity::Error;
        errors = errors || err;
        o.messages.push_back(paint(d.str(), err, config.color));
        o.report.diagnostics.push_back(d.str());
    }

    const ExprUniverse E = build_expr_universe(program);
    if (opts.snapshots)
        for (const auto& [label, g] : res.points) o.report.points.push_back({label, alias_pairs(g, E)});
    o.report.final_pairs = alias_pairs(res.final_diagram, E);

    const Diagram* shown = &res.final_diagram;
    if (config.at) {
        auto it = res.points.find(*config.at);
        if (it == res.points.end()) {
            o.messages.push_back(paint(config.input + ": error: unknown program point '" + *config.at + "'", true,
                                       config.color));
            o.status = kInputError;
            return o;
        }
        shown = &it->second;
    }
    o.shown = *shown;

    for (const auto& q : config.queries) {
        PathExpr p;
        try {
            p = scoped_path(entry->routine, q);
        } catch (const DiagramError& e) {
            o.messages.push_back(paint(config.input + ": error: " + e.what(), true, config.color));
            o.status = kInputError;
            return o;
        }
        QueryAnswer a;
        a.path = p.str();
        a.at = config.at.value_or("");
        try {
            for (const auto& r : query_alias(*shown, p, E, config.max_path_len)) a.aliases.push_back(r.str());
        } catch (const QueryError& e) {
            o.messages.push_back(paint(config.input + ": error: " + e.what(), true, config.color));
            o.status = kInputError;
            return o;
        }
        o.report.queries.push_back(std::move(a));
    }

    if (config.deutsch) {
        auto l2 = res.points.find("L2");
        auto l3 = res.points.find("L3");
        if (l2 == res.points.end() || l3 == res.points.end()) {
            o.messages.push_back(paint(config.input + ": error: the list checks need program points L2 and L3", true,
                                       config.color));
            o.status = kInputError;
            return o;
        }
        auto X = scoped_path(entry->routine, "X");
        auto Y = scoped_path(entry->routine, "Y");
        auto d = check_deutsch(l2->second, l3->second, X, Y, Label::field("hd"), Label::field("tl"),
                               config.deutsch_depth);
        o.report.deutsch = std::map<std::string, std::string>{
            {"P1", yes_no(d.p1)}, {"P2", yes_no(d.p2)}, {"P3", yes_no(d.p3)},
            {"P4", yes_no(d.p4)}, {"P5", yes_no(d.p5)}, {"unaliased_world_L2", yes_no(d.unaliased_world)}};
    }
    o.status = errors ? kAnalysisDiagnostics : kOk;
    return o;
}

int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
    auto text = slurp(config.input);
    if (!text) {
        err << paint(config.input + ": error: cannot read file", true, config.color) << '\n';
        return kInputError;
    }
    Outcome o = analyze_source(*text, config);
    for (const auto& m : o.messages) err << m << '\n';
    if (o.status == kInputError) return o.status;

    auto write = [&](const std::string& path, const std::string& content) {
        std::ofstream f(path, std::ios::binary);
        if (!f) {
            err << paint(path + ": error: cannot write file", true, config.color) << '\n';
            return false;
        }
        f << content;
        return true;
    };
    if (config.json_file && !write(*config.json_file, emit_json(o.report))) return kInputError;
    if (config.dot_file && !write(*config.dot_file, emit_dot(*o.shown))) return kInputError;

    if (config.format == "json") {
        out << emit_json(o.report);
    } else if (config.format == "dot") {
        out << emit_dot(*o.shown);
    } else {
        out << "entry " << o.report.entry << '\n';
        for (const auto& p : o.report.points) {
            out << "at " << p.label << ":";
            for (const auto& [a, b] : p.pairs) out << " (" << a << ", " << b << ")";
            out << '\n';
        }
        out << "final:";
        for (const auto& [a, b] : o.report.final_pairs) out << " (" << a << ", " << b << ")";
        out << '\n';
        for (const auto& q : o.report.queries) {
            out << "aliases of " << q.path << (q.at.empty() ? "" : " at " + q.at) << ":";
            for (const auto& a : q.aliases) out << ' ' << a;
            out << '\n';
        }
        if (o.report.deutsch)
            for (const auto& [k, v] : *o.report.deutsch) out << k << ": " << v << '\n';
    }
    return o.status;
}

// ---------------------------------------------------------------------------
// Corpus runner

namespace {

using nlohmann::json;

PairSet pairs_of(const json& arr) {
    PairSet out;
    for (const auto& p : arr) {
        auto a = p.at(0).get<std::string>();
        auto b = p.at(1).get<std::string>();
        if (b < a) std::swap(a, b);
        out.insert({a, b});
    }
    return out;
}

std::string show(const PairSet& ps) {
    std::string s = "{";
    for (const auto& [a, b] : ps) s += (s.size() > 1 ? ", " : "") + ("(" + a + "," + b + ")");
    return s + "}";
}

std::string diff(const PairSet& want, const PairSet& got) {
    PairSet missing, extra;
    for (const auto& p : want)
        if (!got.count(p)) missing.insert(p);
    for (const auto& p : got)
        if (!want.count(p)) extra.insert(p);
    std::string s;
    if (!missing.empty()) s += " missing " + show(missing);
    if (!extra.empty()) s += " unexpected " + show(extra);
    return s;
}

// Empty string when the file meets its expectation.
std::string check_one(const fs::path& src, const json& want, bool color) {
    RunConfig cfg;
    cfg.input = src.string();
    cfg.color = color;
    if (want.contains("entry")) cfg.entry = want["entry"].get<std::string>();
    if (want.contains("cap")) cfg.cap = want["cap"].get<unsigned>();
    cfg.points = want.contains("points");
    cfg.deutsch = want.contains("deutsch");
    auto text = slurp(cfg.input);
    if (!text) return "cannot read source";
    Outcome o = analyze_source(*text, cfg);

    std::string problems;
    int status = want.value("status", 0);
    if (o.status != status)
        problems += " exit status " + std::to_string(o.status) + ", expected " + std::to_string(status);
    if (want.contains("diagnostics_contain")) {
        for (const auto& needle : want["diagnostics_contain"]) {
            bool found = false;
            for (const auto& m : o.messages) found = found || m.find(needle.get<std::string>()) != std::string::npos;
            if (!found) problems += " no diagnostic mentions '" + needle.get<std::string>() + "'";
        }
    }
    if (o.status == kInputError) return problems;
    if (want.contains("final")) {
        auto d = diff(pairs_of(want["final"].at("pairs")), o.report.final_pairs);
        if (!d.empty()) problems += " final:" + d;
    }
    if (want.contains("points")) {
        for (const auto& p : want["points"]) {
            auto label = p.at("label").get<std::string>();
            auto it = std::find_if(o.report.points.begin(), o.report.points.end(),
                                   [&](const PointReport& pr) { return pr.label == label; });
            if (it == o.report.points.end()) {
                problems += " no snapshot at " + label;
                continue;
            }
            auto d = diff(pairs_of(p.at("pairs")), it->pairs);
            if (!d.empty()) problems += " at " + label + ":" + d;
        }
    }
    if (want.contains("deutsch")) {
        for (const auto& [k, v] : want["deutsch"].items()) {
            if (!o.report.deutsch || !o.report.deutsch->count(k)) {
                problems += " no result for " + k;
            } else if (o.report.deutsch->at(k) != v.get<std::string>()) {
                problems += " " + k + " is " + o.report.deutsch->at(k) + ", expected " + v.get<std::string>();
            }
        }
    }
    return problems;
}

} // namespace

int run_corpus(const std::string& dir, std::ostream& out, std::ostream& err, bool color) {
    std::error_code ec;
    if (!fs::is_directory(dir, ec)) {
        err << paint(dir + ": error: not a directory", true, color) << '\n';
        return kInputError;
    }
    std::vector<fs::path> sources;
    for (const auto& ent : fs::directory_iterator(dir))
        if (ent.is_regular_file() && ent.path().extension() == ".oo") sources.push_back(ent.path());
    std::sort(sources.begin(), sources.end());

    unsigned passed = 0, failed = 0, skipped = 0;
    for (const auto& src : sources) {
        auto exp_path = src.parent_path() / (src.stem().string() + ".expected.json");
        auto exp_text = slurp(exp_path.string());
        if (!exp_text) {
            err << paint(src.string() + ": warning: no expectation file, skipped", false, color) << '\n';
            ++skipped;
            continue;
        }
        std::string problems;
        try {
            problems = check_one(src, json::parse(*exp_text), color);
        } catch (const std::exception& e) {
            problems = std::string(" bad expectation: ") + e.what();
        }
        if (problems.empty()) {
            out << "PASS " << src.filename().string() << '\n';
            ++passed;
        } else {
            out << "FAIL " << src.filename().string() << ":" << problems << '\n';
            ++failed;
        }
    }
    out << passed << " passed, " << failed << " failed, " << skipped << " skipped\n";
    return failed == 0 ? kOk : kAnalysisDiagnostics;
}

} // namespace aliasgraph
