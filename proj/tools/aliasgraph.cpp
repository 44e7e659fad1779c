// aliasgraph - may-alias analysis from the command line.

#include "aliasgraph/cli.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
    CLI::App app{"aliasgraph: flow- and call-site-sensitive may-alias analysis"};
    app.require_subcommand(1);

    aliasgraph::RunConfig cfg;
    std::string entry, at, dot, json;
    unsigned max_path_len = 6;

    auto* analyze = app.add_subcommand("analyze", "analyze one program");
    analyze->add_option("file", cfg.input, "source file (.oo)")->required();
    analyze->add_option("--entry", entry, "entry routine, Class.routine or routine");
    analyze->add_option("--cap", cfg.cap, "creation cap N")->check(CLI::PositiveNumber);
    analyze->add_option("--max-iters", cfg.max_iters, "fixpoint iteration ceiling")->check(CLI::PositiveNumber);
    auto* mpl = analyze->add_option("--max-path-len", max_path_len,
                                    "also answer queries with diagram paths up to this length (default 6)")
                    ->check(CLI::PositiveNumber);
    analyze->add_flag("--points", cfg.points, "report alias pairs at labeled program points");
    analyze->add_option("--at", at, "program point for queries and --dot");
    analyze->add_option("--query", cfg.queries, "path to query (repeatable)");
    analyze->add_flag("--deutsch", cfg.deutsch, "check list properties P1-P5 on X, Y, hd, tl at L2/L3");
    analyze->add_option("--dot", dot, "write the diagram as Graphviz");
    analyze->add_option("--json", json, "write the report as JSON");
    analyze->add_option("--format", cfg.format, "stdout format")->check(CLI::IsMember({"text", "json", "dot"}));

    std::string dir;
    auto* corpus = app.add_subcommand("corpus", "check a directory of programs against expectations");
    corpus->add_option("dir", dir, "directory with NAME.oo and NAME.expected.json")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : aliasgraph::kInputError;
    }

    bool color = aliasgraph::color_from_env();
    if (corpus->parsed()) return aliasgraph::run_corpus(dir, std::cout, std::cerr, color);

    cfg.color = color;
    if (!entry.empty()) cfg.entry = entry;
    if (!at.empty()) cfg.at = at;
    if (!dot.empty()) cfg.dot_file = dot;
    if (!json.empty()) cfg.json_file = json;
    if (mpl->count() > 0) cfg.max_path_len = max_path_len;
    return aliasgraph::run(cfg, std::cout, std::cerr);
}
