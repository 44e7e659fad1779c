// cli.hpp - driver behind the aliasgraph command.

#ifndef ALIASGRAPH_CLI_HPP
#define ALIASGRAPH_CLI_HPP

#include "aliasgraph/query.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace aliasgraph {

enum ExitStatus : int { kOk = 0, kAnalysisDiagnostics = 1, kInputError = 2 };

struct RunConfig {
    std::string input;
    std::optional<std::string> entry;
    unsigned cap = 1;
    unsigned max_iters = 1000;
    std::optional<unsigned> max_path_len; // widens queries beyond E when set
    bool points = false;
    std::optional<std::string> at;
    std::vector<std::string> queries;
    bool deutsch = false;
    unsigned deutsch_depth = 3;
    std::optional<std::string> dot_file;
    std::optional<std::string> json_file;
    std::string format = "text"; // text | json | dot
    bool color = false;
};

struct Outcome {
    int status = kOk;
    AnalysisReport report;
    std::optional<Diagram> shown; // final diagram, or the one at --at
    std::vector<std::string> messages; // already formatted diagnostics
};

// Parses and analyzes `text` without touching the file system.
Outcome analyze_source(const std::string& text, const RunConfig& config);

int run(const RunConfig& config, std::ostream& out, std::ostream& err);

// Checks every NAME.oo in dir against NAME.expected.json.
int run_corpus(const std::string& dir, std::ostream& out, std::ostream& err, bool color = false);

// ALIASGRAPH_COLOR=0|1, falling back to whether stderr is a terminal.
bool color_from_env();

} // namespace aliasgraph

#endif // ALIASGRAPH_CLI_HPP
