// fixtures.hpp - small builders shared by the test binaries.

#ifndef ALIASGRAPH_TEST_FIXTURES_HPP
#define ALIASGRAPH_TEST_FIXTURES_HPP

#include "aliasgraph/calculus.hpp"
#include "aliasgraph/diagram.hpp"
#include "aliasgraph/lang.hpp"

#include <string>
#include <vector>

namespace fixtures {

using namespace aliasgraph;

struct EdgeSpec {
    std::string label; // a trailing ' makes it a back-pointer
    unsigned from;
    unsigned to;
};

// Field edges between nodes n<from> and n<to>; roots default to {n0}.
Diagram diagram(const std::vector<EdgeSpec>& edges, const std::vector<unsigned>& roots = {0});

NodeId n(unsigned v);
NodeSet nodes(std::initializer_list<unsigned> vs);
PathExpr path(const std::string& text);

// Parses or fails the test run loudly.
Program parse(const std::string& text);

// Body of Class.routine.
const Block& body(const Program& p, const std::string& cls, const std::string& routine);

// Runs Class.routine on g and returns the resulting diagram.
Diagram run(const Program& p, const std::string& cls, const std::string& routine, Diagram g,
            AnalysisOptions opts = {});

// Small starting diagrams used across the tests.
Diagram figure2a();                // a,d:n0->n1  b:n1->n2  c:n0->n2
Diagram figure2b();                // v,w:n0->n4  x:n4->n2 (with n2 present)
Diagram abx();                     // a:n0->n1  b:n0->n2  x:n0->n3
Diagram figure14();                // a:n0->n1  b:n0->n3  x:n0->n2

} // namespace fixtures

#endif
