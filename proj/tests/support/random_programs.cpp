#include "support/random_programs.hpp"

#include <algorithm>
#include <sstream>

namespace randprog {

namespace {

class Gen {
public:
    Gen(std::mt19937& rng, unsigned vars, unsigned qualified = 25)
        : rng_(rng), vars_(std::clamp(vars, 1u, 6u)), qualified_(qualified) {}

    std::string var() { return "v" + std::to_string(pick(1, vars_)); }

    std::string source() {
        unsigned k = pick(0, 19);
        if (k == 0) return "Void";
        if (k == 1) return "Current";
        if (k < 6) return var() + "." + var();
        return var();
    }

    std::string target() { return pick(0, 99) < qualified_ ? var() + "." + var() : var(); }

    std::string cond() {
        switch (pick(0, 2)) {
        case 0: return var() + " = Void";
        case 1: return var() + " /= Void";
        default: return var() + " = " + var();
        }
    }

    // One simple instruction: assignment or creation.
    std::string simple() {
        if (pick(0, 3) == 0) return "create " + var();
        return target() + " := " + source();
    }

    unsigned pick(unsigned lo, unsigned hi) { return std::uniform_int_distribution<unsigned>(lo, hi)(rng_); }

private:
    std::mt19937& rng_;
    unsigned vars_;
    unsigned qualified_;
};

void indent(std::ostringstream& os, int depth) { os << std::string(static_cast<std::size_t>(depth) * 4, ' '); }

// Emits up to `budget` instructions; returns how many were used.
unsigned block(Gen& g, const Options& o, std::ostringstream& os, int depth, unsigned budget, unsigned max_len) {
    unsigned used = 0;
    unsigned len = g.pick(1, std::max(1u, max_len));
    for (unsigned i = 0; i < len && used < budget; ++i) {
        unsigned left = budget - used;
        unsigned kind = g.pick(0, 9);
        if (left >= 3 && kind >= 6 && depth < 4) {
            indent(os, depth);
            bool with_cond = o.conditions && kind >= 8;
            os << (with_cond ? "if " + g.cond() + " then\n" : "then\n");
            ++used;
            unsigned a = block(g, o, os, depth + 1, (left - 1) / 2, 3);
            indent(os, depth);
            os << "else\n";
            unsigned b = block(g, o, os, depth + 1, std::max(1u, left - 1 - a), 3);
            indent(os, depth);
            os << "end\n";
            used += a + b;
        } else if (o.loops && left >= 2 && kind == 5 && depth < 3) {
            indent(os, depth);
            os << "loop\n";
            unsigned n = g.pick(1, std::min(o.loop_body, left - 1));
            for (unsigned k = 0; k < n; ++k) {
                indent(os, depth + 1);
                os << g.simple() << "\n";
            }
            indent(os, depth);
            os << "end\n";
            used += 1 + n;
        } else {
            indent(os, depth);
            os << g.simple() << "\n";
            ++used;
        }
    }
    return used;
}

std::string wrap(unsigned vars, const std::string& body) {
    std::ostringstream os;
    os << "class C\nfeature\n    ";
    for (unsigned i = 1; i <= vars; ++i) os << (i > 1 ? ", " : "") << "v" << i;
    os << ": C\n    run\n        do\n" << body << "        end\nend\n";
    return os.str();
}

} // namespace

std::string program(std::mt19937& rng, const Options& opts) {
    Gen g(rng, opts.vars, opts.qualified_percent);
    const unsigned vars = std::clamp(opts.vars, 1u, 6u);
    std::ostringstream os;
    // most variables start attached, or nearly every run dies on a Void call
    unsigned used = 0;
    for (unsigned i = 1; i <= vars && used + 2 < opts.max_instrs; ++i) {
        if (g.pick(0, 3) == 0) continue;
        os << "            create v" << i << "\n";
        ++used;
    }
    const unsigned tail = std::min(opts.tail_writes, opts.max_instrs - used - 1);
    const unsigned room = opts.max_instrs - used - tail;
    const unsigned limit = used + room;
    const unsigned floor = used + room / 2;
    while (used < floor) used += block(g, opts, os, 3, limit - used, limit - used);
    for (unsigned i = 0; i < tail; ++i) os << "            " << g.var() << "." << g.var() << " := " << g.source() << "\n";
    return wrap(vars, os.str());
}

std::string loop_program(std::mt19937& rng, unsigned vars, unsigned body_len) {
    Gen g(rng, vars);
    std::ostringstream os;
    unsigned prefix = g.pick(2, 4);
    for (unsigned i = 1; i <= std::clamp(vars, 1u, 6u); ++i) os << "            create v" << i << "\n";
    for (unsigned i = 0; i < prefix; ++i) os << "            " << g.simple() << "\n";
    os << "            loop\n";
    unsigned n = g.pick(1, std::max(1u, body_len));
    for (unsigned i = 0; i < n; ++i) os << "                " << g.simple() << "\n";
    os << "            end\n";
    return wrap(std::clamp(vars, 1u, 6u), os.str());
}

} // namespace randprog
