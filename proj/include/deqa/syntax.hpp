#pragma once

#include <string>
#include <string_view>

#include "deqa/core.hpp"

namespace deqa {

// A parsed scenario file: dependencies, base facts, and declarations.
struct Scenario {
    Store* store = nullptr;
    std::vector<Dependency> deps;
    std::vector<Atom> facts;
    std::vector<PredId> queryPreds;
    std::vector<FnId> trueFns;
    bool una = false;
};

class ParseError : public Error {
public:
    ParseError(const std::string& what, int line, int col)
        : Error(what + " at line " + std::to_string(line) + ", column " + std::to_string(col)),
          line(line),
          col(col) {}
    int line;
    int col;
};

// Parses the scenario format: dependencies `body -> [exists ?v,... .] head .`,
// facts `P(a,b).`, declarations `@query Q/1.`, `@true_function f/1.`,
// `@skolem_function g/1.`, `@una.`, comments `# ...`. Variables are
// standardised apart per dependency. Undeclared function symbols default to
// True kind.
Scenario parseScenario(Store& store, std::string_view text);

// Parses a logic program in the same syntax: every statement with `->` must
// have a single head atom and no existential quantifier. Facts are rejected.
Program parseProgram(Store& store, std::string_view text);

std::string render(const Store& store, const Scenario& s);
std::string render(const Store& store, const Program& p);
std::string render(const Store& store, const Instance& i);
std::string render(const Store& store, const Atom& a);
std::string render(const Store& store, const Rule& r);
std::string render(const Store& store, const Dependency& d);
std::string renderTerm(const Store& store, TermId t);

}  // namespace deqa
