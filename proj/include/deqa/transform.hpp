#pragma once

#include "deqa/syntax.hpp"

namespace deqa {

// Drops second-order quantification: every function symbol mentioned by the
// scenario's dependencies becomes a True function symbol (the parser already
// defaults undeclared symbols to True), and each conjunct stands alone.
std::vector<Dependency> fol(Store& store, const Scenario& s);

enum class SingularisationStrategy : uint8_t {
    // Scan body atoms left to right, arguments left to right; keep the first
    // qualifying occurrence of a variable and rename each later one.
    KeepFirst,
    // Alternative hook: keep the last occurrence instead.
    KeepLast,
};

std::vector<Dependency> singularise(Store& store, const std::vector<Dependency>& deps,
                                    const std::vector<PredId>& queryPreds,
                                    SingularisationStrategy strategy = SingularisationStrategy::KeepFirst);

// Skolemises existential variables over the universally quantified variables
// free in the head, then normalises heads to one atom per rule.
Program skolemise(Store& store, const std::vector<Dependency>& deps,
                  const std::vector<PredId>& queryPreds);

struct WellFormedness {
    bool ok = true;
    std::vector<std::string> diagnostics;
};

WellFormedness checkWellFormed(Store& store, const Program& p);

// Removes constants and functional terms from rule bodies via the F_c / F_f
// predicates, axiomatising F_f for head occurrences and (for True symbols)
// through the domain-guarded rule.
Program defun(Store& store, const Program& p, bool disableFunctionalReflexivity = false);

// Eliminates body equalities x = t with t a variable or constant by
// substitution. In strict mode an equality between two non-variable terms
// surviving the rewrite is an error: after defun no such atom can remain.
// Non-strict mode keeps deeper equalities for the chase to evaluate, which
// is what the pipeline needs when the function-removal step is skipped.
Program desg(Store& store, const Program& p, bool strict = true);

}  // namespace deqa
