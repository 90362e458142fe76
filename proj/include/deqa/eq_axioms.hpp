#pragma once

#include "deqa/core.hpp"

namespace deqa {

// Options controlling which predicates receive domain rules and whether the
// functional-reflexivity part is emitted at all.
struct AxiomOptions {
    // Extra predicates (typically the base-instance signature) to cover with
    // domain and congruence rules.
    std::vector<PredId> extraPreds;
    // Skip domain rules for magic predicates (m_*). Used for the output of
    // the magic sets transformation.
    bool skipMagicDomains = false;
    // Drop the (D-restricted) functional reflexivity rules entirely.
    bool disableFunctionalReflexivity = false;
};

// Predicates with reserved roles, recognised by name.
bool isMagicPred(const Store& store, PredId p);
bool isFnPred(const Store& store, PredId p);   // F_<symbol> introduced by defun
bool isDomainPred(const Store& store, PredId p);
PredId domainPred(Store& store);

// Full equality axiomatisation: domain rules per constant and predicate
// position, reflexivity, symmetry, transitivity, functional reflexivity per
// True function symbol, and congruence per predicate position.
Program buildEq(Store& store, const Program& p, const AxiomOptions& opts = {});

// Singularisation axioms: as buildEq but without congruence rules and with
// functional reflexivity D-restricted.
Program buildSg(Store& store, const Program& p, const AxiomOptions& opts = {});

// Just the domain rules (constants of p, plus predicate positions).
Program buildDom(Store& store, const Program& p, const AxiomOptions& opts = {});

}  // namespace deqa
