#pragma once

#include "deqa/syntax.hpp"

namespace deqa {

struct GenParams {
    uint32_t seedQFacts = 1;
    uint32_t maxNumberRules = 10;
    uint32_t maxNumberRulesPerFact = 2;
    uint32_t maxNumberRelBodyAtoms = 3;
    uint32_t maxNumberEqBodyAtoms = 1;
    uint32_t maxTermDepth = 2;
    uint32_t maxNumberTuples = 2;
    uint64_t rngSeed = 0;
    // Probability (as 1/denominator) of the random branches inside the
    // generation algorithms.
    uint32_t branchDenominator = 3;
};

struct GenResult {
    Scenario scenario;
    std::vector<Atom> seedFacts;  // the query facts the derivations target
};

// Seeded random benchmark generator: derivation chains are built backwards
// from the seed query facts, lifted to rules, and the derivation leaves are
// unfolded into a base instance. Every seed fact is guaranteed to be an
// answer of the chase on the generated scenario, and a fixed seed gives a
// byte-identical scenario.
GenResult generateWithSeeds(Store& store, const GenParams& params);
Scenario generate(Store& store, const GenParams& params);

// Conservative chase-termination gate: weak acyclicity of the rules'
// predicate-position graph, with functional head terms contributing the
// special edges.
bool checkAcyclic(Store& store, const std::vector<Rule>& rules);

}  // namespace deqa
