#pragma once

#include "deqa/evaluator.hpp"

namespace deqa {

enum class AbstractionChoice : uint8_t { Critical, Sorted };

struct RelevanceOptions {
    bool unaKnown = false;
    bool collapseFunctions = false;
    AbstractionChoice abstraction = AbstractionChoice::Critical;
    bool disableFunctionalReflexivity = false;
    FixpointLimits abstractionLimits{/*maxFacts=*/2'000'000, /*maxDepth=*/24,
                                     /*maxRounds=*/std::numeric_limits<uint64_t>::max()};
    std::vector<PredId> basePreds;  // base-instance signature for the axioms
};

// The critical instance: one fact per predicate of b over (constants of p
// plus the fresh constant *).
std::vector<Atom> criticalInstance(Store& store, const Program& p, const std::vector<Atom>& b);

// Backward relevance analysis over an abstraction of the base instance.
// Returns the relevant subset of p's rules (UNA-irrelevant body equalities
// removed when unaKnown). Throws if the abstraction fixpoint hits a limit,
// unless collapseFunctions makes it finite.
Program relevance(Store& store, const Program& p, const std::vector<Atom>& b,
                  const RelevanceOptions& opts = {});

}  // namespace deqa
