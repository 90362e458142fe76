#pragma once

#include <memory>
#include <unordered_map>

#include "deqa/evaluator.hpp"
#include "deqa/syntax.hpp"

namespace deqa {

enum class ChaseStatus : uint8_t { Complete, LimitHit, UnaViolation };

struct ChaseResult {
    Instance model;                               // final facts, fnval entries included
    std::unordered_map<TermId, TermId> mu;        // constant -> representative constant
    ChaseStatus status = ChaseStatus::Complete;
    std::vector<std::pair<TermId, TermId>> unaViolations;
    uint64_t steps = 0;

    TermId representative(TermId c) const {
        auto it = mu.find(c);
        return it == mu.end() ? c : it->second;
    }
};

// The chase over dependency conjuncts with true-equality semantics: equality
// steps merge terms by the global term order with priority over dependency
// steps, true function symbols are tracked through fnval facts, and the map
// mu records constant representatives. Body constants in relational atoms
// are removed up front by the defun-style constant rewrite.
class ChaseEngine {
public:
    ChaseEngine(Store& store, std::vector<Dependency> conjuncts, const std::vector<Atom>& base,
                FixpointLimits limits = {}, bool una = false);

    ChaseResult run();

private:
    struct Impl;
    std::shared_ptr<Impl> impl_;
};

ChaseResult chase(Store& store, const Scenario& scenario, const FixpointLimits& limits = {});
ChaseResult chase(Store& store, const std::vector<Dependency>& conjuncts,
                  const std::vector<Atom>& base, const FixpointLimits& limits = {},
                  bool una = false);
ChaseResult chaseProgram(Store& store, const Program& p, const std::vector<Atom>& base,
                         const FixpointLimits& limits = {}, bool una = false);

std::vector<Dependency> rulesToConjuncts(const Program& p);

// Answers to q recorded in a chase result: all constant tuples whose
// mu-image appears as a q-fact in the model.
std::vector<Atom> chaseAnswers(Store& store, const ChaseResult& r, PredId q);

}  // namespace deqa
