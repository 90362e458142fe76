#pragma once

#include "deqa/chase.hpp"
#include "deqa/relevance.hpp"

namespace deqa {

enum class AnswerMode : uint8_t { Full, Relevance, Magic, Both };

struct RunStats {
    size_t rulesP3 = 0;
    size_t rulesP4 = 0;
    size_t rulesP5 = 0;
    size_t rulesP6 = 0;
    size_t rulesP7 = 0;
    size_t totalFacts = 0;
    size_t usefulFacts = 0;
    double parseSeconds = 0;
    double transformSeconds = 0;
    double chaseSeconds = 0;
    ChaseStatus status = ChaseStatus::Complete;
};

struct PipelineOptions {
    AnswerMode mode = AnswerMode::Both;
    FixpointLimits limits;
    bool una = false;                          // in addition to the scenario's flag
    bool disableFunctionalReflexivity = false;
    bool collapseFunctions = false;
    AbstractionChoice abstraction = AbstractionChoice::Critical;
};

struct PipelineResult {
    std::vector<Atom> answers;   // over all declared query predicates, sorted
    RunStats stats;
    ChaseResult chaseResult;
    Program finalProgram;        // empty in Full mode
};

// True for the bookkeeping predicates (D, F_*, fnval_*, magic) that are
// excluded from the "useful" fact count.
bool isAuxiliaryPred(const Store& store, PredId p);

// Facts of the model over the scenario's own predicates.
std::vector<Atom> usefulFacts(const Store& store, const Instance& model);

PipelineResult answerPipeline(Store& store, const Scenario& scenario,
                              const PipelineOptions& opts = {});

std::string statsToJson(const RunStats& stats);
std::string statsToText(const RunStats& stats);

}  // namespace deqa
