#pragma once

#include <cstdint>
#include <limits>

#include "deqa/core.hpp"

namespace deqa {

struct FixpointLimits {
    uint64_t maxFacts = std::numeric_limits<uint64_t>::max();
    uint32_t maxDepth = std::numeric_limits<uint16_t>::max();
    uint64_t maxRounds = std::numeric_limits<uint64_t>::max();
};

enum class RunStatus : uint8_t { Complete, LimitHit };

struct FixpointResult {
    Instance instance;
    RunStatus status;
    uint64_t rounds;
};

// Semi-naive least fixpoint of p on b, treating equality as an ordinary
// predicate. Facts whose maximum term depth exceeds lim.maxDepth are
// suppressed and the run is flagged LimitHit. Throws on unsafe rules.
FixpointResult fixpoint(Store& store, const Program& p, const Instance& b,
                        const FixpointLimits& lim = {});

// All facts in i over predicate q whose arguments are constants only.
std::vector<Atom> answers(const Store& store, const Instance& i, PredId q);

// Maximum atom depth over all facts of i.
uint32_t maxFactDepth(const Store& store, const Instance& i);

}  // namespace deqa
