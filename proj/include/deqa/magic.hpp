#pragma once

#include "deqa/eq_axioms.hpp"

namespace deqa {

// Sideways information passing: an ordering of the body atoms with one
// adornment per atom. Equality adornments are "bf" or "fb"; their bound side
// must be grounded by preceding relational atoms.
struct SipsResult {
    std::vector<size_t> order;           // indices into the body
    std::vector<std::string> adornments;
};

SipsResult sips(Store& store, const std::vector<Atom>& body, const std::vector<TermId>& bound);

struct MagicOptions {
    bool disableFunctionalReflexivity = false;
};

// The magic sets transformation for well-formed programs with the symmetric
// equality adornment. The result is evaluated together with its
// magic-aware singularisation axioms (magicSg).
Program magic(Store& store, const Program& p, const MagicOptions& opts = {});

// SG axioms for a magic output: domain rules are not instantiated for the
// magic predicates.
Program magicSg(Store& store, const Program& r, const AxiomOptions& opts = {});

}  // namespace deqa
