#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <shared_mutex>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace deqa {

using TermId = uint32_t;
using PredId = uint32_t;
using FnId = uint32_t;

constexpr TermId kNoTerm = static_cast<TermId>(-1);

enum class TermKind : uint8_t { Constant, Variable, BaseNull, FnNull, App };
enum class FnKind : uint8_t { True, Skolem };

struct FunctionSymbol {
    std::string name;
    uint32_t arity;
    FnKind kind;
};

struct Predicate {
    std::string name;
    uint32_t arity;
};

struct TermData {
    TermKind kind;
    // Constant/Variable: index into the name table; BaseNull: creation index;
    // App: FnId; FnNull: TermId of the wrapped ground App term.
    uint32_t sym;
    std::vector<TermId> args;  // App only
    uint16_t depth;
    bool ground;
};

class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Interning factory for terms, predicates, and function symbols. Terms are
// hash-consed so identity and ordering work on integer ids. Reads may be
// concurrent; writes take the exclusive lock.
class Store {
public:
    Store();

    TermId constant(std::string_view name);
    TermId variable(std::string_view name);
    TermId baseNull(uint32_t index);
    TermId app(FnId fn, const std::vector<TermId>& args);
    TermId fnNull(TermId groundApp);

    const TermData& term(TermId t) const { return terms_[t]; }
    TermKind kind(TermId t) const { return terms_[t].kind; }
    bool isGround(TermId t) const { return terms_[t].ground; }
    uint16_t depth(TermId t) const { return terms_[t].depth; }
    const std::string& constantName(TermId t) const;
    const std::string& variableName(TermId t) const;

    FnId fn(std::string_view name, uint32_t arity, FnKind kind);
    std::optional<FnId> findFn(std::string_view name, uint32_t arity) const;
    const FunctionSymbol& fnInfo(FnId f) const { return fns_[f]; }
    size_t fnCount() const { return fns_.size(); }

    PredId pred(std::string_view name, uint32_t arity);
    std::optional<PredId> findPred(std::string_view name, uint32_t arity) const;
    const Predicate& predInfo(PredId p) const { return preds_[p]; }
    size_t predCount() const { return preds_.size(); }

    PredId eqPred() const { return eqPred_; }
    bool isEq(PredId p) const { return p == eqPred_; }

    // Total order over chase terms: constants < base nulls < functional
    // nulls; constants by name, base nulls by creation index, functional
    // nulls by (function name, recursively ordered arguments). The paper
    // fixes only "constants precede all labelled nulls"; the rest of the key
    // is this implementation's choice, made for reproducible runs.
    int compareChaseTerms(TermId a, TermId b) const;

private:
    TermId intern(TermData&& data);

    mutable std::shared_mutex mutex_;
    std::vector<TermData> terms_;
    std::unordered_map<std::string, TermId> constants_;
    std::unordered_map<std::string, TermId> variables_;
    std::unordered_map<uint32_t, TermId> baseNulls_;
    std::unordered_map<uint64_t, std::vector<TermId>> appBuckets_;
    std::unordered_map<TermId, TermId> fnNulls_;
    std::vector<std::string> names_;  // shared name table for constants/variables

    std::vector<FunctionSymbol> fns_;
    std::unordered_map<std::string, FnId> fnIndex_;  // "name/arity"
    std::vector<Predicate> preds_;
    std::unordered_map<std::string, PredId> predIndex_;
    PredId eqPred_;
};

struct Atom {
    PredId pred;
    std::vector<TermId> args;

    bool operator==(const Atom& o) const { return pred == o.pred && args == o.args; }
};

struct AtomHash {
    size_t operator()(const Atom& a) const {
        size_t h = std::hash<uint32_t>{}(a.pred);
        for (TermId t : a.args) h = h * 1000003u + t;
        return h;
    }
};

struct Rule {
    Atom head;
    std::vector<Atom> body;

    bool operator==(const Rule& o) const { return head == o.head && body == o.body; }
};

struct Dependency {
    std::vector<Atom> body;
    std::vector<TermId> existVars;
    std::vector<Atom> head;
};

struct Program {
    std::vector<Rule> rules;
    std::vector<PredId> queryPreds;
};

// Finite map from variables to terms.
class Substitution {
public:
    TermId lookup(TermId var) const {
        for (const auto& [v, t] : entries_) {
            if (v == var) return t;
        }
        return kNoTerm;
    }
    void bind(TermId var, TermId value) { entries_.emplace_back(var, value); }
    size_t size() const { return entries_.size(); }
    void truncate(size_t n) { entries_.resize(n); }
    const std::vector<std::pair<TermId, TermId>>& entries() const { return entries_; }

private:
    std::vector<std::pair<TermId, TermId>> entries_;
};

// Set of ground atoms with per-predicate storage, duplicate suppression, and
// a posting index on (predicate, position, term) built on demand.
class Instance {
public:
    Instance() = default;
    explicit Instance(Store& store) : store_(&store) {}

    bool insert(const Atom& fact);
    bool contains(const Atom& fact) const;
    size_t size() const { return all_.size(); }
    const std::vector<Atom>& facts() const { return all_; }
    const std::vector<uint32_t>& factsOf(PredId p) const;

    // Facts of predicate p whose argument at `pos` is `t`.
    const std::vector<uint32_t>& postings(PredId p, uint32_t pos, TermId t) const;

    std::vector<PredId> predicates() const;

private:
    Store* store_ = nullptr;
    std::vector<Atom> all_;
    std::unordered_map<Atom, uint32_t, AtomHash> dedup_;
    mutable std::unordered_map<PredId, std::vector<uint32_t>> byPred_;
    mutable std::unordered_map<uint64_t, std::unordered_map<TermId, std::vector<uint32_t>>> index_;
    mutable std::unordered_map<uint64_t, size_t> indexedUpTo_;
};

TermId applySubst(Store& store, TermId t, const Substitution& s);
Atom applySubst(Store& store, const Atom& a, const Substitution& s);

// Collects the variables of t into out, in first-occurrence order.
void collectVars(const Store& store, TermId t, std::vector<TermId>& out);
void collectVars(const Store& store, const Atom& a, std::vector<TermId>& out);

// One-way matching: extends `partial` to sigma with pattern*sigma == fact.
std::optional<Substitution> matchAtom(Store& store, const Atom& pattern, const Atom& fact,
                                      const Substitution& partial);

// True iff r1 subsumes r2: some sigma with body(r1)sigma within body(r2) and
// head(r1)sigma == head(r2). Backtracking search with predicate prefiltering.
bool subsumes(Store& store, const Rule& r1, const Rule& r2);

}  // namespace deqa
