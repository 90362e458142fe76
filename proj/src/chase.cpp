#include "deqa/chase.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <set>

namespace deqa {

namespace {

// Mutable fact store supporting term replacement. Slots are append-only;
// rewrites change slot contents in place and mark duplicates dead. Posting
// lists tolerate stale entries, which are filtered at lookup time.
class FactStore {
public:
    explicit FactStore(Store& store) : store_(store) {}

    bool insert(const Atom& fact) {
        auto it = index_.find(fact);
        if (it != index_.end()) return false;
        uint32_t slot = static_cast<uint32_t>(slots_.size());
        slots_.push_back(fact);
        dead_.push_back(false);
        index_.emplace(fact, slot);
        for (size_t i = 0; i < fact.args.size(); ++i) {
            occ_[fact.args[i]].push_back(slot);
            postings_[key(fact.pred, i)][fact.args[i]].push_back(slot);
        }
        byPred_[fact.pred].push_back(slot);
        ++liveCount_;
        return true;
    }

    bool contains(const Atom& fact) const { return index_.count(fact) > 0; }

    size_t liveCount() const { return liveCount_; }
    size_t slotCount() const { return slots_.size(); }

    // Replaces every occurrence of `from` with `to` across all live facts.
    // Rewritten facts move to fresh slots so delta scans pick them up.
    void replaceTerm(TermId from, TermId to) {
        auto it = occ_.find(from);
        if (it == occ_.end()) return;
        std::vector<uint32_t> slots = it->second;
        occ_.erase(it);
        for (uint32_t slot : slots) {
            if (dead_[slot]) continue;
            Atom fact = slots_[slot];
            if (std::find(fact.args.begin(), fact.args.end(), from) == fact.args.end()) continue;
            index_.erase(fact);
            dead_[slot] = true;
            --liveCount_;
            for (TermId& a : fact.args) {
                if (a == from) a = to;
            }
            insert(fact);
        }
    }

    template <typename F>
    void forEachLive(F&& f) const {
        for (size_t i = 0; i < slots_.size(); ++i) {
            if (!dead_[i]) f(slots_[i]);
        }
    }

    // Candidate slots for facts of p, possibly narrowed by a ground argument
    // and restricted to slots at or above minSlot.
    std::vector<uint32_t> candidates(PredId p, const Atom& pattern, uint32_t minSlot = 0) const {
        for (size_t i = 0; i < pattern.args.size(); ++i) {
            if (store_.isGround(pattern.args[i]) && store_.kind(pattern.args[i]) != TermKind::App) {
                auto bucket = postings_.find(key(p, i));
                if (bucket == postings_.end()) return {};
                auto it = bucket->second.find(pattern.args[i]);
                if (it == bucket->second.end()) return {};
                return filter(it->second, p, i, pattern.args[i], minSlot);
            }
        }
        auto it = byPred_.find(p);
        if (it == byPred_.end()) return {};
        std::vector<uint32_t> out;
        for (uint32_t slot : it->second) {
            if (slot >= minSlot && !dead_[slot] && slots_[slot].pred == p) out.push_back(slot);
        }
        return out;
    }

    const Atom& at(uint32_t slot) const { return slots_[slot]; }

    std::vector<TermId> liveTerms() const {
        std::set<TermId> seen;
        std::vector<TermId> out;
        forEachLive([&](const Atom& f) {
            for (TermId t : f.args) {
                if (seen.insert(t).second) out.push_back(t);
            }
        });
        return out;
    }

private:
    static uint64_t key(PredId p, size_t pos) { return (static_cast<uint64_t>(p) << 16) | pos; }

    std::vector<uint32_t> filter(const std::vector<uint32_t>& slots, PredId p, size_t pos,
                                 TermId t, uint32_t minSlot) const {
        std::vector<uint32_t> out;
        for (uint32_t slot : slots) {
            if (slot < minSlot || dead_[slot]) continue;
            const Atom& f = slots_[slot];
            if (f.pred == p && f.args[pos] == t) out.push_back(slot);
        }
        return out;
    }

    Store& store_;
    std::vector<Atom> slots_;
    std::vector<bool> dead_;
    std::unordered_map<Atom, uint32_t, AtomHash> index_;
    std::unordered_map<PredId, std::vector<uint32_t>> byPred_;
    std::unordered_map<TermId, std::vector<uint32_t>> occ_;
    std::unordered_map<uint64_t, std::unordered_map<TermId, std::vector<uint32_t>>> postings_;
    size_t liveCount_ = 0;
};

}  // namespace

struct ChaseEngine::Impl {
    Store& store;
    std::vector<Dependency> conjuncts;
    std::vector<Atom> base;
    FixpointLimits limits;
    bool una;

    FactStore facts;
    std::unordered_map<TermId, TermId> parent;          // union-find over terms
    std::unordered_map<TermId, TermId> fnval;           // canonical app term -> value
    std::unordered_map<TermId, std::vector<TermId>> fnvalOcc;  // term -> app keys using it
    std::deque<std::pair<TermId, TermId>> eqQueue;
    std::vector<std::pair<TermId, TermId>> unaViolations;
    std::set<TermId> scenarioConstants;
    uint32_t nullCounter = 0;
    bool limitHit = false;
    bool unaAbort = false;
    uint64_t steps = 0;

    Impl(Store& s, std::vector<Dependency> deps, const std::vector<Atom>& b, FixpointLimits lim,
         bool unaFlag)
        : store(s), conjuncts(std::move(deps)), base(b), limits(lim), una(unaFlag), facts(s) {}

    TermId find(TermId t) {
        auto it = parent.find(t);
        if (it == parent.end()) return t;
        TermId root = find(it->second);
        it->second = root;
        return root;
    }

    // --- equality machinery -------------------------------------------------

    void queueEquality(TermId a, TermId b) { eqQueue.emplace_back(a, b); }

    void drainEqualities() {
        while (!eqQueue.empty()) {
            auto [a, b] = eqQueue.front();
            eqQueue.pop_front();
            merge(find(a), find(b));
            if (unaAbort) return;
        }
    }

    void merge(TermId a, TermId b) {
        if (a == b) return;
        int c = store.compareChaseTerms(a, b);
        TermId keep = c <= 0 ? a : b;
        TermId repl = c <= 0 ? b : a;
        if (store.kind(keep) == TermKind::Constant && store.kind(repl) == TermKind::Constant) {
            unaViolations.emplace_back(keep, repl);
            if (una) {
                unaAbort = true;
                return;
            }
        }
        parent[repl] = keep;
        facts.replaceTerm(repl, keep);

        // Re-key fnval entries mentioning the replaced term; a key collision
        // means some function no longer has a unique value, so the two
        // values are queued for merging.
        auto occIt = fnvalOcc.find(repl);
        std::vector<TermId> touched;
        if (occIt != fnvalOcc.end()) {
            touched = occIt->second;
            fnvalOcc.erase(occIt);
        }
        for (TermId appTerm : touched) {
            auto entry = fnval.find(appTerm);
            if (entry == fnval.end()) continue;
            TermId value = entry->second;
            const TermData& td = store.term(appTerm);
            bool inArgs = std::find(td.args.begin(), td.args.end(), repl) != td.args.end();
            if (!inArgs && value != repl) continue;
            fnval.erase(entry);
            TermId newValue = value == repl ? keep : value;
            if (inArgs) {
                std::vector<TermId> args = td.args;
                for (TermId& x : args) {
                    if (x == repl) x = keep;
                }
                TermId newKey = store.app(td.sym, args);
                auto existing = fnval.find(newKey);
                if (existing != fnval.end()) {
                    if (existing->second != newValue) queueEquality(existing->second, newValue);
                } else {
                    insertFnval(newKey, newValue);
                }
            } else {
                insertFnval(appTerm, newValue);
            }
        }
    }

    void insertFnval(TermId appTerm, TermId value) {
        auto existing = fnval.find(appTerm);
        if (existing != fnval.end()) {
            if (existing->second != value) queueEquality(existing->second, value);
            return;
        }
        fnval.emplace(appTerm, value);
        const TermData& td = store.term(appTerm);
        for (TermId a : td.args) fnvalOcc[a].push_back(appTerm);
        fnvalOcc[value].push_back(appTerm);
    }

    // --- term evaluation ----------------------------------------------------

    // The value t^I of a ground term of depth at most one. Skolem functional
    // terms always evaluate to their functional null.
    TermId eval(TermId t) {
        const TermData& td = store.term(t);
        if (td.kind != TermKind::App) return find(t);
        std::vector<TermId> args;
        args.reserve(td.args.size());
        for (TermId a : td.args) args.push_back(eval(a));
        TermId canon = store.app(td.sym, args);
        if (store.fnInfo(td.sym).kind == FnKind::True) {
            auto it = fnval.find(canon);
            if (it != fnval.end()) return find(it->second);
        }
        return find(store.fnNull(canon));
    }

    bool holds(const Atom& a) {
        if (store.isEq(a.pred)) return eval(a.args[0]) == eval(a.args[1]);
        Atom canon;
        canon.pred = a.pred;
        canon.args.reserve(a.args.size());
        for (TermId t : a.args) canon.args.push_back(eval(t));
        return facts.contains(canon);
    }

    // --- matching -----------------------------------------------------------

    Atom canonicalize(const Atom& a, const Substitution& s) {
        Atom out;
        out.pred = a.pred;
        out.args.reserve(a.args.size());
        for (TermId t : a.args) {
            TermId v = applySubst(store, t, s);
            const TermData& td = store.term(v);
            if (td.kind != TermKind::Variable && td.kind != TermKind::App) v = find(v);
            out.args.push_back(v);
        }
        return out;
    }

    void matchBody(const Dependency& d, std::vector<Substitution>& out) {
        std::vector<const Atom*> rel;
        std::vector<const Atom*> eqs;
        for (const Atom& a : d.body) {
            (store.isEq(a.pred) ? eqs : rel).push_back(&a);
        }
        Substitution s;
        joinRel(rel, 0, eqs, s, out);
    }

    void joinRel(const std::vector<const Atom*>& rel, size_t i, const std::vector<const Atom*>& eqs,
                 Substitution& s, std::vector<Substitution>& out) {
        if (i == rel.size()) {
            for (const Atom* e : eqs) {
                Atom inst = canonicalize(*e, s);
                if (!store.isGround(inst.args[0]) || !store.isGround(inst.args[1])) return;
                if (eval(inst.args[0]) != eval(inst.args[1])) return;
            }
            out.push_back(s);
            return;
        }
        Atom pat = canonicalize(*rel[i], s);
        for (uint32_t slot : facts.candidates(pat.pred, pat)) {
            auto m = matchAtom(store, pat, facts.at(slot), s);
            if (!m) continue;
            joinRel(rel, i + 1, eqs, *m, out);
        }
    }

    // Does some extension of s over the existential variables satisfy the
    // head in the current instance?
    bool headSatisfied(const Dependency& d, const Substitution& s) {
        std::vector<Atom> atoms;
        atoms.reserve(d.head.size());
        for (const Atom& a : d.head) atoms.push_back(canonicalize(a, s));
        return headSearch(d, atoms, 0, s);
    }

    bool headSearch(const Dependency& d, const std::vector<Atom>& atoms, size_t i,
                    const Substitution& s) {
        if (i == atoms.size()) return true;
        Atom inst = canonicalize(atoms[i], s);
        bool ground = true;
        for (TermId t : inst.args) ground = ground && store.isGround(t);
        if (ground) {
            return holds(inst) && headSearch(d, atoms, i + 1, s);
        }
        if (!store.isEq(inst.pred)) {
            // Evaluate ground arguments, then scan candidates binding the rest.
            Atom probe;
            probe.pred = inst.pred;
            probe.args.reserve(inst.args.size());
            for (TermId t : inst.args) probe.args.push_back(store.isGround(t) ? eval(t) : t);
            for (uint32_t slot : facts.candidates(probe.pred, probe)) {
                auto m = matchAtom(store, probe, facts.at(slot), s);
                if (m && headSearch(d, atoms, i + 1, *m)) return true;
            }
            return false;
        }
        // Equality head atom with unbound existential variables: enumerate
        // the terms of the instance.
        std::vector<TermId> vars;
        collectVars(store, inst, vars);
        return enumerateTerms(d, atoms, i, s, inst, vars, 0);
    }

    bool enumerateTerms(const Dependency& d, const std::vector<Atom>& atoms, size_t i,
                        const Substitution& s, const Atom& inst, const std::vector<TermId>& vars,
                        size_t k) {
        if (k == vars.size()) {
            Atom grounded = canonicalize(inst, s);
            return holds(grounded) && headSearch(d, atoms, i + 1, s);
        }
        for (TermId t : facts.liveTerms()) {
            Substitution next = s;
            next.bind(vars[k], t);
            if (enumerateTerms(d, atoms, i, next, inst, vars, k + 1)) return true;
        }
        return false;
    }

    // --- dependency application ----------------------------------------------

    bool applyStep(const Dependency& d, const Substitution& sigma) {
        Substitution s = sigma;
        for (TermId y : d.existVars) s.bind(y, store.baseNull(nullCounter++));

        // First ensure fnval entries for all new true-symbol terms in the
        // instantiated head, then add the head facts with evaluated
        // arguments.
        std::vector<Atom> instantiated;
        instantiated.reserve(d.head.size());
        for (const Atom& a : d.head) instantiated.push_back(canonicalize(a, s));

        for (const Atom& a : instantiated) {
            for (TermId t : a.args) {
                const TermData& td = store.term(t);
                if (td.kind != TermKind::App) continue;
                if (static_cast<uint32_t>(td.depth) > limits.maxDepth) {
                    limitHit = true;
                    return false;
                }
                if (store.fnInfo(td.sym).kind != FnKind::True) continue;
                std::vector<TermId> args;
                args.reserve(td.args.size());
                for (TermId u : td.args) args.push_back(eval(u));
                TermId canon = store.app(td.sym, args);
                if (!fnval.count(canon)) insertFnval(canon, store.fnNull(canon));
            }
        }
        bool added = false;
        for (const Atom& a : instantiated) {
            if (store.isEq(a.pred)) {
                TermId l = eval(a.args[0]);
                TermId r = eval(a.args[1]);
                if (l != r) {
                    queueEquality(l, r);
                    added = true;
                }
                continue;
            }
            Atom fact;
            fact.pred = a.pred;
            fact.args.reserve(a.args.size());
            for (TermId t : a.args) fact.args.push_back(eval(t));
            if (facts.liveCount() >= limits.maxFacts) {
                limitHit = true;
                return added;
            }
            added = facts.insert(fact) || added;
        }
        return added;
    }

    // --- main loop -----------------------------------------------------------

    ChaseResult run() {
        for (const Atom& f : base) {
            for (TermId t : f.args) {
                if (store.kind(t) == TermKind::Constant) scenarioConstants.insert(t);
            }
            facts.insert(f);
        }
        for (const Dependency& d : conjuncts) {
            auto scanTerm = [&](TermId t, auto&& self) -> void {
                const TermData& td = store.term(t);
                if (td.kind == TermKind::Constant) {
                    scenarioConstants.insert(t);
                } else if (td.kind == TermKind::App) {
                    for (TermId a : td.args) self(a, self);
                }
            };
            for (const Atom& a : d.body)
                for (TermId t : a.args) scanTerm(t, scanTerm);
            for (const Atom& a : d.head)
                for (TermId t : a.args) scanTerm(t, scanTerm);
        }

        uint64_t rounds = 0;
        bool changed = true;
        while (changed && !unaAbort) {
            if (rounds >= limits.maxRounds) {
                limitHit = true;
                break;
            }
            ++rounds;
            changed = false;
            for (const Dependency& d : conjuncts) {
                std::vector<Substitution> matches;
                if (d.body.empty()) {
                    matches.emplace_back();
                } else {
                    matchBody(d, matches);
                }
                for (const Substitution& m : matches) {
                    // The instance may have evolved since the match was
                    // enumerated: re-canonicalise and re-verify.
                    Substitution s;
                    for (const auto& [v, t] : m.entries()) s.bind(v, find(t));
                    bool bodyHolds = true;
                    for (const Atom& a : d.body) {
                        if (!holds(canonicalize(a, s))) {
                            bodyHolds = false;
                            break;
                        }
                    }
                    if (!bodyHolds) continue;
                    if (headSatisfied(d, s)) continue;
                    ++steps;
                    if (applyStep(d, s)) changed = true;
                    drainEqualities();
                    if (unaAbort || limitHit) break;
                }
                if (unaAbort || limitHit) break;
            }
            if (limitHit) break;
        }

        ChaseResult result;
        Instance model(store);
        facts.forEachLive([&](const Atom& f) { model.insert(f); });
        for (const auto& [appTerm, value] : collectFnvalOrdered()) {
            const TermData& td = store.term(appTerm);
            PredId p = store.pred("fnval_" + store.fnInfo(td.sym).name,
                                  static_cast<uint32_t>(td.args.size() + 1));
            Atom f;
            f.pred = p;
            f.args = td.args;
            f.args.push_back(value);
            model.insert(f);
        }
        result.model = std::move(model);
        for (TermId c : scenarioConstants) {
            TermId rep = find(c);
            if (rep != c) result.mu.emplace(c, rep);
        }
        result.status = unaAbort ? ChaseStatus::UnaViolation
                                 : (limitHit ? ChaseStatus::LimitHit : ChaseStatus::Complete);
        result.unaViolations = unaViolations;
        result.steps = steps;
        return result;
    }

    std::vector<std::pair<TermId, TermId>> collectFnvalOrdered() {
        std::vector<std::pair<TermId, TermId>> entries(fnval.begin(), fnval.end());
        std::sort(entries.begin(), entries.end());
        return entries;
    }
};

ChaseEngine::ChaseEngine(Store& store, std::vector<Dependency> conjuncts,
                         const std::vector<Atom>& base, FixpointLimits limits, bool una)
    : impl_(std::make_shared<Impl>(store, std::move(conjuncts), base, limits, una)) {}

ChaseResult ChaseEngine::run() { return impl_->run(); }

namespace {

// Defun step-1 rewrite for dependency bodies: each constant in a relational
// body atom becomes a fresh variable guarded by a fact predicate.
std::vector<Dependency> stripBodyConstants(Store& store, const std::vector<Dependency>& deps) {
    std::vector<Dependency> out;
    std::vector<Dependency> factRules;
    std::set<TermId> emitted;
    int counter = 0;
    for (const Dependency& d : deps) {
        Dependency nd = d;
        for (Atom& a : nd.body) {
            if (store.isEq(a.pred)) continue;
            for (TermId& t : a.args) {
                if (store.kind(t) != TermKind::Constant) continue;
                const std::string& name = store.constantName(t);
                PredId fp = store.pred("F_" + name, 1);
                TermId z = store.variable("zc" + std::to_string(counter++) + "@" + name);
                if (emitted.insert(t).second) {
                    Dependency factRule;
                    factRule.head.push_back({fp, {t}});
                    factRules.push_back(std::move(factRule));
                }
                nd.body.push_back({fp, {z}});
                t = z;
            }
        }
        out.push_back(std::move(nd));
    }
    out.insert(out.end(), factRules.begin(), factRules.end());
    return out;
}

}  // namespace

std::vector<Dependency> rulesToConjuncts(const Program& p) {
    std::vector<Dependency> out;
    out.reserve(p.rules.size());
    for (const Rule& r : p.rules) {
        Dependency d;
        d.body = r.body;
        d.head.push_back(r.head);
        out.push_back(std::move(d));
    }
    return out;
}

ChaseResult chase(Store& store, const std::vector<Dependency>& conjuncts,
                  const std::vector<Atom>& base, const FixpointLimits& limits, bool una) {
    ChaseEngine engine(store, stripBodyConstants(store, conjuncts), base, limits, una);
    return engine.run();
}

ChaseResult chase(Store& store, const Scenario& scenario, const FixpointLimits& limits) {
    return chase(store, scenario.deps, scenario.facts, limits, scenario.una);
}

ChaseResult chaseProgram(Store& store, const Program& p, const std::vector<Atom>& base,
                         const FixpointLimits& limits, bool una) {
    return chase(store, rulesToConjuncts(p), base, limits, una);
}

std::vector<Atom> chaseAnswers(Store& store, const ChaseResult& r, PredId q) {
    // Group the scenario constants into mu-preimage classes.
    std::unordered_map<TermId, std::vector<TermId>> classes;
    for (const auto& [c, rep] : r.mu) classes[rep].push_back(c);

    std::vector<Atom> out;
    std::set<std::vector<TermId>> seen;
    for (uint32_t fi : r.model.factsOf(q)) {
        const Atom& f = r.model.facts()[fi];
        bool allConst = true;
        for (TermId t : f.args) allConst = allConst && store.kind(t) == TermKind::Constant;
        if (!allConst) continue;
        // Expand each argument into its preimage class (plus itself).
        std::vector<std::vector<TermId>> options;
        for (TermId t : f.args) {
            std::vector<TermId> opts{t};
            auto it = classes.find(t);
            if (it != classes.end()) opts.insert(opts.end(), it->second.begin(), it->second.end());
            options.push_back(std::move(opts));
        }
        std::vector<TermId> tuple(f.args.size());
        std::function<void(size_t)> expand = [&](size_t i) {
            if (i == tuple.size()) {
                if (seen.insert(tuple).second) out.push_back({q, tuple});
                return;
            }
            for (TermId t : options[i]) {
                tuple[i] = t;
                expand(i + 1);
            }
        };
        expand(0);
    }
    return out;
}

}  // namespace deqa
