#include "deqa/generator.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <random>
#include <set>

#include "deqa/eq_axioms.hpp"

namespace deqa {

namespace {

// Portable bounded sampling on top of mt19937_64: the raw generator output
// is pinned by the standard, the distribution classes are not.
class Rng {
public:
    explicit Rng(uint64_t seed) : engine_(seed) {}

    uint64_t raw() { return engine_(); }

    uint32_t below(uint32_t n) {
        if (n <= 1) return 0;
        uint64_t limit = std::numeric_limits<uint64_t>::max() -
                         std::numeric_limits<uint64_t>::max() % n;
        uint64_t v;
        do {
            v = engine_();
        } while (v >= limit);
        return static_cast<uint32_t>(v % n);
    }

    uint32_t between(uint32_t lo, uint32_t hi) {  // inclusive
        if (hi <= lo) return lo;
        return lo + below(hi - lo + 1);
    }

    bool chance(uint32_t denominator) { return below(denominator) == 0; }

private:
    std::mt19937_64 engine_;
};

struct PositionVertex {
    size_t atom;      // 0 = head, >= 1 = body atom index
    size_t arg;       // argument position
    size_t sub;       // argument of a functional term, or npos
    TermId nonGround = kNoTerm;
    TermId ground = kNoTerm;
    int inEdge = -1;  // source vertex
    bool isHead = false;
    bool isEquality = false;
};

constexpr size_t kNoSub = static_cast<size_t>(-1);

class Generator {
public:
    Generator(Store& store, const GenParams& params)
        : store_(store),
          params_(params),
          rngMain_(params.rngSeed),
          rngRule_(params.rngSeed ^ 0x9e3779b97f4a7c15ull),
          rngEq_(params.rngSeed ^ 0x6a09e667f3bcc909ull),
          rngTerm_(params.rngSeed ^ 0xbb67ae8584caa73bull) {}

    GenResult run() {
        seedFacts();
        phaseOne();
        phaseTwo();

        GenResult out;
        Scenario& sc = out.scenario;
        sc.store = &store_;
        sc.queryPreds = queryPreds_;
        sc.trueFns = std::vector<FnId>(usedFns_.begin(), usedFns_.end());
        std::sort(sc.trueFns.begin(), sc.trueFns.end());
        for (const Rule& r : rules_) {
            Dependency d;
            d.body = r.body;
            d.head.push_back(r.head);
            sc.deps.push_back(std::move(d));
        }
        sc.facts = base_;
        out.seedFacts = seeds_;
        return out;
    }

private:
    // --- seeding --------------------------------------------------------------

    void seedFacts() {
        uint32_t poolSize = std::max<uint32_t>(1, 2 * params_.seedQFacts);
        for (uint32_t i = 1; i <= poolSize; ++i)
            seedPool_.push_back(store_.constant("a" + std::to_string(i)));
        for (uint32_t i = 1; i <= params_.seedQFacts; ++i) {
            uint32_t arity = rngMain_.between(1, 3);
            PredId q = store_.pred("Q" + std::to_string(i), arity);
            queryPreds_.push_back(q);
            Atom f;
            f.pred = q;
            for (uint32_t k = 0; k < arity; ++k)
                f.args.push_back(seedPool_[rngMain_.below(static_cast<uint32_t>(seedPool_.size()))]);
            seeds_.push_back(f);
            enqueue(f);
        }
    }

    void enqueue(const Atom& f) {
        if (done_.emplace(f, true).second) {
            todo_.push_back(f);
            doneOrder_.emplace_back(f, true);
        }
    }

    // --- phase one: derivation chains -----------------------------------------

    void phaseOne() {
        while (!todo_.empty() && rules_.size() < params_.maxNumberRules) {
            Atom fact = todo_.front();
            todo_.pop_front();
            uint32_t n = rngMain_.between(1, params_.maxNumberRulesPerFact);
            for (uint32_t i = 0; i < n && rules_.size() < params_.maxNumberRules; ++i) {
                Rule ground;
                if (store_.isEq(fact.pred) && rngMain_.chance(params_.branchDenominator)) {
                    ground = createGroundEqualityRule(fact);
                } else {
                    auto [lifted, instance] = createRule(fact);
                    ground = instance;
                    std::vector<Rule> candidate = rules_;
                    candidate.push_back(lifted);
                    if (!checkAcyclic(store_, candidate)) continue;
                    bool subsumed = false;
                    for (const Rule& r : rules_) {
                        if (subsumes(store_, r, lifted)) {
                            subsumed = true;
                            break;
                        }
                    }
                    if (!subsumed) {
                        std::vector<Rule> kept;
                        for (Rule& r : rules_) {
                            if (!subsumes(store_, lifted, r)) kept.push_back(std::move(r));
                        }
                        kept.push_back(lifted);
                        rules_ = std::move(kept);
                    }
                }
                for (const Atom& bodyFact : ground.body) {
                    if (!done_.count(bodyFact)) {
                        enqueue(bodyFact);
                        hasIncoming_.insert(fact);  // edge bodyFact -> fact
                    }
                }
            }
        }
    }

    // --- phase two: leaves into the base instance ------------------------------

    void phaseTwo() {
        std::deque<Atom> leaves;
        std::unordered_map<Atom, bool, AtomHash> seen;
        for (const auto& [fact, flag] : orderedDone()) {
            if (!hasIncoming_.count(fact) && seen.emplace(fact, true).second) leaves.push_back(fact);
        }
        while (!leaves.empty()) {
            Atom fact = leaves.front();
            leaves.pop_front();
            bool functional = false;
            for (TermId t : fact.args) functional = functional || store_.kind(t) == TermKind::App;
            if (store_.isEq(fact.pred)) {
                // Equality leaves cannot enter a base instance; wrap them in
                // a fresh relational predicate.
                PredId wrap = store_.pred("E" + std::to_string(freshPred_++), 2);
                TermId x1 = store_.variable("w1@" + std::to_string(freshPred_));
                TermId x2 = store_.variable("w2@" + std::to_string(freshPred_));
                Rule lifted;
                lifted.head = {store_.eqPred(), {x1, x2}};
                lifted.body.push_back({wrap, {x1, x2}});
                rules_.push_back(lifted);
                Atom carrier{wrap, {fact.args[0], fact.args[1]}};
                if (seen.emplace(carrier, true).second) leaves.push_back(carrier);
                continue;
            }
            if (functional) {
                auto [lifted, ground] = createTransferRule(fact);
                rules_.push_back(lifted);
                const Atom& carrier = ground.body[0];
                if (seen.emplace(carrier, true).second) leaves.push_back(carrier);
                continue;
            }
            for (uint32_t i = 1; i <= params_.maxNumberTuples; ++i) {
                Atom copy;
                copy.pred = fact.pred;
                for (TermId t : fact.args) copy.args.push_back(copyConstant(t, i));
                if (std::find(base_.begin(), base_.end(), copy) == base_.end())
                    base_.push_back(copy);
            }
        }
    }

    // Copy i of a constant: seed-pool constants are shared across copies so
    // the derivations overlap; everything else is renamed apart.
    TermId copyConstant(TermId t, uint32_t i) {
        if (i == 1) return t;
        if (std::find(seedPool_.begin(), seedPool_.end(), t) != seedPool_.end()) return t;
        return store_.constant("cp" + std::to_string(i) + "_" + store_.constantName(t));
    }

    // --- rule creation (ground equality) ---------------------------------------

    Rule createGroundEqualityRule(const Atom& fact) {
        TermId t1 = fact.args[0];
        TermId t2 = fact.args[1];
        const TermData& d1 = store_.term(t1);
        const TermData& d2 = store_.term(t2);
        PredId eq = store_.eqPred();
        bool sameTrueFn = d1.kind == TermKind::App && d2.kind == TermKind::App &&
                          d1.sym == d2.sym && store_.fnInfo(d1.sym).kind == FnKind::True;
        if (sameTrueFn && rngEq_.chance(params_.branchDenominator)) {
            Rule r;
            r.head = fact;
            for (size_t i = 0; i < d1.args.size(); ++i)
                r.body.push_back({eq, {d1.args[i], d2.args[i]}});
            return r;
        }
        if (rngEq_.chance(params_.branchDenominator)) {
            TermId t3 = randomGroundTerm(params_.maxTermDepth);
            Rule r;
            r.head = fact;
            r.body.push_back({eq, {t1, t3}});
            r.body.push_back({eq, {t3, t2}});
            return r;
        }
        Rule r;
        r.head = fact;
        r.body.push_back({eq, {t2, t1}});
        return r;
    }

    // --- rule creation (transfer) ----------------------------------------------

    std::pair<Rule, Rule> createTransferRule(const Atom& fact) {
        bool functional = false;
        for (TermId t : fact.args) functional = functional || store_.kind(t) == TermKind::App;
        if (!functional) throw Error("createTransferRule: no functional argument");
        std::vector<TermId> headTerms;   // lifted head arguments
        std::vector<TermId> bodyVars;    // lifted body arguments
        std::vector<TermId> groundBody;  // ground body arguments
        for (TermId t : fact.args) {
            const TermData& td = store_.term(t);
            if (td.kind == TermKind::App) {
                std::vector<TermId> xs;
                for (size_t k = 0; k < td.args.size(); ++k) {
                    TermId x = store_.variable("t" + std::to_string(freshVar_++));
                    xs.push_back(x);
                    bodyVars.push_back(x);
                    groundBody.push_back(td.args[k]);
                }
                headTerms.push_back(store_.app(td.sym, xs));
                usedFns_.insert(td.sym);
            } else {
                TermId x = store_.variable("t" + std::to_string(freshVar_++));
                headTerms.push_back(x);
                bodyVars.push_back(x);
                groundBody.push_back(t);
            }
        }
        PredId fresh = store_.pred("X" + std::to_string(freshPred_++),
                                   static_cast<uint32_t>(bodyVars.size()));
        Rule lifted;
        lifted.head = {fact.pred, headTerms};
        lifted.body.push_back({fresh, bodyVars});
        Rule ground;
        ground.head = fact;
        ground.body.push_back({fresh, groundBody});
        return {lifted, ground};
    }

    // --- rule creation (general) -----------------------------------------------

    std::pair<Rule, Rule> createRule(const Atom& fact) {
        uint32_t relAtoms = rngRule_.between(1, params_.maxNumberRelBodyAtoms);
        uint32_t eqAtoms = params_.maxNumberEqBodyAtoms == 0
                               ? 0
                               : rngRule_.between(1, params_.maxNumberEqBodyAtoms);

        std::vector<PositionVertex> vertices;
        std::vector<PredId> bodyPreds;  // per body atom
        std::vector<FnId> argFn;        // F_{i,j} per (atom,arg) flattened separately

        struct ArgSlot {
            size_t atom;
            size_t arg;
            FnId fn = static_cast<FnId>(-1);  // -1 means plain
            std::vector<size_t> vertices;     // one per functional argument, or one
        };
        std::vector<ArgSlot> slots;

        // Head positions.
        for (size_t j = 0; j < fact.args.size(); ++j) {
            TermId t = fact.args[j];
            const TermData& td = store_.term(t);
            bool forceFn = td.kind == TermKind::App &&
                           store_.depth(t) == params_.maxTermDepth + 1;
            bool pickFn = td.kind == TermKind::App &&
                          (forceFn || rngRule_.chance(params_.branchDenominator));
            ArgSlot slot;
            slot.atom = 0;
            slot.arg = j;
            if (pickFn) {
                slot.fn = td.sym;
                usedFns_.insert(td.sym);
                for (size_t k = 0; k < td.args.size(); ++k) {
                    PositionVertex v;
                    v.atom = 0;
                    v.arg = j;
                    v.sub = k;
                    v.isHead = true;
                    v.nonGround = store_.variable("v" + std::to_string(freshVar_++));
                    v.ground = td.args[k];
                    slot.vertices.push_back(vertices.size());
                    vertices.push_back(v);
                }
            } else {
                PositionVertex v;
                v.atom = 0;
                v.arg = j;
                v.sub = kNoSub;
                v.isHead = true;
                v.nonGround = store_.variable("v" + std::to_string(freshVar_++));
                v.ground = t;
                slot.vertices.push_back(vertices.size());
                vertices.push_back(v);
            }
            slots.push_back(std::move(slot));
        }
        size_t headVertices = vertices.size();

        // Relational body atoms. Ensure enough relational positions for every
        // head vertex to have a target.
        std::vector<size_t> relationalVertices;
        size_t relationalPositions = 0;
        std::vector<uint32_t> arities;
        for (uint32_t i = 0; i < relAtoms || relationalPositions < headVertices; ++i) {
            PredId p = pickBodyPredicate();
            uint32_t arity = store_.predInfo(p).arity;
            bodyPreds.push_back(p);
            arities.push_back(arity);
            size_t atomIndex = bodyPreds.size();
            for (uint32_t j = 0; j < arity; ++j) {
                ArgSlot slot;
                slot.atom = atomIndex;
                slot.arg = j;
                PositionVertex v;
                v.atom = atomIndex;
                v.arg = j;
                v.sub = kNoSub;
                slot.vertices.push_back(vertices.size());
                relationalVertices.push_back(vertices.size());
                vertices.push_back(v);
                slots.push_back(std::move(slot));
            }
            relationalPositions += arity;
            if (i > relAtoms + headVertices + 4) break;  // degenerate arities
        }

        // Equality body atoms.
        std::vector<size_t> equalityVertices;
        for (uint32_t e = 0; e < eqAtoms; ++e) {
            size_t atomIndex = bodyPreds.size() + 1;
            bodyPreds.push_back(store_.eqPred());
            arities.push_back(2);
            for (uint32_t j = 0; j < 2; ++j) {
                ArgSlot slot;
                slot.atom = atomIndex;
                slot.arg = j;
                if (!rngRule_.chance(params_.branchDenominator)) {
                    PositionVertex v;
                    v.atom = atomIndex;
                    v.arg = j;
                    v.sub = kNoSub;
                    v.isEquality = true;
                    slot.vertices.push_back(vertices.size());
                    equalityVertices.push_back(vertices.size());
                    vertices.push_back(v);
                } else {
                    FnId f = pickFunction();
                    slot.fn = f;
                    usedFns_.insert(f);
                    for (uint32_t k = 0; k < store_.fnInfo(f).arity; ++k) {
                        PositionVertex v;
                        v.atom = atomIndex;
                        v.arg = j;
                        v.sub = k;
                        v.isEquality = true;
                        slot.vertices.push_back(vertices.size());
                        equalityVertices.push_back(vertices.size());
                        vertices.push_back(v);
                    }
                }
                slots.push_back(std::move(slot));
            }
        }

        // Edges: each head vertex points at a distinct relational position;
        // spare relational positions may receive one edge from an earlier
        // vertex; equality positions receive exactly one edge. Acyclicity
        // holds because every edge goes from an earlier to a later vertex in
        // (head, relational, equality) order, with head targets drawn without
        // replacement.
        std::vector<size_t> freeRelational = relationalVertices;
        for (size_t h = 0; h < headVertices; ++h) {
            if (freeRelational.empty()) throw Error("createRule: no relational position left");
            uint32_t pick = rngRule_.below(static_cast<uint32_t>(freeRelational.size()));
            size_t target = freeRelational[pick];
            freeRelational.erase(freeRelational.begin() + pick);
            vertices[target].inEdge = static_cast<int>(h);
        }
        for (size_t v : freeRelational) {
            if (!rngRule_.chance(params_.branchDenominator)) continue;
            // Any earlier relational vertex (or head vertex) may feed this one.
            std::vector<size_t> sources;
            for (size_t u = 0; u < v; ++u) {
                if (vertices[u].isEquality) continue;
                sources.push_back(u);
            }
            if (sources.empty()) continue;
            vertices[v].inEdge =
                static_cast<int>(sources[rngRule_.below(static_cast<uint32_t>(sources.size()))]);
        }
        for (size_t v : equalityVertices) {
            std::vector<size_t> sources;
            for (size_t u = 0; u < vertices.size(); ++u) {
                if (vertices[u].isEquality) continue;
                sources.push_back(u);
            }
            vertices[v].inEdge =
                static_cast<int>(sources[rngRule_.below(static_cast<uint32_t>(sources.size()))]);
        }

        // Leaves among relational vertices get fresh variables and ground
        // terms; everything else is propagated along its in-edge.
        for (size_t v : relationalVertices) {
            if (vertices[v].inEdge >= 0) continue;
            vertices[v].nonGround = store_.variable("v" + std::to_string(freshVar_++));
            vertices[v].ground = randomGroundTerm(params_.maxTermDepth);
        }
        bool progress = true;
        while (progress) {
            progress = false;
            for (PositionVertex& v : vertices) {
                if (v.nonGround != kNoTerm || v.inEdge < 0) continue;
                const PositionVertex& src = vertices[static_cast<size_t>(v.inEdge)];
                if (src.nonGround == kNoTerm) continue;
                v.nonGround = src.nonGround;
                v.ground = src.ground;
                progress = true;
            }
        }

        // Assemble the atoms.
        auto buildAtom = [&](size_t atomIndex, PredId pred, uint32_t arity) {
            Atom lifted{pred, {}};
            Atom ground{pred, {}};
            for (uint32_t j = 0; j < arity; ++j) {
                const ArgSlot* slot = nullptr;
                for (const ArgSlot& s : slots) {
                    if (s.atom == atomIndex && s.arg == j) {
                        slot = &s;
                        break;
                    }
                }
                if (slot->fn == static_cast<FnId>(-1)) {
                    const PositionVertex& v = vertices[slot->vertices[0]];
                    lifted.args.push_back(v.nonGround);
                    ground.args.push_back(v.ground);
                } else {
                    std::vector<TermId> ngArgs;
                    std::vector<TermId> gArgs;
                    for (size_t vi : slot->vertices) {
                        ngArgs.push_back(vertices[vi].nonGround);
                        gArgs.push_back(vertices[vi].ground);
                    }
                    lifted.args.push_back(store_.app(slot->fn, ngArgs));
                    ground.args.push_back(store_.app(slot->fn, gArgs));
                }
            }
            return std::make_pair(lifted, ground);
        };

        Rule lifted;
        Rule ground;
        auto [lh, gh] = buildAtom(0, fact.pred, static_cast<uint32_t>(fact.args.size()));
        lifted.head = lh;
        ground.head = gh;
        for (size_t i = 0; i < bodyPreds.size(); ++i) {
            auto [lb, gb] = buildAtom(i + 1, bodyPreds[i], arities[i]);
            lifted.body.push_back(lb);
            ground.body.push_back(gb);
        }
        return {lifted, ground};
    }

    PredId pickBodyPredicate() {
        if (!relationalPool_.empty() && rngRule_.chance(2)) {
            return relationalPool_[rngRule_.below(static_cast<uint32_t>(relationalPool_.size()))];
        }
        PredId p = store_.pred("P" + std::to_string(freshPred_++), rngRule_.between(1, 3));
        relationalPool_.push_back(p);
        return p;
    }

    FnId pickFunction() {
        if (!fnPool_.empty() && rngTerm_.chance(2)) {
            return fnPool_[rngTerm_.below(static_cast<uint32_t>(fnPool_.size()))];
        }
        FnId f = store_.fn("f" + std::to_string(freshFn_++), rngTerm_.between(1, 2), FnKind::True);
        fnPool_.push_back(f);
        return f;
    }

    TermId pickConstant() {
        uint32_t total = static_cast<uint32_t>(seedPool_.size() + constPool_.size());
        if (total > 0 && rngTerm_.chance(2)) {
            uint32_t i = rngTerm_.below(total);
            return i < seedPool_.size() ? seedPool_[i]
                                        : constPool_[i - seedPool_.size()];
        }
        TermId c = store_.constant("c" + std::to_string(freshConst_++));
        constPool_.push_back(c);
        return c;
    }

    TermId randomGroundTerm(uint32_t maxDepth) {
        if (maxDepth == 0 || !rngTerm_.chance(2)) return pickConstant();
        FnId f = pickFunction();
        std::vector<TermId> args;
        for (uint32_t i = 0; i < store_.fnInfo(f).arity; ++i)
            args.push_back(randomGroundTerm(maxDepth - 1));
        usedFns_.insert(f);
        return store_.app(f, args);
    }

    std::vector<std::pair<Atom, bool>> orderedDone() const {
        return doneOrder_;
    }

    Store& store_;
    GenParams params_;
    Rng rngMain_;
    Rng rngRule_;
    Rng rngEq_;
    Rng rngTerm_;

    std::vector<PredId> queryPreds_;
    std::vector<TermId> seedPool_;
    std::vector<TermId> constPool_;
    std::vector<PredId> relationalPool_;
    std::vector<FnId> fnPool_;
    std::set<FnId> usedFns_;
    uint32_t freshPred_ = 1;
    uint32_t freshFn_ = 1;
    uint32_t freshConst_ = 1;
    uint32_t freshVar_ = 1;

    std::deque<Atom> todo_;
    std::unordered_map<Atom, bool, AtomHash> done_;
    std::vector<std::pair<Atom, bool>> doneOrder_;
    struct AtomLess {
        bool operator()(const Atom& a, const Atom& b) const {
            if (a.pred != b.pred) return a.pred < b.pred;
            return a.args < b.args;
        }
    };
    std::set<Atom, AtomLess> hasIncoming_;
    std::vector<Rule> rules_;
    std::vector<Atom> base_;
    std::vector<Atom> seeds_;
};

}  // namespace

GenResult generateWithSeeds(Store& store, const GenParams& params) {
    Generator gen(store, params);
    return gen.run();
}

Scenario generate(Store& store, const GenParams& params) {
    return generateWithSeeds(store, params).scenario;
}

bool checkAcyclic(Store& store, const std::vector<Rule>& rules) {
    // Positions are (predicate, argument); edges follow variables from body
    // positions to head positions, with special edges into positions holding
    // functional head terms.
    struct Edge {
        uint64_t from;
        uint64_t to;
        bool special;
    };
    auto posKey = [](PredId p, size_t i) { return (static_cast<uint64_t>(p) << 16) | i; };
    std::vector<Edge> edges;
    std::set<uint64_t> nodes;

    for (const Rule& r : rules) {
        // Variable -> body positions (variables inside functional body terms
        // included).
        std::map<TermId, std::vector<uint64_t>> bodyPositions;
        for (const Atom& a : r.body) {
            for (size_t i = 0; i < a.args.size(); ++i) {
                uint64_t key = posKey(a.pred, i);
                nodes.insert(key);
                std::vector<TermId> vars;
                collectVars(store, a.args[i], vars);
                for (TermId v : vars) bodyPositions[v].push_back(key);
            }
        }
        for (size_t i = 0; i < r.head.args.size(); ++i) {
            uint64_t headKey = posKey(r.head.pred, i);
            nodes.insert(headKey);
            TermId t = r.head.args[i];
            const TermData& td = store.term(t);
            if (td.kind == TermKind::Variable) {
                for (uint64_t from : bodyPositions[t]) edges.push_back({from, headKey, false});
            } else if (td.kind == TermKind::App) {
                std::vector<TermId> vars;
                collectVars(store, t, vars);
                for (TermId v : vars) {
                    for (uint64_t from : bodyPositions[v]) edges.push_back({from, headKey, true});
                }
            }
        }
    }

    // A cycle through at least one special edge breaks weak acyclicity.
    // Check reachability: for each special edge (u, v), is u reachable from v?
    std::map<uint64_t, std::vector<uint64_t>> adj;
    for (const Edge& e : edges) adj[e.from].push_back(e.to);
    auto reachable = [&](uint64_t from, uint64_t target) {
        std::set<uint64_t> visited;
        std::deque<uint64_t> work{from};
        while (!work.empty()) {
            uint64_t u = work.front();
            work.pop_front();
            if (u == target) return true;
            if (!visited.insert(u).second) continue;
            for (uint64_t v : adj[u]) work.push_back(v);
        }
        return false;
    };
    for (const Edge& e : edges) {
        if (e.special && reachable(e.to, e.from)) return false;
    }
    return true;
}

}  // namespace deqa
