#include "deqa/relevance.hpp"

#include <algorithm>
#include <deque>
#include <set>

#include "deqa/eq_axioms.hpp"
#include "deqa/syntax.hpp"

namespace deqa {

std::vector<Atom> criticalInstance(Store& store, const Program& p, const std::vector<Atom>& b) {
    std::set<TermId> constSet;
    auto scan = [&](TermId t, auto&& self) -> void {
        const TermData& td = store.term(t);
        if (td.kind == TermKind::Constant) {
            constSet.insert(t);
        } else if (td.kind == TermKind::App) {
            for (TermId a : td.args) self(a, self);
        }
    };
    for (const Rule& r : p.rules) {
        for (TermId t : r.head.args) scan(t, scan);
        for (const Atom& a : r.body)
            for (TermId t : a.args) scan(t, scan);
    }
    std::vector<TermId> pool(constSet.begin(), constSet.end());
    pool.push_back(store.constant("*"));

    std::vector<PredId> preds;
    for (const Atom& f : b) {
        if (std::find(preds.begin(), preds.end(), f.pred) == preds.end()) preds.push_back(f.pred);
    }
    std::sort(preds.begin(), preds.end());

    std::vector<Atom> out;
    for (PredId p2 : preds) {
        uint32_t arity = store.predInfo(p2).arity;
        std::vector<size_t> idx(arity, 0);
        while (true) {
            Atom f;
            f.pred = p2;
            for (uint32_t i = 0; i < arity; ++i) f.args.push_back(pool[idx[i]]);
            out.push_back(std::move(f));
            size_t i = 0;
            for (; i < arity; ++i) {
                if (++idx[i] < pool.size()) break;
                idx[i] = 0;
            }
            if (i == arity) break;
        }
    }
    return out;
}

namespace {

// Replaces every functional term f(...) by the fresh constant c_f.
Atom collapseAtom(Store& store, const Atom& a,
                  std::unordered_map<FnId, TermId>& collapsedConsts) {
    Atom out;
    out.pred = a.pred;
    for (TermId t : a.args) {
        const TermData& td = store.term(t);
        if (td.kind == TermKind::App) {
            auto it = collapsedConsts.find(td.sym);
            if (it == collapsedConsts.end()) {
                TermId c = store.constant("c_" + store.fnInfo(td.sym).name);
                it = collapsedConsts.emplace(td.sym, c).first;
            }
            out.args.push_back(it->second);
        } else {
            out.args.push_back(t);
        }
    }
    return out;
}

struct TrackedRule {
    Rule rule;        // the rule matched during the sweep (possibly collapsed)
    const Rule* origin;  // rule of P to emit, or nullptr for axiom rules
    bool fromProgram;    // true if the rule belongs to P itself
    size_t originIndex;  // index into p.rules when fromProgram
};

}  // namespace

Program relevance(Store& store, const Program& p, const std::vector<Atom>& b,
                  const RelevanceOptions& opts) {
    // Abstraction choice. Sorted abstraction falls back to the critical
    // instance: the scenario format carries no sort declarations, so there is
    // nothing to refine by.
    std::vector<Atom> abstraction = criticalInstance(store, p, b);

    AxiomOptions axOpts;
    axOpts.extraPreds = opts.basePreds;
    axOpts.disableFunctionalReflexivity = opts.disableFunctionalReflexivity;
    Program sg = buildSg(store, p, axOpts);

    // Partition SG(P) for the sweep: DOM/ST/FR are traversed but never
    // emitted, and the reflexivity rule is not considered at all.
    PredId eq = store.eqPred();
    PredId dom = domainPred(store);
    std::vector<TrackedRule> sweepRules;
    for (size_t i = 0; i < p.rules.size(); ++i) {
        sweepRules.push_back({p.rules[i], &p.rules[i], true, i});
    }
    for (const Rule& r : sg.rules) {
        bool isRfl = store.isEq(r.head.pred) && r.body.size() == 1 && r.body[0].pred == dom;
        if (isRfl) continue;
        sweepRules.push_back({r, nullptr, false, 0});
    }

    std::unordered_map<FnId, TermId> collapsedConsts;
    if (opts.collapseFunctions) {
        for (TrackedRule& tr : sweepRules) {
            Rule collapsed;
            collapsed.head = collapseAtom(store, tr.rule.head, collapsedConsts);
            for (const Atom& a : tr.rule.body)
                collapsed.body.push_back(collapseAtom(store, a, collapsedConsts));
            tr.rule = std::move(collapsed);
        }
    }

    // Fixpoint of P and SG(P) (collapsed variants included if requested) on
    // the abstraction.
    Program fixProgram;
    fixProgram.queryPreds = p.queryPreds;
    for (const TrackedRule& tr : sweepRules) fixProgram.rules.push_back(tr.rule);
    // The reflexivity rule is excluded from the sweep set but the fixpoint
    // still needs it.
    TermId rflVar = store.variable("x@rfl");
    fixProgram.rules.push_back({{eq, {rflVar, rflVar}}, {{dom, {rflVar}}}});

    Instance baseInstance(store);
    for (const Atom& f : abstraction) baseInstance.insert(f);
    FixpointResult fp = fixpoint(store, fixProgram, baseInstance, opts.abstractionLimits);
    if (fp.status != RunStatus::Complete)
        throw Error(
            "relevance: the abstraction fixpoint hit a limit; consider enabling "
            "collapse-functions");
    const Instance& interp = fp.instance;

    // Backward sweep. T is a FIFO queue of facts; D ensures single enqueue.
    std::deque<Atom> todo;
    std::unordered_map<Atom, bool, AtomHash> done;
    auto enqueue = [&](const Atom& f) {
        if (done.emplace(f, true).second) todo.push_back(f);
    };
    for (PredId q : p.queryPreds) {
        for (const Atom& f : answers(store, interp, q)) enqueue(f);
    }

    std::vector<bool> inResult(p.rules.size(), false);
    std::set<std::pair<size_t, size_t>> blocked;  // (rule index, body position)

    auto isConstEq = [&](const Atom& g) {
        return store.isEq(g.pred) && g.args[0] == g.args[1] &&
               store.kind(g.args[0]) == TermKind::Constant;
    };

    while (!todo.empty()) {
        Atom fact = todo.front();
        todo.pop_front();
        for (const TrackedRule& tr : sweepRules) {
            Substitution empty;
            auto head = matchAtom(store, tr.rule.head, fact, empty);
            if (!head) continue;
            // Enumerate every substitution extending the head match with
            // body(r) nu within I.
            std::vector<Substitution> matches;
            std::function<void(size_t, Substitution)> joinBody = [&](size_t i, Substitution s) {
                if (i == tr.rule.body.size()) {
                    matches.push_back(std::move(s));
                    return;
                }
                Atom pat = applySubst(store, tr.rule.body[i], s);
                const std::vector<uint32_t>* cands = &interp.factsOf(pat.pred);
                for (size_t k = 0; k < pat.args.size(); ++k) {
                    if (store.isGround(pat.args[k])) {
                        cands = &interp.postings(pat.pred, static_cast<uint32_t>(k), pat.args[k]);
                        break;
                    }
                }
                for (uint32_t fi : *cands) {
                    auto m = matchAtom(store, pat, interp.facts()[fi], s);
                    if (m) joinBody(i + 1, *m);
                }
            };
            joinBody(0, *head);
            if (matches.empty()) continue;
            if (tr.fromProgram && !inResult[tr.originIndex]) inResult[tr.originIndex] = true;
            for (const Substitution& nu : matches) {
                for (size_t i = 0; i < tr.rule.body.size(); ++i) {
                    Atom g = applySubst(store, tr.rule.body[i], nu);
                    if (opts.unaKnown && isConstEq(g)) continue;
                    enqueue(g);
                    if (store.isEq(g.pred) && tr.fromProgram)
                        blocked.insert({tr.originIndex, i});
                }
            }
        }
    }

    // Assemble the relevant program in program order, applying the UNA
    // equality elimination to unblocked body equalities.
    Program result;
    result.queryPreds = p.queryPreds;
    for (size_t idx = 0; idx < p.rules.size(); ++idx) {
        if (!inResult[idx]) continue;
        Rule r = p.rules[idx];
        if (opts.unaKnown) {
            // Track original body positions so removals keep the blocked-set
            // lookups valid across substitutions.
            std::vector<std::pair<Atom, size_t>> body;
            for (size_t i = 0; i < r.body.size(); ++i) body.emplace_back(r.body[i], i);
            bool changed = true;
            while (changed) {
                changed = false;
                std::vector<TermId> relVars;
                for (const auto& [a, pos] : body) {
                    if (!store.isEq(a.pred)) collectVars(store, a, relVars);
                }
                for (size_t i = 0; i < body.size(); ++i) {
                    const Atom& a = body[i].first;
                    if (!store.isEq(a.pred)) continue;
                    if (blocked.count({idx, body[i].second})) continue;
                    TermId var = kNoTerm;
                    TermId other = kNoTerm;
                    for (int side = 0; side < 2 && var == kNoTerm; ++side) {
                        TermId x = a.args[side];
                        TermId t = a.args[1 - side];
                        if (store.kind(x) == TermKind::Variable && store.depth(t) == 0 &&
                            std::find(relVars.begin(), relVars.end(), x) != relVars.end()) {
                            var = x;
                            other = t;
                        }
                    }
                    if (var == kNoTerm) continue;
                    body.erase(body.begin() + static_cast<long>(i));
                    if (var != other) {
                        Substitution s;
                        s.bind(var, other);
                        r.head = applySubst(store, r.head, s);
                        for (auto& [bAtom, pos] : body) bAtom = applySubst(store, bAtom, s);
                    }
                    changed = true;
                    break;
                }
            }
            r.body.clear();
            for (auto& [a, pos] : body) r.body.push_back(std::move(a));
        }
        result.rules.push_back(std::move(r));
    }
    return result;
}

}  // namespace deqa
