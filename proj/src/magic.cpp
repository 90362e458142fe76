#include "deqa/magic.hpp"

#include <algorithm>
#include <deque>
#include <set>

#include "deqa/syntax.hpp"

namespace deqa {

namespace {

bool termBound(const Store& store, TermId t, const std::set<TermId>& seen) {
    const TermData& td = store.term(t);
    switch (td.kind) {
        case TermKind::Constant: return true;
        case TermKind::Variable: return seen.count(t) > 0;
        case TermKind::App: {
            for (TermId a : td.args) {
                if (!termBound(store, a, seen)) return false;
            }
            return true;
        }
        default: return false;
    }
}

void collectVarsInto(const Store& store, TermId t, std::set<TermId>& out) {
    const TermData& td = store.term(t);
    if (td.kind == TermKind::Variable) {
        out.insert(t);
    } else if (td.kind == TermKind::App) {
        for (TermId a : td.args) collectVarsInto(store, a, out);
    }
}

}  // namespace

SipsResult sips(Store& store, const std::vector<Atom>& body, const std::vector<TermId>& bound) {
    SipsResult result;
    std::set<TermId> seen(bound.begin(), bound.end());
    std::set<TermId> relationalSeen;
    std::vector<bool> used(body.size(), false);

    for (size_t step = 0; step < body.size(); ++step) {
        int bestScore = -1;
        size_t bestIdx = 0;
        bool bestRelational = false;
        for (size_t i = 0; i < body.size(); ++i) {
            if (used[i]) continue;
            const Atom& a = body[i];
            bool relational = !store.isEq(a.pred);
            int score;
            if (relational) {
                score = 0;
                for (TermId t : a.args) {
                    if (termBound(store, t, seen)) ++score;
                }
            } else {
                // An equality side may be marked bound only when its
                // variables occur in preceding relational atoms.
                bool leftOk = termBound(store, a.args[0], relationalSeen);
                bool rightOk = termBound(store, a.args[1], relationalSeen);
                if (!leftOk && !rightOk) continue;  // not selectable yet
                score = 1;
            }
            // Tie-breaks: relational before equality, then the latest
            // textual position.
            bool better = false;
            if (score > bestScore) {
                better = true;
            } else if (score == bestScore) {
                if (relational && !bestRelational) {
                    better = true;
                } else if (relational == bestRelational && i > bestIdx) {
                    better = true;
                }
            }
            if (better) {
                bestScore = score;
                bestIdx = i;
                bestRelational = relational;
            }
        }
        if (bestScore < 0) throw Error("sips: body is not well-formed");
        used[bestIdx] = true;
        const Atom& a = body[bestIdx];
        std::string adorn;
        if (store.isEq(a.pred)) {
            bool leftOk = termBound(store, a.args[0], relationalSeen);
            adorn = leftOk ? "bf" : "fb";
        } else {
            for (TermId t : a.args) adorn.push_back(termBound(store, t, seen) ? 'b' : 'f');
            for (TermId t : a.args) collectVarsInto(store, t, relationalSeen);
        }
        std::vector<TermId> vars;
        collectVars(store, a, vars);
        seen.insert(vars.begin(), vars.end());
        result.order.push_back(bestIdx);
        result.adornments.push_back(std::move(adorn));
    }
    return result;
}

namespace {

struct AdornedPred {
    PredId pred;
    std::string adorn;

    bool operator<(const AdornedPred& o) const {
        return pred != o.pred ? pred < o.pred : adorn < o.adorn;
    }
};

class MagicBuilder {
public:
    MagicBuilder(Store& store, const Program& p, const MagicOptions& opts)
        : store_(store), p_(p) {
        for (const Rule& r : p.rules) headPreds_.insert(r.head.pred);
        dom_ = buildDom(store, p, {});
        domPred_ = domainPred(store);
        hasTrueFns_ = false;
        auto scan = [&](TermId t, auto&& self) -> void {
            const TermData& td = store_.term(t);
            if (td.kind == TermKind::App) {
                if (store_.fnInfo(td.sym).kind == FnKind::True) trueFns_.insert(td.sym);
                for (TermId a : td.args) self(a, self);
            }
        };
        for (const Rule& r : p.rules) {
            for (TermId t : r.head.args) scan(t, scan);
            for (const Atom& a : r.body)
                for (TermId t : a.args) scan(t, scan);
        }
        hasTrueFns_ = !trueFns_.empty() && !opts.disableFunctionalReflexivity;
    }

    Program build() {
        Program out;
        out.queryPreds = p_.queryPreds;
        for (PredId q : p_.queryPreds) {
            std::string adorn(store_.predInfo(q).arity, 'f');
            AdornedPred seed{q, adorn};
            minted_.insert(seed);
            mintedByPred_[q].push_back(adorn);
            queue_.push_back(seed);
            Rule seedRule;
            seedRule.head = {magicPred(seed), {}};
            emit(out, seedRule);
        }
        while (!queue_.empty()) {
            AdornedPred current = queue_.front();
            queue_.pop_front();
            processPredicate(out, current);
        }
        if (minted_.count({store_.eqPred(), "b"})) {
            addEqualityBlock(out);
        }
        return out;
    }

private:
    PredId magicPred(const AdornedPred& ap) {
        if (store_.isEq(ap.pred)) return store_.pred("m_eq_b", 1);
        uint32_t arity = static_cast<uint32_t>(std::count(ap.adorn.begin(), ap.adorn.end(), 'b'));
        return store_.pred("m_" + store_.predInfo(ap.pred).name + "_" + ap.adorn, arity);
    }

    std::vector<TermId> boundTuple(const Atom& a, const std::string& adorn) {
        std::vector<TermId> out;
        for (size_t i = 0; i < a.args.size(); ++i) {
            if (adorn[i] == 'b') out.push_back(a.args[i]);
        }
        return out;
    }

    void processPredicate(Program& out, const AdornedPred& current) {
        auto handle = [&](const Rule& r, bool fromDom) {
            if (r.head.pred != current.pred) return;
            if (store_.isEq(current.pred)) {
                process(out, r, current, "bf", fromDom);
                process(out, r, current, "fb", fromDom);
                if (hasTrueFns_) requestPred({domPred_, "b"});
            } else {
                process(out, r, current, current.adorn, fromDom);
            }
        };
        for (const Rule& r : p_.rules) handle(r, false);
        for (const Rule& r : dom_.rules) handle(r, true);
    }

    void requestPred(const AdornedPred& ap) {
        if (minted_.insert(ap).second) {
            mintedByPred_[ap.pred].push_back(ap.adorn);
            queue_.push_back(ap);
        }
    }

    // Relaxes a maximal adornment to an already-minted, more general one for
    // the same predicate; propagating bindings into a predicate that is
    // already computed in a more general form would only add work.
    std::string relaxAdornment(PredId pred, const std::string& adorn) {
        auto it = mintedByPred_.find(pred);
        if (it == mintedByPred_.end()) return adorn;
        const std::vector<std::string>& existing = it->second;
        if (std::find(existing.begin(), existing.end(), adorn) != existing.end()) return adorn;
        const std::string* best = nullptr;
        for (const std::string& cand : existing) {
            if (cand.size() != adorn.size()) continue;
            bool moreGeneral = true;
            for (size_t i = 0; i < cand.size(); ++i) {
                if (cand[i] == 'b' && adorn[i] != 'b') {
                    moreGeneral = false;
                    break;
                }
            }
            if (!moreGeneral) continue;
            if (!best || std::count(cand.begin(), cand.end(), 'b') <
                             std::count(best->begin(), best->end(), 'b'))
                best = &cand;
        }
        return best ? *best : adorn;
    }

    void process(Program& out, const Rule& r, const AdornedPred& current, const std::string& beta,
                 bool fromDom) {
        PredId mp = magicPred(current);
        Atom magicAtom{mp, boundTuple(r.head, beta)};

        SipsResult plan = sips(store_, r.body, varsOf(magicAtom));
        if (!fromDom) {
            Rule modified;
            modified.head = r.head;
            modified.body.push_back(magicAtom);
            for (size_t k : plan.order) modified.body.push_back(r.body[k]);
            emit(out, modified);
        }
        for (size_t i = 0; i < plan.order.size(); ++i) {
            const Atom& atom = r.body[plan.order[i]];
            bool isEq = store_.isEq(atom.pred);
            bool isDom = atom.pred == domPred_;
            if (!isEq && !isDom && !headPreds_.count(atom.pred)) continue;
            AdornedPred target{atom.pred, isEq ? "b" : plan.adornments[i]};
            std::string effective = plan.adornments[i];
            if (!isEq) {
                effective = relaxAdornment(atom.pred, plan.adornments[i]);
                target.adorn = effective;
            }
            PredId sp = magicPred(target);
            Rule magicRule;
            if (isEq) {
                TermId side = effective == "bf" ? atom.args[0] : atom.args[1];
                magicRule.head = {sp, {side}};
            } else {
                magicRule.head = {sp, boundTuple(atom, effective)};
            }
            magicRule.body.push_back(magicAtom);
            for (size_t k = 0; k < i; ++k) magicRule.body.push_back(r.body[plan.order[k]]);
            emit(out, magicRule);
            requestPred(target);
        }
    }

    void addEqualityBlock(Program& out) {
        PredId meq = store_.pred("m_eq_b", 1);
        PredId eq = store_.eqPred();
        {
            TermId x1 = store_.variable("x1@meq");
            TermId x2 = store_.variable("x2@meq");
            Rule r;
            r.head = {meq, {x2}};
            r.body.push_back({meq, {x1}});
            r.body.push_back({eq, {x1, x2}});
            emit(out, r);
        }
        if (!hasTrueFns_) return;
        PredId mdom = store_.pred("m_D_b", 1);
        for (FnId f : orderedTrueFns()) {
            uint32_t n = store_.fnInfo(f).arity;
            std::vector<TermId> xs;
            for (uint32_t i = 1; i <= n; ++i)
                xs.push_back(store_.variable("x" + std::to_string(i) + "@meq" + std::to_string(f)));
            TermId appTerm = store_.app(f, xs);
            for (uint32_t i = 0; i < n; ++i) {
                {
                    Rule r;
                    r.head = {mdom, {xs[i]}};
                    r.body.push_back({meq, {appTerm}});
                    emit(out, r);
                }
                {
                    Rule r;
                    r.head = {meq, {xs[i]}};
                    r.body.push_back({meq, {appTerm}});
                    r.body.push_back({domPred_, {xs[i]}});
                    emit(out, r);
                }
                {
                    TermId xp = store_.variable("xp" + std::to_string(i + 1) + "@meq" +
                                                std::to_string(f));
                    Rule r;
                    r.head = {mdom, {xp}};
                    r.body.push_back({meq, {appTerm}});
                    r.body.push_back({domPred_, {xs[i]}});
                    r.body.push_back({eq, {xs[i], xp}});
                    emit(out, r);
                }
            }
        }
    }

    std::vector<FnId> orderedTrueFns() const {
        std::vector<FnId> out(trueFns_.begin(), trueFns_.end());
        std::sort(out.begin(), out.end());
        return out;
    }

    std::vector<TermId> varsOf(const Atom& a) {
        std::vector<TermId> vars;
        collectVars(store_, a, vars);
        return vars;
    }

    // Emits a rule unless an alpha-equivalent one was emitted before.
    void emit(Program& out, const Rule& r) {
        std::string key = canonicalKey(r);
        if (!emitted_.insert(key).second) return;
        out.rules.push_back(r);
    }

    std::string canonicalKey(const Rule& r) {
        std::unordered_map<TermId, int> renaming;
        std::string key;
        auto term = [&](TermId t, auto&& self) -> void {
            const TermData& td = store_.term(t);
            if (td.kind == TermKind::Variable) {
                auto [it, fresh] = renaming.emplace(t, static_cast<int>(renaming.size()));
                key += "v" + std::to_string(it->second);
            } else if (td.kind == TermKind::App) {
                key += store_.fnInfo(td.sym).name + "(";
                for (TermId a : td.args) {
                    self(a, self);
                    key += ",";
                }
                key += ")";
            } else {
                key += renderTerm(store_, t);
            }
        };
        auto atom = [&](const Atom& a) {
            key += store_.predInfo(a.pred).name + "(";
            for (TermId t : a.args) {
                term(t, term);
                key += ",";
            }
            key += ")";
        };
        atom(r.head);
        key += "<-";
        for (const Atom& a : r.body) atom(a);
        return key;
    }

    Store& store_;
    const Program& p_;

    Program dom_;
    PredId domPred_;
    std::set<PredId> headPreds_;
    std::set<FnId> trueFns_;
    bool hasTrueFns_;
    std::set<AdornedPred> minted_;
    std::unordered_map<PredId, std::vector<std::string>> mintedByPred_;
    std::deque<AdornedPred> queue_;
    std::set<std::string> emitted_;
};

}  // namespace

Program magic(Store& store, const Program& p, const MagicOptions& opts) {
    MagicBuilder builder(store, p, opts);
    return builder.build();
}

Program magicSg(Store& store, const Program& r, const AxiomOptions& opts) {
    AxiomOptions local = opts;
    local.skipMagicDomains = true;
    return buildSg(store, r, local);
}

}  // namespace deqa
