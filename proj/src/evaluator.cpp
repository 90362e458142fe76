#include "deqa/evaluator.hpp"

#include <algorithm>
#include <functional>

#include "deqa/syntax.hpp"

namespace deqa {

namespace {

void checkSafe(Store& store, const Rule& r) {
    std::vector<TermId> bodyVars;
    for (const Atom& a : r.body) collectVars(store, a, bodyVars);
    std::vector<TermId> all;
    collectVars(store, r.head, all);
    for (const Atom& a : r.body) collectVars(store, a, all);
    for (TermId v : all) {
        if (std::find(bodyVars.begin(), bodyVars.end(), v) == bodyVars.end())
            throw Error("unsafe rule: " + render(store, r));
    }
}

// Chooses the next body atom greedily by the number of bound variables,
// preferring atoms with the fewest unbound ones on ties.
struct JoinPlan {
    std::vector<size_t> order;
};

class RuleEvaluator {
public:
    RuleEvaluator(Store& store, const Rule& rule) : store_(store), rule_(rule) {}

    // Evaluates the rule with body atom `deltaPos` matched against facts of
    // `delta` and the remaining atoms against `full`, invoking emit for each
    // produced head atom.
    void run(const Instance& full, const Instance& delta, size_t deltaPos,
             const std::function<void(const Atom&)>& emit) {
        emit_ = &emit;
        full_ = &full;
        Substitution s;
        const auto& deltaFacts = delta.factsOf(rule_.body[deltaPos].pred);
        std::vector<size_t> rest;
        for (size_t i = 0; i < rule_.body.size(); ++i) {
            if (i != deltaPos) rest.push_back(i);
        }
        for (uint32_t fi : deltaFacts) {
            auto m = matchAtom(store_, rule_.body[deltaPos], delta.facts()[fi], s);
            if (!m) continue;
            join(rest, *m);
        }
    }

private:
    void join(std::vector<size_t> pending, Substitution s) {
        if (pending.empty()) {
            (*emit_)(applySubst(store_, rule_.head, s));
            return;
        }
        // Pick the atom with the most bound arguments.
        size_t bestIdx = 0;
        int bestScore = -1;
        for (size_t k = 0; k < pending.size(); ++k) {
            const Atom& a = rule_.body[pending[k]];
            int bound = 0;
            for (TermId t : a.args) {
                if (store_.isGround(applySubst(store_, t, s))) ++bound;
            }
            int score = bound * 16 - static_cast<int>(a.args.size());
            if (score > bestScore) {
                bestScore = score;
                bestIdx = k;
            }
        }
        size_t atomIdx = pending[bestIdx];
        pending.erase(pending.begin() + bestIdx);
        const Atom& patRaw = rule_.body[atomIdx];
        Atom pat = applySubst(store_, patRaw, s);

        // Narrow the candidate facts with the posting index on the first
        // ground argument, if any.
        const std::vector<uint32_t>* candidates = &full_->factsOf(pat.pred);
        for (size_t i = 0; i < pat.args.size(); ++i) {
            if (store_.isGround(pat.args[i])) {
                candidates = &full_->postings(pat.pred, static_cast<uint32_t>(i), pat.args[i]);
                break;
            }
        }
        for (uint32_t fi : *candidates) {
            auto m = matchAtom(store_, pat, full_->facts()[fi], s);
            if (!m) continue;
            join(pending, *m);
        }
    }

    Store& store_;
    const Rule& rule_;
    const Instance* full_ = nullptr;
    const std::function<void(const Atom&)>* emit_ = nullptr;
};

}  // namespace

FixpointResult fixpoint(Store& store, const Program& p, const Instance& b,
                        const FixpointLimits& lim) {
    for (const Rule& r : p.rules) checkSafe(store, r);

    FixpointResult result{Instance(store), RunStatus::Complete, 0};
    Instance& all = result.instance;
    Instance delta(store);
    bool limitHit = false;

    auto admit = [&](const Atom& fact, Instance& sink) {
        uint32_t depth = 0;
        for (TermId t : fact.args) depth = std::max<uint32_t>(depth, store.depth(t));
        if (depth > lim.maxDepth) {
            limitHit = true;
            return;
        }
        if (all.contains(fact)) return;
        if (all.size() >= lim.maxFacts) {
            limitHit = true;
            return;
        }
        all.insert(fact);
        sink.insert(fact);
    };

    for (const Atom& f : b.facts()) admit(f, delta);

    // Rules with empty bodies fire exactly once.
    for (const Rule& r : p.rules) {
        if (r.body.empty()) admit(r.head, delta);
    }

    while (delta.size() > 0) {
        if (result.rounds >= lim.maxRounds) {
            limitHit = true;
            break;
        }
        ++result.rounds;
        Instance next(store);
        auto emit = [&](const Atom& head) { admit(head, next); };
        for (const Rule& r : p.rules) {
            RuleEvaluator eval(store, r);
            for (size_t i = 0; i < r.body.size(); ++i) {
                if (delta.factsOf(r.body[i].pred).empty()) continue;
                eval.run(all, delta, i, emit);
            }
        }
        delta = std::move(next);
    }

    result.status = limitHit ? RunStatus::LimitHit : RunStatus::Complete;
    return result;
}

std::vector<Atom> answers(const Store& store, const Instance& i, PredId q) {
    std::vector<Atom> out;
    for (uint32_t fi : i.factsOf(q)) {
        const Atom& f = i.facts()[fi];
        bool allConst = true;
        for (TermId t : f.args) allConst = allConst && store.kind(t) == TermKind::Constant;
        if (allConst) out.push_back(f);
    }
    return out;
}

uint32_t maxFactDepth(const Store& store, const Instance& i) {
    uint32_t d = 0;
    for (const Atom& f : i.facts()) {
        for (TermId t : f.args) d = std::max<uint32_t>(d, store.depth(t));
    }
    return d;
}

}  // namespace deqa
