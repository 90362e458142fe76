#include <doctest.h>

#include <random>

#include "deqa/eq_axioms.hpp"
#include "deqa/evaluator.hpp"
#include "deqa/transform.hpp"
#include "helpers.hpp"

using namespace deqa;

namespace {

// Independent oracle: the naive immediate-consequence iteration, recomputing
// every rule instance from scratch each round.
Instance naiveFixpoint(Store& store, const Program& p, const Instance& b, uint32_t maxDepth) {
    Instance all(store);
    for (const Atom& f : b.facts()) all.insert(f);
    bool changed = true;
    while (changed) {
        changed = false;
        std::vector<Atom> fresh;
        for (const Rule& r : p.rules) {
            std::function<void(size_t, Substitution)> go = [&](size_t i, Substitution s) {
                if (i == r.body.size()) {
                    Atom head = applySubst(store, r.head, s);
                    uint32_t d = 0;
                    for (TermId t : head.args) d = std::max<uint32_t>(d, store.depth(t));
                    if (d <= maxDepth && !all.contains(head)) fresh.push_back(head);
                    return;
                }
                for (const Atom& f : all.facts()) {
                    auto m = matchAtom(store, r.body[i], f, s);
                    if (m) go(i + 1, *m);
                }
            };
            if (r.body.empty()) {
                go(0, {});
            } else {
                go(0, {});
            }
        }
        for (const Atom& f : fresh) changed = all.insert(f) || changed;
    }
    return all;
}

}  // namespace

TEST_CASE("single-rule fixpoint") {
    Store store;
    Program p = parseProgram(store, "A(?x) -> B(?x).");
    Instance b(store);
    b.insert({store.pred("A", 1), {store.constant("a")}});
    FixpointResult r = fixpoint(store, p, b);
    CHECK(r.status == RunStatus::Complete);
    CHECK(r.instance.size() == 2);
    CHECK(r.instance.contains({store.pred("B", 1), {store.constant("a")}}));
}

TEST_CASE("unsafe rules are rejected") {
    Store store;
    Program p;
    p.rules.push_back({{store.pred("A", 1), {store.variable("x")}}, {}});
    Instance b(store);
    CHECK_THROWS_AS(fixpoint(store, p, b), Error);
}

TEST_CASE("unguarded functional reflexivity hits the depth limit") {
    Store store;
    Program p = parseProgram(store,
                             "@true_function f/1.\n"
                             "A(?x) -> ?x = ?x.\n"
                             "?x1 = ?x2 -> f(?x1) = f(?x2).\n");
    Instance b(store);
    b.insert({store.pred("A", 1), {store.constant("a")}});
    FixpointLimits lim;
    lim.maxDepth = 4;
    FixpointResult r = fixpoint(store, p, b, lim);
    CHECK(r.status == RunStatus::LimitHit);
    CHECK(maxFactDepth(store, r.instance) == 4);
}

TEST_CASE("fixpoint on the critical instance of the running example") {
    Store store;
    Scenario sc = parseScenario(store, testing::runningExampleText(2));
    Program p3 = skolemise(store, singularise(store, fol(store, sc), sc.queryPreds), sc.queryPreds);
    Program all = p3;
    AxiomOptions ao;
    ao.extraPreds = {store.pred("C", 1), store.pred("S", 2)};
    for (const Rule& r : buildSg(store, p3, ao).rules) all.rules.push_back(r);

    Instance critical(store);
    TermId st = store.constant("*");
    PredId predC = store.pred("C", 1);
    PredId predS = store.pred("S", 2);
    critical.insert({predC, {st}});
    critical.insert({predS, {st, st}});

    FixpointResult r = fixpoint(store, all, critical);
    REQUIRE(r.status == RunStatus::Complete);

    FnId f = *store.findFn("f", 1);
    FnId sk = *store.findFn("sk1", 1);
    TermId f1 = store.app(f, {st});
    TermId f2 = store.app(f, {f1});
    TermId f3 = store.app(f, {f2});
    TermId g1 = store.app(sk, {st});
    PredId eq = store.eqPred();
    PredId dom = domainPred(store);
    PredId q = sc.queryPreds[0];

    std::set<std::string> expected;
    auto add = [&](const Atom& a) { expected.insert(render(store, a)); };
    add({predC, {st}});
    add({predS, {st, st}});
    add({store.pred("R", 2), {st, g1}});
    add({store.pred("A", 1), {f1}});
    add({store.pred("U", 2), {st, f1}});
    add({store.pred("B", 1), {f2}});
    // The query rule joins through the equality chain, so every member of
    // the chain class shows up in a Q fact.
    add({q, {st}});
    add({q, {f1}});
    add({q, {f2}});
    add({q, {f3}});
    add({dom, {st}});
    add({dom, {g1}});
    add({dom, {f1}});
    add({dom, {f2}});
    std::vector<TermId> chain{st, f1, f2, f3};
    for (TermId x : chain)
        for (TermId y : chain) add({eq, {x, y}});
    add({eq, {g1, g1}});
    add({eq, {store.app(f, {g1}), store.app(f, {g1})}});

    CHECK(testing::renderedFacts(store, r.instance) == expected);
    CHECK(r.instance.size() == 32);

    // Answers are the constant-only Q facts.
    auto qa = answers(store, r.instance, q);
    REQUIRE(qa.size() == 1);
    CHECK(render(store, qa[0]) == "Q(\"*\")");
}

TEST_CASE("answers ignore facts with non-constant arguments") {
    Store store;
    PredId q = store.pred("Q", 1);
    Instance i(store);
    i.insert({q, {store.baseNull(0)}});
    CHECK(answers(store, i, q).empty());
    i.insert({q, {store.constant("a")}});
    CHECK(answers(store, i, q).size() == 1);
}

TEST_CASE("semi-naive agrees with the naive oracle on random programs") {
    std::mt19937_64 seeds(2024);
    for (int trial = 0; trial < 50; ++trial) {
        Store store;
        std::mt19937_64 rng(seeds());
        std::vector<PredId> preds{store.pred("A", 1), store.pred("B", 2), store.pred("C", 1)};
        std::vector<TermId> vars{store.variable("x"), store.variable("y")};
        std::vector<TermId> consts{store.constant("a"), store.constant("b")};
        auto randomAtom = [&](bool allowConst) {
            PredId p = preds[rng() % preds.size()];
            Atom a{p, {}};
            for (uint32_t i = 0; i < store.predInfo(p).arity; ++i) {
                if (allowConst && rng() % 4 == 0) {
                    a.args.push_back(consts[rng() % 2]);
                } else {
                    a.args.push_back(vars[rng() % 2]);
                }
            }
            return a;
        };
        Program p;
        for (int i = 0; i < 4; ++i) {
            Rule r;
            r.body.push_back(randomAtom(true));
            if (rng() % 2) r.body.push_back(randomAtom(true));
            // Build a safe head over body variables.
            std::vector<TermId> bodyVars;
            for (const Atom& a : r.body) collectVars(store, a, bodyVars);
            PredId hp = preds[rng() % preds.size()];
            r.head.pred = hp;
            for (uint32_t k = 0; k < store.predInfo(hp).arity; ++k) {
                if (bodyVars.empty()) {
                    r.head.args.push_back(consts[rng() % 2]);
                } else {
                    r.head.args.push_back(bodyVars[rng() % bodyVars.size()]);
                }
            }
            p.rules.push_back(std::move(r));
        }
        Instance b(store);
        for (int i = 0; i < 4; ++i) {
            PredId bp = preds[rng() % preds.size()];
            Atom f{bp, {}};
            for (uint32_t k = 0; k < store.predInfo(bp).arity; ++k)
                f.args.push_back(consts[rng() % 2]);
            b.insert(f);
        }
        FixpointResult fast = fixpoint(store, p, b);
        Instance slow = naiveFixpoint(store, p, b, 64);
        CHECK(testing::renderedFacts(store, fast.instance) == testing::renderedFacts(store, slow));

        // Monotonicity: dropping a base fact never adds derived facts.
        if (b.size() > 1) {
            Instance smaller(store);
            for (size_t i = 0; i + 1 < b.facts().size(); ++i) smaller.insert(b.facts()[i]);
            FixpointResult less = fixpoint(store, p, smaller);
            auto bigSet = testing::renderedFacts(store, fast.instance);
            for (const std::string& f : testing::renderedFacts(store, less.instance))
                CHECK(bigSet.count(f) == 1);
        }
    }
}
