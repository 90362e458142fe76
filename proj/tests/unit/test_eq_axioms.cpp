#include <doctest.h>

#include "deqa/eq_axioms.hpp"
#include "deqa/magic.hpp"
#include "deqa/syntax.hpp"
#include "deqa/transform.hpp"
#include "helpers.hpp"

using namespace deqa;

TEST_CASE("full axiomatisation instantiates per constant and position") {
    Store store;
    // One binary predicate, no functions, one constant.
    Program p = parseProgram(store, "R(?x,?y) -> R(?y,?x). R(a,a) -> R(a,a).");
    Program eq = buildEq(store, p);
    // -> D(a); two domain rules for R; reflexivity; symmetry; transitivity;
    // two congruence rules for R.
    CHECK(eq.rules.size() == 8);
    size_t emptyBodies = 0;
    for (const Rule& r : eq.rules) emptyBodies += r.body.empty();
    CHECK(emptyBodies == 1);
}

TEST_CASE("skolem-only symbols get no functional reflexivity") {
    Store store;
    Program p = parseProgram(store, "@skolem_function g/1.\nS(?x,?y) -> R(?x,g(?x)).");
    Program eq = buildEq(store, p);
    for (const Rule& r : eq.rules) {
        if (!store.isEq(r.head.pred)) continue;
        // No equality head may contain a functional term: that would be a
        // functional reflexivity rule.
        for (TermId t : r.head.args) CHECK(store.depth(t) == 0);
    }
}

TEST_CASE("empty program yields only the reflexivity block") {
    Store store;
    Program p;
    Program eq = buildEq(store, p);
    CHECK(eq.rules.size() == 3);  // Rfl, sym, trans
    Program sg = buildSg(store, p);
    CHECK(sg.rules.size() == 3);
}

TEST_CASE("sg of the running example guards f but not the skolem symbol") {
    Store store;
    Scenario sc = parseScenario(store, testing::runningExampleText(2));
    Program p3 = skolemise(store, singularise(store, fol(store, sc), sc.queryPreds), sc.queryPreds);
    Program sg = buildSg(store, p3);
    PredId dom = domainPred(store);
    int frRules = 0;
    for (const Rule& r : sg.rules) {
        if (!store.isEq(r.head.pred)) continue;
        if (store.depth(r.head.args[0]) == 0) continue;
        ++frRules;
        // Domain-guarded and instantiated for the true symbol f only.
        CHECK(store.fnInfo(store.term(r.head.args[0]).sym).name == "f");
        bool hasDomGuard = false;
        for (const Atom& a : r.body) hasDomGuard = hasDomGuard || a.pred == dom;
        CHECK(hasDomGuard);
    }
    CHECK(frRules == 1);
    // No congruence rules in SG.
    for (const Rule& r : sg.rules) {
        if (store.isEq(r.head.pred)) continue;
        if (r.body.empty()) continue;
        CHECK(r.body.size() == 1);  // only domain rules have relational heads
    }
}

TEST_CASE("sg is invariant under singularisation") {
    Store store;
    Scenario sc = parseScenario(store, testing::runningExampleText(2));
    std::vector<Dependency> p1 = fol(store, sc);
    Program before = skolemise(store, p1, sc.queryPreds);
    Program after = skolemise(store, singularise(store, p1, sc.queryPreds), sc.queryPreds);
    CHECK(testing::canonicalRules(store, buildSg(store, before)) ==
          testing::canonicalRules(store, buildSg(store, after)));
}

TEST_CASE("magic-aware sg skips domain rules for magic predicates") {
    Store store;
    Scenario sc = parseScenario(store, testing::runningExampleText(2));
    Program p3 = skolemise(store, singularise(store, fol(store, sc), sc.queryPreds), sc.queryPreds);
    Program p5 = magic(store, p3);
    Program sg = magicSg(store, p5);
    PredId dom = domainPred(store);
    for (const Rule& r : sg.rules) {
        if (r.head.pred != dom || r.body.empty()) continue;
        CHECK(!isMagicPred(store, r.body[0].pred));
    }
    // The degenerate case: without magic predicates both constructions agree.
    Program plain = parseProgram(store, "Rw(?x,?y) -> Aw(?x).");
    CHECK(testing::canonicalRules(store, magicSg(store, plain)) ==
          testing::canonicalRules(store, buildSg(store, plain)));
}
