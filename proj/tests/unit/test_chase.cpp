#include <doctest.h>

#include "deqa/chase.hpp"
#include "deqa/eq_axioms.hpp"
#include "deqa/evaluator.hpp"
#include "deqa/transform.hpp"
#include "helpers.hpp"

using namespace deqa;

namespace {

// Invariants every completed chase must satisfy: no surviving equality
// facts, functional fnval entries, and an idempotent representative map.
void checkChaseInvariants(Store& store, const ChaseResult& r) {
    std::set<std::vector<TermId>> fnvalKeys;
    for (const Atom& f : r.model.facts()) {
        CHECK(!store.isEq(f.pred));
        const std::string& name = store.predInfo(f.pred).name;
        if (name.rfind("fnval_", 0) == 0) {
            std::vector<TermId> key(f.args.begin(), f.args.end() - 1);
            key.insert(key.begin(), static_cast<TermId>(f.pred));
            CHECK(fnvalKeys.insert(key).second);  // functionality
        }
    }
    for (const auto& [c, rep] : r.mu) {
        CHECK(r.representative(rep) == rep);  // idempotence
        CHECK(store.kind(rep) == TermKind::Constant);
    }
}

}  // namespace

TEST_CASE("chase of the empty instance is empty") {
    Store store;
    Scenario sc = parseScenario(store, "C(?x) -> A(f(?x)).");
    sc.facts.clear();
    ChaseResult r = chase(store, sc);
    CHECK(r.status == ChaseStatus::Complete);
    CHECK(r.model.size() == 0);
    CHECK(r.mu.empty());
}

TEST_CASE("dependency steps record fnval for true symbols") {
    Store store;
    Scenario sc = parseScenario(store,
                                "@true_function f/1.\n"
                                "C(?x) -> U(?x,f(?x)).\n"
                                "C(a1).\n");
    ChaseResult r = chase(store, sc);
    REQUIRE(r.status == ChaseStatus::Complete);
    TermId a1 = store.constant("a1");
    FnId f = *store.findFn("f", 1);
    TermId fn = store.fnNull(store.app(f, {a1}));
    CHECK(r.model.contains({store.pred("U", 2), {a1, fn}}));
    CHECK(r.model.contains({store.pred("fnval_f", 2), {a1, fn}}));
}

TEST_CASE("skolem symbols never get fnval entries") {
    Store store;
    Scenario sc = parseScenario(store, "A(?x) -> exists ?y . S(?x,?y).\nA(a).\n");
    ChaseResult r = chase(store, sc);
    REQUIRE(r.status == ChaseStatus::Complete);
    for (const Atom& f : r.model.facts())
        CHECK(store.predInfo(f.pred).name.rfind("fnval_", 0) != 0);
}

TEST_CASE("running example answers are exactly Q(a1)") {
    for (int n : {2, 3, 5}) {
        Store store;
        Scenario sc = parseScenario(store, testing::runningExampleText(n));
        ChaseResult r = chase(store, sc);
        REQUIRE(r.status == ChaseStatus::Complete);
        checkChaseInvariants(store, r);
        auto qa = chaseAnswers(store, r, sc.queryPreds[0]);
        REQUIRE(qa.size() == 1);
        CHECK(render(store, qa[0]) == "Q(a1)");

        // The equality steps collapse f(a1) into a1.
        TermId a1 = store.constant("a1");
        CHECK(r.model.contains({store.pred("A", 1), {a1}}));
        CHECK(r.model.contains({store.pred("B", 1), {a1}}));
        CHECK(r.model.contains({store.pred("U", 2), {a1, a1}}));

        // One R fact per S fact, targets merged into the first null.
        size_t rFacts = r.model.factsOf(store.pred("R", 2)).size();
        CHECK(rFacts == static_cast<size_t>(n));
        std::set<TermId> targets;
        for (uint32_t fi : r.model.factsOf(store.pred("R", 2)))
            targets.insert(r.model.facts()[fi].args[1]);
        CHECK(targets.size() == 1);
    }
}

TEST_CASE("equality steps replace the larger side and update mu") {
    Store store;
    Scenario sc = parseScenario(store, "R(?x,?y) -> ?x = ?y.\nR(b,a).\nR(c,b).\n");
    ChaseResult r = chase(store, sc);
    REQUIRE(r.status == ChaseStatus::Complete);
    checkChaseInvariants(store, r);
    TermId a = store.constant("a");
    CHECK(r.representative(store.constant("b")) == a);
    CHECK(r.representative(store.constant("c")) == a);
    CHECK(r.model.contains({store.pred("R", 2), {a, a}}));
    CHECK(r.model.factsOf(store.pred("R", 2)).size() == 1);
    CHECK(r.unaViolations.size() == 2);
}

TEST_CASE("una mode aborts on a constant merge") {
    Store store;
    Scenario sc = parseScenario(store, "@una.\nR(?x,?y) -> ?x = ?y.\nR(b,a).\n");
    ChaseResult r = chase(store, sc);
    CHECK(r.status == ChaseStatus::UnaViolation);
    REQUIRE(r.unaViolations.size() == 1);
    Atom violation{store.eqPred(), {r.unaViolations[0].first, r.unaViolations[0].second}};
    CHECK(render(store, violation) == "a = b");
}

TEST_CASE("fnval collisions merge the colliding values") {
    Store store;
    // Merging a and b forces f(a) and f(b) to denote the same object.
    Scenario sc = parseScenario(store,
                                "@true_function f/1.\n"
                                "A(?x) -> U(?x,f(?x)).\n"
                                "R(?x,?y) -> ?x = ?y.\n"
                                "A(a). A(b). R(a,b).\n");
    ChaseResult r = chase(store, sc);
    REQUIRE(r.status == ChaseStatus::Complete);
    checkChaseInvariants(store, r);
    TermId a = store.constant("a");
    PredId u = store.pred("U", 2);
    // Exactly one U fact: U(a, v) with a single shared value v.
    REQUIRE(r.model.factsOf(u).size() == 1);
    const Atom& uf = r.model.facts()[r.model.factsOf(u)[0]];
    CHECK(uf.args[0] == a);
    CHECK(r.model.factsOf(store.pred("fnval_f", 2)).size() == 1);
}

TEST_CASE("skolemised equality example keeps f(a) and f(b) apart") {
    // Sigma' = { R(x1,x2) -> x1 = x2 ; A(x) -> S(x,f(x)) } with f a Skolem
    // symbol, B = { R(a,b), A(a), A(b) }: a and b merge, S facts exist, and
    // no equality between f(a) and f(b) is ever required.
    Store store;
    Scenario sc = parseScenario(store,
                                "@skolem_function f/1.\n"
                                "R(?x1,?x2) -> ?x1 = ?x2.\n"
                                "A(?x) -> S(?x,f(?x)).\n"
                                "R(a,b). A(a). A(b).\n");
    ChaseResult r = chase(store, sc);
    REQUIRE(r.status == ChaseStatus::Complete);
    checkChaseInvariants(store, r);
    TermId a = store.constant("a");
    CHECK(r.representative(store.constant("b")) == a);
    CHECK(!r.model.factsOf(store.pred("S", 2)).empty());
    // No fnval entries for the Skolem symbol, hence no f(a) = f(b) merge:
    // every S target stays a functional null.
    for (uint32_t fi : r.model.factsOf(store.pred("S", 2))) {
        CHECK(store.kind(r.model.facts()[fi].args[1]) == TermKind::FnNull);
    }
}

TEST_CASE("head constants are normalised through mu") {
    Store store;
    Scenario sc = parseScenario(store,
                                "R(?x,?y) -> ?x = ?y.\n"
                                "T(?x) -> W(?x,b).\n"
                                "R(b,a). T(a).\n");
    ChaseResult r = chase(store, sc);
    REQUIRE(r.status == ChaseStatus::Complete);
    TermId a = store.constant("a");
    CHECK(r.model.contains({store.pred("W", 2), {a, a}}));
}

TEST_CASE("body constants are handled by the constant rewrite") {
    Store store;
    Scenario sc = parseScenario(store, "R(a,?y) -> T(?y).\nR(a,b). R(c,d).\n");
    ChaseResult r = chase(store, sc);
    REQUIRE(r.status == ChaseStatus::Complete);
    CHECK(r.model.contains({store.pred("T", 1), {store.constant("b")}}));
    CHECK(!r.model.contains({store.pred("T", 1), {store.constant("d")}}));
}

TEST_CASE("restricted chase does not refire satisfied existentials") {
    Store store;
    Scenario sc = parseScenario(store, "S(?x1,?x2) -> exists ?y . R(?x1,?y).\nS(a,b). S(a,c).\n");
    ChaseResult r = chase(store, sc);
    REQUIRE(r.status == ChaseStatus::Complete);
    CHECK(r.model.factsOf(store.pred("R", 2)).size() == 1);
}

TEST_CASE("chase agrees with the equality-axiomatised fixpoint on answers") {
    // Chase answers equal evaluator answers over P3 + EQ(P3) with a depth
    // cap comfortably above the chase's term depth.
    Store store;
    Scenario sc = parseScenario(store, testing::runningExampleText(3));
    ChaseResult chaseRun = chase(store, sc);
    REQUIRE(chaseRun.status == ChaseStatus::Complete);

    Program p3 = skolemise(store, singularise(store, fol(store, sc), sc.queryPreds), sc.queryPreds);
    Program oracle = p3;
    AxiomOptions ao;
    for (const Atom& f : sc.facts) ao.extraPreds.push_back(f.pred);
    for (const Rule& r : buildEq(store, p3, ao).rules) oracle.rules.push_back(r);
    Instance b(store);
    for (const Atom& f : sc.facts) b.insert(f);
    FixpointLimits lim;
    lim.maxDepth = 6;
    FixpointResult fp = fixpoint(store, oracle, b, lim);

    CHECK(testing::renderedAtoms(store, chaseAnswers(store, chaseRun, sc.queryPreds[0])) ==
          testing::renderedAtoms(store, answers(store, fp.instance, sc.queryPreds[0])));
}

TEST_CASE("limits stop runaway chases") {
    Store store;
    Scenario sc = parseScenario(store, "A(?x) -> exists ?y . A2(?x,?y).\nA2(?x,?y) -> A(?y).\nA(a).\n");
    FixpointLimits lim;
    lim.maxFacts = 30;
    ChaseResult r = chase(store, sc, lim);
    CHECK(r.status == ChaseStatus::LimitHit);
}
