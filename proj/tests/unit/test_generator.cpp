#include <doctest.h>

#include "deqa/chase.hpp"
#include "deqa/generator.hpp"
#include "deqa/transform.hpp"
#include "helpers.hpp"

using namespace deqa;

TEST_CASE("weak acyclicity accepts function-free rules") {
    Store store;
    Program p = parseProgram(store, "B(?x) -> A(?x).");
    CHECK(checkAcyclic(store, p.rules));
}

TEST_CASE("weak acyclicity rejects a self-feeding functional head") {
    Store store;
    Program p = parseProgram(store, "@true_function f/1.\nA(?x) -> A(f(?x)).");
    CHECK(!checkAcyclic(store, p.rules));
}

TEST_CASE("weak acyclicity rejects cycles through two rules") {
    Store store;
    Program p = parseProgram(store,
                             "@true_function f/1.\n"
                             "A(?x) -> B(f(?x)).\n"
                             "B(?x) -> A(?x).\n");
    CHECK(!checkAcyclic(store, p.rules));
}

TEST_CASE("weak acyclicity accepts the running example") {
    Store store;
    Scenario sc = parseScenario(store, testing::runningExampleText(2));
    Program p3 = skolemise(store, singularise(store, fol(store, sc), sc.queryPreds), sc.queryPreds);
    CHECK(checkAcyclic(store, p3.rules));
}

TEST_CASE("fixed seeds give byte-identical scenarios") {
    GenParams params;
    params.rngSeed = 42;
    params.seedQFacts = 3;
    params.maxNumberRules = 10;
    Store s1, s2;
    std::string one = render(s1, generate(s1, params));
    std::string two = render(s2, generate(s2, params));
    CHECK(one == two);
    CHECK(!one.empty());

    params.rngSeed = 43;
    Store s3;
    CHECK(render(s3, generate(s3, params)) != one);
}

TEST_CASE("generated scenarios re-parse to the same text") {
    GenParams params;
    params.rngSeed = 7;
    params.seedQFacts = 2;
    params.maxNumberRules = 8;
    Store store;
    std::string text = render(store, generate(store, params));
    Store fresh;
    Scenario parsed = parseScenario(fresh, text);
    CHECK(render(fresh, parsed) == text);
}

TEST_CASE("zero rule budget still produces a derivable base") {
    GenParams params;
    params.rngSeed = 5;
    params.seedQFacts = 1;
    params.maxNumberRules = 0;
    Store store;
    Scenario sc = generate(store, params);
    CHECK(!sc.facts.empty());
    ChaseResult r = chase(store, sc);
    REQUIRE(r.status == ChaseStatus::Complete);
    REQUIRE(sc.queryPreds.size() == 1);
    CHECK(!chaseAnswers(store, r, sc.queryPreds[0]).empty());
}

TEST_CASE("no generated rule subsumes another") {
    GenParams params;
    params.rngSeed = 99;
    params.seedQFacts = 3;
    params.maxNumberRules = 12;
    Store store;
    Scenario sc = generate(store, params);
    std::vector<Rule> rules;
    for (const Dependency& d : sc.deps) rules.push_back({d.head[0], d.body});
    for (size_t i = 0; i < rules.size(); ++i) {
        for (size_t k = 0; k < rules.size(); ++k) {
            if (i != k) CHECK(!subsumes(store, rules[i], rules[k]));
        }
    }
}

TEST_CASE("every seed query fact is an answer of the chase") {
    for (uint64_t seed : {1, 2, 3, 4, 5, 6, 7, 8}) {
        GenParams params;
        params.rngSeed = seed;
        params.seedQFacts = static_cast<uint32_t>(1 + seed % 4);
        params.maxNumberRules = static_cast<uint32_t>(4 + seed % 10);
        params.maxTermDepth = static_cast<uint32_t>(1 + seed % 2);
        params.maxNumberTuples = static_cast<uint32_t>(1 + seed % 3);
        Store store;
        GenResult gen = generateWithSeeds(store, params);
        const Scenario& sc = gen.scenario;
        FixpointLimits lim;
        lim.maxFacts = 300000;
        lim.maxDepth = 12;
        ChaseResult r = chase(store, sc, lim);
        REQUIRE(r.status == ChaseStatus::Complete);
        for (PredId q : sc.queryPreds) {
            auto qa = testing::renderedAtoms(store, chaseAnswers(store, r, q));
            for (const Atom& seedFact : gen.seedFacts) {
                if (seedFact.pred != q) continue;
                CHECK(qa.count(render(store, seedFact)) == 1);
            }
        }
    }
}

TEST_CASE("base instances are truly base") {
    GenParams params;
    params.rngSeed = 11;
    params.seedQFacts = 2;
    params.maxNumberRules = 10;
    params.maxNumberEqBodyAtoms = 2;
    Store store;
    Scenario sc = generate(store, params);
    for (const Atom& f : sc.facts) {
        CHECK(!store.isEq(f.pred));
        for (TermId t : f.args) CHECK(store.kind(t) == TermKind::Constant);
    }
}
