#include <doctest.h>

#include <algorithm>
#include <random>

#include "deqa/core.hpp"
#include "deqa/syntax.hpp"

using namespace deqa;

TEST_CASE("match binds variables to fact arguments") {
    Store store;
    PredId r = store.pred("R", 2);
    TermId x = store.variable("x");
    TermId y = store.variable("y");
    TermId a = store.constant("a");
    TermId b = store.constant("b");
    Atom pattern{r, {x, y}};
    Atom fact{r, {a, b}};
    auto m = matchAtom(store, pattern, fact, {});
    REQUIRE(m.has_value());
    CHECK(m->lookup(x) == a);
    CHECK(m->lookup(y) == b);
}

TEST_CASE("match fails on a clash") {
    Store store;
    PredId r = store.pred("R", 2);
    TermId x = store.variable("x");
    TermId a = store.constant("a");
    TermId b = store.constant("b");
    Atom pattern{r, {x, x}};
    Atom fact{r, {a, b}};
    CHECK(!matchAtom(store, pattern, fact, {}).has_value());
}

TEST_CASE("match descends into functional terms on equality atoms") {
    // f(?x) = ?z against f(a) = f(f(a))
    Store store;
    FnId f = store.fn("f", 1, FnKind::True);
    TermId x = store.variable("x");
    TermId z = store.variable("z");
    TermId a = store.constant("a");
    TermId fa = store.app(f, {a});
    TermId ffa = store.app(f, {fa});
    Atom pattern{store.eqPred(), {store.app(f, {x}), z}};
    Atom fact{store.eqPred(), {fa, ffa}};
    auto m = matchAtom(store, pattern, fact, {});
    REQUIRE(m.has_value());
    CHECK(m->lookup(x) == a);
    CHECK(m->lookup(z) == ffa);
}

TEST_CASE("match round-trips ground substitutions") {
    Store store;
    std::mt19937_64 rng(7);
    PredId r = store.pred("R", 3);
    std::vector<TermId> consts;
    for (int i = 0; i < 5; ++i) consts.push_back(store.constant("c" + std::to_string(i)));
    std::vector<TermId> vars;
    for (int i = 0; i < 3; ++i) vars.push_back(store.variable("v" + std::to_string(i)));
    for (int trial = 0; trial < 50; ++trial) {
        Atom pattern{r, {vars[rng() % 3], vars[rng() % 3], vars[rng() % 3]}};
        Substitution sigma;
        for (TermId v : vars) sigma.bind(v, consts[rng() % consts.size()]);
        Atom fact = applySubst(store, pattern, sigma);
        auto m = matchAtom(store, pattern, fact, {});
        REQUIRE(m.has_value());
        std::vector<TermId> patternVars;
        collectVars(store, pattern, patternVars);
        for (TermId v : patternVars) CHECK(m->lookup(v) == sigma.lookup(v));
    }
}

TEST_CASE("subsumption on instances with extra atoms") {
    Store store;
    // A(?x) <- B(?x) subsumes A(a) <- B(a), C(a).
    Program p1 = parseProgram(store, "B(?x) -> A(?x).");
    Program p2 = parseProgram(store, "B(a), C(a) -> A(a).");
    CHECK(subsumes(store, p1.rules[0], p2.rules[0]));
    CHECK(!subsumes(store, p2.rules[0], p1.rules[0]));
}

TEST_CASE("subsumption is reflexive") {
    Store store;
    Program p = parseProgram(store, "B(?x,?y), C(?y) -> A(?x).");
    CHECK(subsumes(store, p.rules[0], p.rules[0]));
}

TEST_CASE("subsumption can merge variables") {
    Store store;
    Program p1 = parseProgram(store, "B(?x,?y) -> A(?x).");
    Program p2 = parseProgram(store, "B(?x,?x), C(?x) -> A(?x).");
    CHECK(subsumes(store, p1.rules[0], p2.rules[0]));
}

TEST_CASE("subsumption is transitive over a random rule corpus") {
    Store store;
    std::mt19937_64 rng(11);
    std::vector<PredId> preds{store.pred("A", 1), store.pred("B", 2), store.pred("C", 1)};
    std::vector<TermId> vars;
    for (int i = 0; i < 3; ++i) vars.push_back(store.variable("u" + std::to_string(i)));
    std::vector<TermId> consts{store.constant("k1"), store.constant("k2")};
    auto randomTerm = [&]() { return rng() % 3 == 0 ? consts[rng() % 2] : vars[rng() % 3]; };
    auto randomAtom = [&]() {
        PredId p = preds[rng() % preds.size()];
        Atom a{p, {}};
        for (uint32_t i = 0; i < store.predInfo(p).arity; ++i) a.args.push_back(randomTerm());
        return a;
    };
    std::vector<Rule> corpus;
    for (int i = 0; i < 30; ++i) {
        Rule r;
        r.head = randomAtom();
        size_t n = 1 + rng() % 3;
        for (size_t k = 0; k < n; ++k) r.body.push_back(randomAtom());
        // Keep only safe rules.
        std::vector<TermId> bodyVars;
        for (const Atom& a : r.body) collectVars(store, a, bodyVars);
        std::vector<TermId> headVars;
        collectVars(store, r.head, headVars);
        bool safe = true;
        for (TermId v : headVars)
            safe = safe && std::find(bodyVars.begin(), bodyVars.end(), v) != bodyVars.end();
        if (safe) corpus.push_back(std::move(r));
    }
    for (const Rule& a : corpus) {
        for (const Rule& b : corpus) {
            if (!subsumes(store, a, b)) continue;
            for (const Rule& c : corpus) {
                if (subsumes(store, b, c)) CHECK(subsumes(store, a, c));
            }
        }
    }
}

TEST_CASE("chase term order: constants before nulls, keys deterministic") {
    Store store;
    TermId a = store.constant("a");
    TermId b = store.constant("b");
    TermId n0 = store.baseNull(0);
    TermId n3 = store.baseNull(3);
    TermId n7 = store.baseNull(7);
    FnId f = store.fn("f", 1, FnKind::True);
    TermId fnA = store.fnNull(store.app(f, {a}));
    TermId fnB = store.fnNull(store.app(f, {b}));

    CHECK(store.compareChaseTerms(a, n0) < 0);
    CHECK(store.compareChaseTerms(a, a) == 0);
    CHECK(store.compareChaseTerms(a, b) < 0);
    CHECK(store.compareChaseTerms(n3, n7) < 0);
    CHECK(store.compareChaseTerms(n7, fnA) < 0);
    CHECK(store.compareChaseTerms(fnA, fnB) < 0);

    // Strict total order on a sample of chase terms.
    std::vector<TermId> sample{a, b, n0, n3, n7, fnA, fnB, store.fnNull(store.app(f, {n0}))};
    for (TermId x : sample) {
        for (TermId y : sample) {
            int xy = store.compareChaseTerms(x, y);
            int yx = store.compareChaseTerms(y, x);
            CHECK(xy == -yx);
            if (x != y) CHECK(xy != 0);
            for (TermId z : sample) {
                if (xy < 0 && store.compareChaseTerms(y, z) < 0)
                    CHECK(store.compareChaseTerms(x, z) < 0);
            }
        }
    }
    CHECK_THROWS_AS((void)store.compareChaseTerms(store.variable("v"), a), Error);
}

TEST_CASE("terms are interned to stable ids") {
    Store store;
    FnId f = store.fn("f", 2, FnKind::True);
    TermId a = store.constant("a");
    TermId b = store.constant("b");
    CHECK(store.app(f, {a, b}) == store.app(f, {a, b}));
    CHECK(store.app(f, {a, b}) != store.app(f, {b, a}));
    CHECK(store.constant("a") == a);
    CHECK(store.variable("a") != a);
}
