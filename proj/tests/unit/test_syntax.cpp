#include <doctest.h>

#include "deqa/syntax.hpp"

using namespace deqa;

namespace {

const char* kRunningExample = R"(
@query Q/1.
@true_function f/1.
R(?x1,?x2), f(?x1) = ?x3, A(?x3), B(?x3) -> Q(?x1).
S(?x1,?x2) -> exists ?y . R(?x1,?y).
R(?x2,?x1), S(?x2,?x3), R(?x3,?x4) -> ?x1 = ?x4.
C(?x) -> A(f(?x)).
C(?x) -> U(?x,f(?x)).
U(?x1,?x2) -> B(f(?x2)).
U(?x1,?x2) -> ?x1 = ?x2.
C(a1).
S(a1,a2).
S(a2,a3).
)";

}  // namespace

TEST_CASE("parses a dependency with a functional head") {
    Store store;
    Scenario sc = parseScenario(store, "C(?x) -> A(f(?x)).");
    REQUIRE(sc.deps.size() == 1);
    const Dependency& d = sc.deps[0];
    CHECK(d.body.size() == 1);
    CHECK(d.head.size() == 1);
    CHECK(store.depth(d.head[0].args[0]) == 1);
    // Undeclared symbols default to True kind.
    CHECK(store.fnInfo(store.term(d.head[0].args[0]).sym).kind == FnKind::True);
}

TEST_CASE("parses existential quantification") {
    Store store;
    Scenario sc = parseScenario(store, "S(?x1,?x2) -> exists ?y . R(?x1,?y).");
    REQUIRE(sc.deps.size() == 1);
    CHECK(sc.deps[0].existVars.size() == 1);
    CHECK(sc.deps[0].head[0].args[1] == sc.deps[0].existVars[0]);
}

TEST_CASE("empty input gives an empty scenario") {
    Store store;
    Scenario sc = parseScenario(store, "");
    CHECK(sc.deps.empty());
    CHECK(sc.facts.empty());
    CHECK(!sc.una);
}

TEST_CASE("parses the running example") {
    Store store;
    Scenario sc = parseScenario(store, kRunningExample);
    CHECK(sc.deps.size() == 7);
    CHECK(sc.facts.size() == 3);
    REQUIRE(sc.queryPreds.size() == 1);
    CHECK(store.predInfo(sc.queryPreds[0]).name == "Q");
    REQUIRE(sc.trueFns.size() == 1);
    CHECK(store.fnInfo(sc.trueFns[0]).name == "f");
}

TEST_CASE("round-trips the running example") {
    Store store;
    Scenario sc = parseScenario(store, kRunningExample);
    std::string text = render(store, sc);
    Scenario again = parseScenario(store, text);
    CHECK(render(store, again) == text);
    CHECK(again.deps.size() == sc.deps.size());
    CHECK(again.facts.size() == sc.facts.size());
}

TEST_CASE("renders facts canonically") {
    Store store;
    Scenario sc = parseScenario(store, "Q(a1).");
    CHECK(render(store, sc) == "Q(a1).\n");
    Instance none;
    CHECK(render(store, none) == "");
}

TEST_CASE("rejects a nested functional term in a body") {
    Store store;
    CHECK_THROWS_AS(parseScenario(store, "A(?x), f(g(?x)) = ?y, B(?y) -> C(?x)."), ParseError);
}

TEST_CASE("rejects function symbols in relational body atoms") {
    Store store;
    CHECK_THROWS_AS(parseScenario(store, "A(f(?x)) -> B(?x)."), ParseError);
}

TEST_CASE("rejects base facts with functions or equality") {
    Store store;
    CHECK_THROWS_AS(parseScenario(store, "A(f(a))."), ParseError);
    CHECK_THROWS_AS(parseScenario(store, "a = b."), ParseError);
}

TEST_CASE("rejects arity conflicts") {
    Store store;
    CHECK_THROWS_AS(parseScenario(store, "A(a). A(a,b)."), ParseError);
}

TEST_CASE("rejects unsafe dependencies") {
    Store store;
    CHECK_THROWS_AS(parseScenario(store, "A(?x), ?y = ?x -> B(?y)."), ParseError);
}

TEST_CASE("reports line and column on syntax errors") {
    Store store;
    try {
        parseScenario(store, "A(a).\nB(b,.\n");
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.line == 2);
    }
}

TEST_CASE("query predicates may not occur in dependency bodies") {
    Store store;
    CHECK_THROWS_AS(parseScenario(store, "@query Q/1. Q(?x) -> A(?x)."), Error);
}

TEST_CASE("program syntax round-trips rules with skolem declarations") {
    Store store;
    const char* text =
        "@skolem_function sk1/1.\n"
        "S(?x1,?x2) -> R(?x1,sk1(?x1)).\n";
    Program p = parseProgram(store, text);
    REQUIRE(p.rules.size() == 1);
    CHECK(store.fnInfo(store.term(p.rules[0].head.args[1]).sym).kind == FnKind::Skolem);
    CHECK(render(store, p) == text);
}

TEST_CASE("quoted constants survive a round trip") {
    Store store;
    Scenario sc = parseScenario(store, "A(\"odd name\").");
    std::string text = render(store, sc);
    Scenario again = parseScenario(store, text);
    CHECK(render(store, again) == text);
}
