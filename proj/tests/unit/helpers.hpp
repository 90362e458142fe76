#pragma once

#include <set>
#include <string>

#include "deqa/syntax.hpp"

namespace deqa::testing {

// The motivating scenario: a C-seeded chain of S-edges with one query rule.
// `n` is the number of S-facts; constants are a1..a(n+1).
inline std::string runningExampleText(int n) {
    std::string text =
        "@query Q/1.\n"
        "@true_function f/1.\n"
        "R(?x1,?x2), f(?x1) = ?x3, A(?x3), B(?x3) -> Q(?x1).\n"
        "S(?x1,?x2) -> exists ?y . R(?x1,?y).\n"
        "R(?x2,?x1), S(?x2,?x3), R(?x3,?x4) -> ?x1 = ?x4.\n"
        "C(?x) -> A(f(?x)).\n"
        "C(?x) -> U(?x,f(?x)).\n"
        "U(?x1,?x2) -> B(f(?x2)).\n"
        "U(?x1,?x2) -> ?x1 = ?x2.\n"
        "C(a1).\n";
    for (int i = 1; i <= n; ++i) {
        text += "S(a" + std::to_string(i) + ",a" + std::to_string(i + 1) + ").\n";
    }
    return text;
}

inline std::set<std::string> renderedFacts(const Store& store, const Instance& inst) {
    std::set<std::string> out;
    for (const Atom& f : inst.facts()) out.insert(render(store, f));
    return out;
}

inline std::set<std::string> renderedAtoms(const Store& store, const std::vector<Atom>& atoms) {
    std::set<std::string> out;
    for (const Atom& f : atoms) out.insert(render(store, f));
    return out;
}

// Structural program equality modulo variable renaming: each rule is
// canonicalised by numbering variables in order of first occurrence.
inline std::string canonicalRule(const Store& store, const Rule& r) {
    std::unordered_map<TermId, int> renaming;
    std::string key;
    auto term = [&](TermId t, auto&& self) -> void {
        const TermData& td = store.term(t);
        if (td.kind == TermKind::Variable) {
            auto [it, fresh] = renaming.emplace(t, static_cast<int>(renaming.size()));
            key += "?v" + std::to_string(it->second);
        } else if (td.kind == TermKind::App) {
            key += store.fnInfo(td.sym).name;
            key += "(";
            for (TermId a : td.args) {
                self(a, self);
                key += ",";
            }
            key += ")";
        } else {
            key += renderTerm(store, t);
        }
    };
    auto atom = [&](const Atom& a) {
        key += store.predInfo(a.pred).name;
        key += "(";
        for (TermId t : a.args) {
            term(t, term);
            key += ",";
        }
        key += ")";
    };
    atom(r.head);
    key += " <- ";
    for (const Atom& a : r.body) {
        atom(a);
        key += " ";
    }
    return key;
}

inline std::set<std::string> canonicalRules(const Store& store, const Program& p) {
    std::set<std::string> out;
    for (const Rule& r : p.rules) out.insert(canonicalRule(store, r));
    return out;
}

}  // namespace deqa::testing
