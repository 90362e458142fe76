#include "deqa/transform.hpp"

#include <algorithm>
#include <set>

#include "deqa/eq_axioms.hpp"

namespace deqa {

std::vector<Dependency> fol(Store&, const Scenario& s) { return s.deps; }

namespace {

bool isQueryHead(const Dependency& d, const std::vector<PredId>& queryPreds) {
    if (d.head.size() != 1) return false;
    return std::find(queryPreds.begin(), queryPreds.end(), d.head[0].pred) != queryPreds.end();
}

struct Occurrence {
    size_t atom;
    size_t arg;
};

}  // namespace

std::vector<Dependency> singularise(Store& store, const std::vector<Dependency>& deps,
                                    const std::vector<PredId>& queryPreds,
                                    SingularisationStrategy strategy) {
    std::vector<Dependency> out;
    int fresh = 0;
    PredId eq = store.eqPred();
    for (const Dependency& input : deps) {
        Dependency d = input;

        // Query heads are rewritten first: Q(x1..xm) becomes Q(x1'..xm') with
        // xi = xi' appended to the body.
        if (isQueryHead(d, queryPreds)) {
            Atom& head = d.head[0];
            for (TermId& t : head.args) {
                if (store.kind(t) != TermKind::Variable) continue;
                TermId t2 = store.variable(store.variableName(t) + "_s" + std::to_string(fresh++));
                d.body.push_back({eq, {t, t2}});
                t = t2;
            }
        }

        // Interleaved equality atoms count toward atom indices but never
        // qualify; occurrences are tracked per relational atom argument.
        // Constants qualify always; a variable qualifies when it has more
        // than one occurrence across relational body atoms.
        std::unordered_map<TermId, std::vector<Occurrence>> varOcc;
        std::vector<Occurrence> constOcc;
        for (size_t i = 0; i < d.body.size(); ++i) {
            const Atom& a = d.body[i];
            if (store.isEq(a.pred)) continue;
            for (size_t j = 0; j < a.args.size(); ++j) {
                TermId t = a.args[j];
                if (store.kind(t) == TermKind::Constant) {
                    constOcc.push_back({i, j});
                } else if (store.kind(t) == TermKind::Variable) {
                    varOcc[t].push_back({i, j});
                }
            }
        }

        // The rewrites to perform: atom index -> (arg index -> fresh var).
        // Equalities are inserted immediately before the rewritten atom.
        struct Rewrite {
            size_t atom;
            size_t arg;
            TermId freshVar;
            TermId oldTerm;
            bool constant;
        };
        std::vector<Rewrite> rewrites;
        for (const Occurrence& occ : constOcc) {
            TermId c = d.body[occ.atom].args[occ.arg];
            TermId v = store.variable("xc_s" + std::to_string(fresh++));
            rewrites.push_back({occ.atom, occ.arg, v, c, true});
        }
        std::vector<TermId> orderedVars;
        for (size_t i = 0; i < d.body.size(); ++i) {
            const Atom& a = d.body[i];
            if (store.isEq(a.pred)) continue;
            for (size_t j = 0; j < a.args.size(); ++j) {
                TermId t = a.args[j];
                if (store.kind(t) == TermKind::Variable && varOcc[t].size() > 1 &&
                    std::find(orderedVars.begin(), orderedVars.end(), t) == orderedVars.end()) {
                    orderedVars.push_back(t);
                }
            }
        }
        for (TermId v : orderedVars) {
            auto& occs = varOcc[v];
            size_t keep = strategy == SingularisationStrategy::KeepFirst ? 0 : occs.size() - 1;
            std::string base = store.variableName(v);
            for (size_t k = 0; k < occs.size(); ++k) {
                if (k == keep) continue;
                TermId nv = store.variable(base + "_s" + std::to_string(fresh++));
                rewrites.push_back({occs[k].atom, occs[k].arg, nv, v, false});
            }
        }

        // Apply: build the new body atom list with inserted equalities.
        std::vector<Atom> body;
        for (size_t i = 0; i < d.body.size(); ++i) {
            Atom a = d.body[i];
            std::vector<Atom> eqs;
            for (const Rewrite& rw : rewrites) {
                if (rw.atom != i) continue;
                a.args[rw.arg] = rw.freshVar;
                if (rw.constant) {
                    // Constant case: x' = c with the fresh variable first.
                    eqs.push_back({eq, {rw.freshVar, rw.oldTerm}});
                } else {
                    eqs.push_back({eq, {rw.oldTerm, rw.freshVar}});
                }
            }
            body.insert(body.end(), eqs.begin(), eqs.end());
            body.push_back(std::move(a));
        }
        d.body = std::move(body);
        out.push_back(std::move(d));
    }
    return out;
}

Program skolemise(Store& store, const std::vector<Dependency>& deps,
                  const std::vector<PredId>& queryPreds) {
    Program p;
    p.queryPreds = queryPreds;
    int skCounter = 0;
    for (const Dependency& d : deps) {
        // Universally quantified variables free in the head, in order.
        std::vector<TermId> headVars;
        for (const Atom& a : d.head) collectVars(store, a, headVars);
        std::vector<TermId> frontier;
        for (TermId v : headVars) {
            if (std::find(d.existVars.begin(), d.existVars.end(), v) == d.existVars.end())
                frontier.push_back(v);
        }
        Substitution s;
        for (TermId y : d.existVars) {
            bool used = std::find(headVars.begin(), headVars.end(), y) != headVars.end();
            if (!used) continue;
            FnId g = store.fn("sk" + std::to_string(++skCounter),
                              static_cast<uint32_t>(frontier.size()), FnKind::Skolem);
            s.bind(y, store.app(g, frontier));
        }
        for (const Atom& h : d.head) {
            Rule r;
            r.head = applySubst(store, h, s);
            r.body = d.body;
            p.rules.push_back(std::move(r));
        }
    }
    return p;
}

WellFormedness checkWellFormed(Store& store, const Program& p) {
    WellFormedness result;
    for (const Rule& r : p.rules) {
        auto complain = [&](const std::string& msg) {
            result.ok = false;
            result.diagnostics.push_back(msg + ": " + render(store, r));
        };

        bool queryHead = std::find(p.queryPreds.begin(), p.queryPreds.end(), r.head.pred) !=
                         p.queryPreds.end();

        // Split a query rule's body into the well-formed prefix phi and the
        // trailing x = x' conjuncts phi' whose x' occurs in the head.
        std::vector<const Atom*> phi;
        std::vector<const Atom*> phiPrime;
        if (queryHead) {
            std::vector<TermId> headVars;
            collectVars(store, r.head, headVars);
            for (const Atom& a : r.body) phi.push_back(&a);
            while (!phi.empty()) {
                const Atom& a = *phi.back();
                if (!store.isEq(a.pred)) break;
                if (store.kind(a.args[0]) != TermKind::Variable ||
                    store.kind(a.args[1]) != TermKind::Variable)
                    break;
                if (std::find(headVars.begin(), headVars.end(), a.args[1]) == headVars.end()) break;
                phiPrime.push_back(phi.back());
                phi.pop_back();
            }
            for (TermId t : r.head.args) {
                if (store.depth(t) != 0) complain("query head must be of depth zero");
            }
        } else {
            for (const Atom& a : r.body) phi.push_back(&a);
            for (TermId t : r.head.args) {
                if (store.depth(t) > 1) complain("head atom deeper than one");
            }
        }

        // phi must be well-formed.
        std::vector<TermId> relVars;
        for (const Atom* a : phi) {
            if (!store.isEq(a->pred)) collectVars(store, *a, relVars);
        }
        for (const Atom* a : phi) {
            if (store.isEq(a->pred)) {
                for (TermId t : a->args) {
                    if (store.depth(t) > 1) complain("body equality deeper than one");
                }
                std::vector<TermId> vars;
                collectVars(store, *a, vars);
                for (TermId v : vars) {
                    if (std::find(relVars.begin(), relVars.end(), v) == relVars.end())
                        complain("equality variable ?" + store.variableName(v) +
                                 " not grounded by a relational atom");
                }
            } else {
                for (TermId t : a->args) {
                    if (store.depth(t) != 0 || store.kind(t) == TermKind::BaseNull)
                        complain("relational body atom not of depth zero");
                }
            }
        }
        for (const Atom* a : phiPrime) {
            if (std::find(relVars.begin(), relVars.end(), a->args[0]) == relVars.end())
                complain("query equality variable ?" + store.variableName(a->args[0]) +
                         " not grounded by a relational atom");
        }

        // Safety: every rule variable occurs in some body atom.
        std::vector<TermId> bodyVars;
        for (const Atom& a : r.body) collectVars(store, a, bodyVars);
        std::vector<TermId> all;
        collectVars(store, r.head, all);
        for (TermId v : all) {
            if (std::find(bodyVars.begin(), bodyVars.end(), v) == bodyVars.end())
                complain("unsafe rule: head variable ?" + store.variableName(v) +
                         " missing from the body");
        }
    }
    return result;
}

namespace {

void collectBodyConstants(const Store& store, TermId t, std::vector<TermId>& out) {
    const TermData& td = store.term(t);
    if (td.kind == TermKind::Constant) {
        if (std::find(out.begin(), out.end(), t) == out.end()) out.push_back(t);
    } else if (td.kind == TermKind::App) {
        for (TermId a : td.args) collectBodyConstants(store, a, out);
    }
}

TermId replaceConstant(Store& store, TermId t, TermId c, TermId z) {
    const TermData& td = store.term(t);
    if (t == c) return z;
    if (td.kind == TermKind::App) {
        std::vector<TermId> args;
        bool changed = false;
        for (TermId a : td.args) {
            TermId na = replaceConstant(store, a, c, z);
            changed = changed || na != a;
            args.push_back(na);
        }
        if (changed) return store.app(td.sym, args);
    }
    return t;
}

}  // namespace

Program defun(Store& store, const Program& p, bool disableFunctionalReflexivity) {
    Program out;
    out.queryPreds = p.queryPreds;
    out.rules = p.rules;
    PredId eq = store.eqPred();
    int freshVar = 0;

    // Step 1: body constants.
    std::set<TermId> factRuleEmitted;
    for (Rule& r : out.rules) {
        std::vector<TermId> consts;
        for (const Atom& a : r.body)
            for (TermId t : a.args) collectBodyConstants(store, t, consts);
        for (TermId c : consts) {
            const std::string& name = store.constantName(c);
            PredId fc = store.pred("F_" + name, 1);
            TermId z = store.variable("z" + std::to_string(freshVar++));
            for (Atom& a : r.body)
                for (TermId& t : a.args) t = replaceConstant(store, t, c, z);
            r.body.push_back({fc, {z}});
            if (factRuleEmitted.insert(c).second) {
                Rule factRule;
                factRule.head = {fc, {c}};
                out.rules.push_back(std::move(factRule));
            }
        }
    }

    // Step 2: functional terms in bodies. Each distinct term f(s...) within a
    // rule maps to one fresh variable and one F_f atom.
    std::set<FnId> defunctionalised;
    for (Rule& r : out.rules) {
        std::vector<std::pair<TermId, TermId>> replaced;  // app term -> variable
        std::vector<Atom> extra;
        for (Atom& a : r.body) {
            for (TermId& t : a.args) {
                const TermData& td = store.term(t);
                if (td.kind != TermKind::App) continue;
                TermId z = kNoTerm;
                for (const auto& [appT, var] : replaced) {
                    if (appT == t) {
                        z = var;
                        break;
                    }
                }
                if (z == kNoTerm) {
                    z = store.variable("z" + std::to_string(freshVar++));
                    FnId f = td.sym;
                    defunctionalised.insert(f);
                    PredId fp = store.pred("F_" + store.fnInfo(f).name,
                                           static_cast<uint32_t>(td.args.size() + 1));
                    Atom fatom;
                    fatom.pred = fp;
                    fatom.args = td.args;
                    fatom.args.push_back(z);
                    extra.push_back(std::move(fatom));
                    replaced.emplace_back(t, z);
                }
                t = z;
            }
        }
        r.body.insert(r.body.end(), extra.begin(), extra.end());
    }

    // Step 3: for each symbol eliminated in step 2 and each rule with that
    // symbol in the head, a companion rule records the term's value.
    std::vector<Rule> companions;
    for (const Rule& r : out.rules) {
        for (TermId t : r.head.args) {
            const TermData& td = store.term(t);
            if (td.kind != TermKind::App) continue;
            if (!defunctionalised.count(td.sym)) continue;
            PredId fp = store.pred("F_" + store.fnInfo(td.sym).name,
                                   static_cast<uint32_t>(td.args.size() + 1));
            Rule companion;
            companion.head.pred = fp;
            companion.head.args = td.args;
            companion.head.args.push_back(t);
            companion.body = r.body;
            companions.push_back(std::move(companion));
        }
    }
    out.rules.insert(out.rules.end(), companions.begin(), companions.end());

    // Step 4: the domain-guarded value rule for every True function symbol of
    // the input program.
    if (!disableFunctionalReflexivity) {
        std::set<FnId> trueFns;
        auto scan = [&](TermId t, auto&& self) -> void {
            const TermData& td = store.term(t);
            if (td.kind == TermKind::App) {
                if (store.fnInfo(td.sym).kind == FnKind::True) trueFns.insert(td.sym);
                for (TermId a : td.args) self(a, self);
            }
        };
        for (const Rule& r : p.rules) {
            for (TermId t : r.head.args) scan(t, scan);
            for (const Atom& a : r.body)
                for (TermId t : a.args) scan(t, scan);
        }
        PredId dom = domainPred(store);
        for (FnId f : trueFns) {
            uint32_t n = store.fnInfo(f).arity;
            PredId fp = store.pred("F_" + store.fnInfo(f).name, n + 1);
            Rule r;
            std::vector<TermId> xs;
            for (uint32_t i = 1; i <= n; ++i) {
                TermId x = store.variable("x" + std::to_string(i) + "@F" + std::to_string(f));
                TermId xp = store.variable("xp" + std::to_string(i) + "@F" + std::to_string(f));
                r.body.push_back({dom, {x}});
                r.body.push_back({eq, {x, xp}});
                r.body.push_back({dom, {xp}});
                xs.push_back(x);
            }
            r.head.pred = fp;
            r.head.args = xs;
            r.head.args.push_back(store.app(f, xs));
            out.rules.push_back(std::move(r));
        }
    }
    return out;
}

Program desg(Store& store, const Program& p, bool strict) {
    Program out;
    out.queryPreds = p.queryPreds;
    for (const Rule& input : p.rules) {
        Rule r = input;
        bool changed = true;
        while (changed) {
            changed = false;
            for (size_t i = 0; i < r.body.size(); ++i) {
                const Atom& a = r.body[i];
                if (!store.isEq(a.pred)) continue;
                TermId l = a.args[0];
                TermId r2 = a.args[1];
                TermId var = kNoTerm;
                TermId replacement = kNoTerm;
                if (store.kind(l) == TermKind::Variable && store.depth(r2) == 0 &&
                    store.kind(r2) != TermKind::BaseNull && store.kind(r2) != TermKind::FnNull) {
                    var = l;
                    replacement = r2;
                } else if (store.kind(r2) == TermKind::Variable && store.depth(l) == 0 &&
                           store.kind(l) != TermKind::BaseNull && store.kind(l) != TermKind::FnNull) {
                    var = r2;
                    replacement = l;
                }
                if (var == kNoTerm) continue;
                r.body.erase(r.body.begin() + static_cast<long>(i));
                if (var != replacement) {
                    Substitution s;
                    s.bind(var, replacement);
                    r.head = applySubst(store, r.head, s);
                    for (Atom& b : r.body) b = applySubst(store, b, s);
                }
                changed = true;
                break;
            }
        }
        if (strict) {
            for (const Atom& a : r.body) {
                if (!store.isEq(a.pred)) continue;
                if (store.kind(a.args[0]) != TermKind::Variable &&
                    store.kind(a.args[1]) != TermKind::Variable)
                    throw Error("desingularisation left an equality between non-variables: " +
                                render(store, r));
            }
        }
        out.rules.push_back(std::move(r));
    }
    return out;
}

}  // namespace deqa
