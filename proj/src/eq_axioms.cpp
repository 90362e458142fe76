#include "deqa/eq_axioms.hpp"

#include <algorithm>
#include <set>

namespace deqa {

bool isMagicPred(const Store& store, PredId p) {
    const std::string& n = store.predInfo(p).name;
    return n.rfind("m_", 0) == 0;
}

bool isFnPred(const Store& store, PredId p) {
    const std::string& n = store.predInfo(p).name;
    return n.rfind("F_", 0) == 0;
}

bool isDomainPred(const Store& store, PredId p) { return store.predInfo(p).name == "D"; }

PredId domainPred(Store& store) { return store.pred("D", 1); }

namespace {

void collectConstants(const Store& store, TermId t, std::set<TermId>& out) {
    const TermData& td = store.term(t);
    if (td.kind == TermKind::Constant) {
        out.insert(t);
    } else if (td.kind == TermKind::App) {
        for (TermId a : td.args) collectConstants(store, a, out);
    }
}

void collectFnsIn(const Store& store, TermId t, std::set<FnId>& out) {
    const TermData& td = store.term(t);
    if (td.kind == TermKind::App) {
        out.insert(td.sym);
        for (TermId a : td.args) collectFnsIn(store, a, out);
    }
}

struct ProgramSignature {
    std::vector<TermId> constants;       // sorted by id for determinism
    std::vector<PredId> preds;           // relational, non-reserved
    std::vector<FnId> trueFns;
};

ProgramSignature signatureOf(Store& store, const Program& p, const AxiomOptions& opts) {
    std::set<TermId> consts;
    std::set<PredId> preds;
    std::set<FnId> fns;
    auto scanAtom = [&](const Atom& a) {
        if (!store.isEq(a.pred)) preds.insert(a.pred);
        for (TermId t : a.args) {
            collectConstants(store, t, consts);
            collectFnsIn(store, t, fns);
        }
    };
    for (const Rule& r : p.rules) {
        scanAtom(r.head);
        for (const Atom& a : r.body) scanAtom(a);
    }
    for (PredId extra : opts.extraPreds) preds.insert(extra);

    ProgramSignature sig;
    for (PredId q : p.queryPreds) preds.erase(q);
    preds.erase(store.eqPred());
    for (PredId pr : preds) {
        if (isDomainPred(store, pr)) continue;
        if (opts.skipMagicDomains && isMagicPred(store, pr)) continue;
        sig.preds.push_back(pr);
    }
    sig.constants.assign(consts.begin(), consts.end());
    for (FnId f : fns) {
        if (store.fnInfo(f).kind == FnKind::True) sig.trueFns.push_back(f);
    }
    return sig;
}

std::vector<TermId> freshVars(Store& store, const std::string& prefix, size_t n) {
    std::vector<TermId> vars;
    for (size_t i = 1; i <= n; ++i) vars.push_back(store.variable(prefix + std::to_string(i)));
    return vars;
}

void addDomainRules(Store& store, const ProgramSignature& sig, Program& out) {
    PredId dom = domainPred(store);
    for (TermId c : sig.constants) out.rules.push_back({{dom, {c}}, {}});
    for (PredId p : sig.preds) {
        uint32_t arity = store.predInfo(p).arity;
        if (arity == 0) continue;
        std::vector<TermId> vars = freshVars(store, "x@dom", arity);
        // For the F_f predicates introduced by defun, only the argument
        // positions enter the domain; the value position would otherwise
        // feed the D-guarded rules forever.
        uint32_t positions = isFnPred(store, p) && arity > 0 ? arity - 1 : arity;
        for (uint32_t i = 0; i < positions; ++i) {
            out.rules.push_back({{dom, {vars[i]}}, {{p, vars}}});
        }
    }
}

void addRfl(Store& store, Program& out) {
    PredId dom = domainPred(store);
    TermId x = store.variable("x@rfl");
    out.rules.push_back({{store.eqPred(), {x, x}}, {{dom, {x}}}});
}

void addSt(Store& store, Program& out) {
    PredId eq = store.eqPred();
    TermId x1 = store.variable("x1@st");
    TermId x2 = store.variable("x2@st");
    TermId x3 = store.variable("x3@st");
    out.rules.push_back({{eq, {x2, x1}}, {{eq, {x1, x2}}}});
    out.rules.push_back({{eq, {x1, x3}}, {{eq, {x1, x2}}, {eq, {x2, x3}}}});
}

void addFr(Store& store, const ProgramSignature& sig, bool domainGuarded, Program& out) {
    PredId eq = store.eqPred();
    PredId dom = domainPred(store);
    for (FnId f : sig.trueFns) {
        uint32_t n = store.fnInfo(f).arity;
        std::vector<TermId> xs = freshVars(store, "x@fr", n);
        std::vector<TermId> xps = freshVars(store, "xp@fr", n);
        Rule r;
        for (uint32_t i = 0; i < n; ++i) {
            if (domainGuarded) r.body.push_back({dom, {xs[i]}});
            r.body.push_back({eq, {xs[i], xps[i]}});
            if (domainGuarded) r.body.push_back({dom, {xps[i]}});
        }
        r.head = {eq, {store.app(f, xs), store.app(f, xps)}};
        out.rules.push_back(std::move(r));
    }
}

void addCongruence(Store& store, const ProgramSignature& sig, const Program& p, Program& out) {
    PredId eq = store.eqPred();
    // Congruence covers every non-equality predicate, including the query
    // predicates (only domain rules exclude them).
    std::vector<PredId> preds = sig.preds;
    for (PredId q : p.queryPreds) {
        if (std::find(preds.begin(), preds.end(), q) == preds.end()) preds.push_back(q);
    }
    for (PredId pr : preds) {
        uint32_t arity = store.predInfo(pr).arity;
        if (arity == 0) continue;
        std::vector<TermId> vars = freshVars(store, "x@cg", arity);
        TermId xp = store.variable("xp@cg");
        for (uint32_t i = 0; i < arity; ++i) {
            Rule r;
            r.body.push_back({pr, vars});
            r.body.push_back({eq, {vars[i], xp}});
            std::vector<TermId> headArgs = vars;
            headArgs[i] = xp;
            r.head = {pr, headArgs};
            out.rules.push_back(std::move(r));
        }
    }
}

}  // namespace

Program buildDom(Store& store, const Program& p, const AxiomOptions& opts) {
    Program out;
    addDomainRules(store, signatureOf(store, p, opts), out);
    return out;
}

Program buildEq(Store& store, const Program& p, const AxiomOptions& opts) {
    ProgramSignature sig = signatureOf(store, p, opts);
    Program out;
    addDomainRules(store, sig, out);
    addRfl(store, out);
    addSt(store, out);
    if (!opts.disableFunctionalReflexivity) addFr(store, sig, /*domainGuarded=*/false, out);
    addCongruence(store, sig, p, out);
    return out;
}

Program buildSg(Store& store, const Program& p, const AxiomOptions& opts) {
    ProgramSignature sig = signatureOf(store, p, opts);
    Program out;
    addDomainRules(store, sig, out);
    addRfl(store, out);
    addSt(store, out);
    if (!opts.disableFunctionalReflexivity) addFr(store, sig, /*domainGuarded=*/true, out);
    return out;
}

}  // namespace deqa
