#include "deqa/core.hpp"

#include <algorithm>
#include <mutex>

namespace deqa {

namespace {

std::string keyOf(std::string_view name, uint32_t arity) {
    std::string k(name);
    k.push_back('/');
    k += std::to_string(arity);
    return k;
}

}  // namespace

Store::Store() { eqPred_ = pred("=", 2); }

TermId Store::intern(TermData&& data) {
    terms_.push_back(std::move(data));
    return static_cast<TermId>(terms_.size() - 1);
}

TermId Store::constant(std::string_view name) {
    std::unique_lock lock(mutex_);
    auto it = constants_.find(std::string(name));
    if (it != constants_.end()) return it->second;
    names_.emplace_back(name);
    TermId id = intern({TermKind::Constant, static_cast<uint32_t>(names_.size() - 1), {}, 0, true});
    constants_.emplace(std::string(name), id);
    return id;
}

TermId Store::variable(std::string_view name) {
    std::unique_lock lock(mutex_);
    auto it = variables_.find(std::string(name));
    if (it != variables_.end()) return it->second;
    names_.emplace_back(name);
    TermId id = intern({TermKind::Variable, static_cast<uint32_t>(names_.size() - 1), {}, 0, false});
    variables_.emplace(std::string(name), id);
    return id;
}

TermId Store::baseNull(uint32_t index) {
    std::unique_lock lock(mutex_);
    auto it = baseNulls_.find(index);
    if (it != baseNulls_.end()) return it->second;
    TermId id = intern({TermKind::BaseNull, index, {}, 0, true});
    baseNulls_.emplace(index, id);
    return id;
}

TermId Store::app(FnId fn, const std::vector<TermId>& args) {
    std::unique_lock lock(mutex_);
    if (fns_[fn].arity != args.size())
        throw Error("arity mismatch for function " + fns_[fn].name);
    uint64_t h = fn;
    for (TermId a : args) h = h * 1000003u + a;
    auto& bucket = appBuckets_[h];
    for (TermId cand : bucket) {
        if (terms_[cand].sym == fn && terms_[cand].args == args) return cand;
    }
    uint16_t d = 0;
    bool ground = true;
    for (TermId a : args) {
        d = std::max(d, terms_[a].depth);
        ground = ground && terms_[a].ground;
    }
    TermId id = intern({TermKind::App, fn, args, static_cast<uint16_t>(d + 1), ground});
    bucket.push_back(id);
    return id;
}

TermId Store::fnNull(TermId groundApp) {
    std::unique_lock lock(mutex_);
    const TermData& inner = terms_[groundApp];
    if (inner.kind != TermKind::App || !inner.ground)
        throw Error("fnNull requires a ground functional term");
    auto it = fnNulls_.find(groundApp);
    if (it != fnNulls_.end()) return it->second;
    TermId id = intern({TermKind::FnNull, groundApp, {}, inner.depth, true});
    fnNulls_.emplace(groundApp, id);
    return id;
}

const std::string& Store::constantName(TermId t) const {
    std::shared_lock lock(mutex_);
    return names_[terms_[t].sym];
}

const std::string& Store::variableName(TermId t) const {
    std::shared_lock lock(mutex_);
    return names_[terms_[t].sym];
}

FnId Store::fn(std::string_view name, uint32_t arity, FnKind kind) {
    std::unique_lock lock(mutex_);
    std::string key = keyOf(name, arity);
    auto it = fnIndex_.find(key);
    if (it != fnIndex_.end()) {
        if (fns_[it->second].kind != kind)
            throw Error("function symbol " + key + " redeclared with a different kind");
        return it->second;
    }
    fns_.push_back({std::string(name), arity, kind});
    FnId id = static_cast<FnId>(fns_.size() - 1);
    fnIndex_.emplace(std::move(key), id);
    return id;
}

std::optional<FnId> Store::findFn(std::string_view name, uint32_t arity) const {
    std::shared_lock lock(mutex_);
    auto it = fnIndex_.find(keyOf(name, arity));
    if (it == fnIndex_.end()) return std::nullopt;
    return it->second;
}

PredId Store::pred(std::string_view name, uint32_t arity) {
    std::unique_lock lock(mutex_);
    std::string key = keyOf(name, arity);
    auto it = predIndex_.find(key);
    if (it != predIndex_.end()) return it->second;
    preds_.push_back({std::string(name), arity});
    PredId id = static_cast<PredId>(preds_.size() - 1);
    predIndex_.emplace(std::move(key), id);
    return id;
}

std::optional<PredId> Store::findPred(std::string_view name, uint32_t arity) const {
    std::shared_lock lock(mutex_);
    auto it = predIndex_.find(keyOf(name, arity));
    if (it == predIndex_.end()) return std::nullopt;
    return it->second;
}

int Store::compareChaseTerms(TermId a, TermId b) const {
    if (a == b) return 0;
    const TermData& ta = terms_[a];
    const TermData& tb = terms_[b];
    auto rank = [](const TermData& t) -> int {
        switch (t.kind) {
            case TermKind::Constant: return 0;
            case TermKind::BaseNull: return 1;
            case TermKind::FnNull: return 2;
            default: throw Error("compareChaseTerms: not a chase term");
        }
    };
    int ra = rank(ta);
    int rb = rank(tb);
    if (ra != rb) return ra < rb ? -1 : 1;
    switch (ta.kind) {
        case TermKind::Constant: {
            std::shared_lock lock(mutex_);
            const std::string& na = names_[ta.sym];
            const std::string& nb = names_[tb.sym];
            return na < nb ? -1 : (na == nb ? 0 : 1);
        }
        case TermKind::BaseNull:
            return ta.sym < tb.sym ? -1 : 1;
        case TermKind::FnNull: {
            const TermData& ia = terms_[ta.sym];
            const TermData& ib = terms_[tb.sym];
            const std::string& na = fns_[ia.sym].name;
            const std::string& nb = fns_[ib.sym].name;
            if (na != nb) return na < nb ? -1 : 1;
            if (ia.args.size() != ib.args.size()) return ia.args.size() < ib.args.size() ? -1 : 1;
            for (size_t i = 0; i < ia.args.size(); ++i) {
                int c = compareChaseTerms(ia.args[i], ib.args[i]);
                if (c != 0) return c;
            }
            return 0;
        }
        default:
            throw Error("compareChaseTerms: not a chase term");
    }
}

bool Instance::insert(const Atom& fact) {
    auto [it, fresh] = dedup_.emplace(fact, static_cast<uint32_t>(all_.size()));
    if (!fresh) return false;
    all_.push_back(fact);
    byPred_[fact.pred].push_back(it->second);
    return true;
}

bool Instance::contains(const Atom& fact) const { return dedup_.count(fact) > 0; }

const std::vector<uint32_t>& Instance::factsOf(PredId p) const {
    static const std::vector<uint32_t> kEmpty;
    auto it = byPred_.find(p);
    return it == byPred_.end() ? kEmpty : it->second;
}

const std::vector<uint32_t>& Instance::postings(PredId p, uint32_t pos, TermId t) const {
    static const std::vector<uint32_t> kEmpty;
    uint64_t key = (static_cast<uint64_t>(p) << 16) | pos;
    auto& slot = index_[key];
    auto& upTo = indexedUpTo_[key];
    const auto& preds = factsOf(p);
    while (upTo < preds.size()) {
        uint32_t fi = preds[upTo++];
        slot[all_[fi].args[pos]].push_back(fi);
    }
    auto it = slot.find(t);
    return it == slot.end() ? kEmpty : it->second;
}

std::vector<PredId> Instance::predicates() const {
    std::vector<PredId> out;
    for (const auto& [p, v] : byPred_) {
        if (!v.empty()) out.push_back(p);
    }
    std::sort(out.begin(), out.end());
    return out;
}

TermId applySubst(Store& store, TermId t, const Substitution& s) {
    const TermData& td = store.term(t);
    switch (td.kind) {
        case TermKind::Variable: {
            TermId v = s.lookup(t);
            return v == kNoTerm ? t : v;
        }
        case TermKind::App: {
            std::vector<TermId> args;
            args.reserve(td.args.size());
            bool changed = false;
            for (TermId a : td.args) {
                TermId na = applySubst(store, a, s);
                changed = changed || na != a;
                args.push_back(na);
            }
            return changed ? store.app(td.sym, args) : t;
        }
        default:
            return t;
    }
}

Atom applySubst(Store& store, const Atom& a, const Substitution& s) {
    Atom out;
    out.pred = a.pred;
    out.args.reserve(a.args.size());
    for (TermId t : a.args) out.args.push_back(applySubst(store, t, s));
    return out;
}

void collectVars(const Store& store, TermId t, std::vector<TermId>& out) {
    const TermData& td = store.term(t);
    if (td.kind == TermKind::Variable) {
        if (std::find(out.begin(), out.end(), t) == out.end()) out.push_back(t);
    } else if (td.kind == TermKind::App) {
        for (TermId a : td.args) collectVars(store, a, out);
    }
}

void collectVars(const Store& store, const Atom& a, std::vector<TermId>& out) {
    for (TermId t : a.args) collectVars(store, t, out);
}

namespace {

bool matchTerm(Store& store, TermId pattern, TermId value, Substitution& s) {
    const TermData& pd = store.term(pattern);
    switch (pd.kind) {
        case TermKind::Variable: {
            TermId bound = s.lookup(pattern);
            if (bound != kNoTerm) return bound == value;
            s.bind(pattern, value);
            return true;
        }
        case TermKind::App: {
            const TermData& vd = store.term(value);
            if (vd.kind != TermKind::App || vd.sym != pd.sym) return false;
            for (size_t i = 0; i < pd.args.size(); ++i) {
                if (!matchTerm(store, pd.args[i], vd.args[i], s)) return false;
            }
            return true;
        }
        default:
            return pattern == value;
    }
}

}  // namespace

std::optional<Substitution> matchAtom(Store& store, const Atom& pattern, const Atom& fact,
                                      const Substitution& partial) {
    if (pattern.pred != fact.pred || pattern.args.size() != fact.args.size()) return std::nullopt;
    Substitution s = partial;
    for (size_t i = 0; i < pattern.args.size(); ++i) {
        if (!matchTerm(store, pattern.args[i], fact.args[i], s)) return std::nullopt;
    }
    return s;
}

namespace {

bool subsumeBody(Store& store, const std::vector<Atom>& body, size_t i, const std::vector<Atom>& target,
                 Substitution& s) {
    if (i == body.size()) return true;
    size_t mark = s.size();
    for (const Atom& cand : target) {
        if (cand.pred != body[i].pred) continue;
        Substitution trial = s;
        bool ok = true;
        for (size_t k = 0; k < cand.args.size() && ok; ++k) {
            ok = matchTerm(store, body[i].args[k], cand.args[k], trial);
        }
        if (ok) {
            s = trial;
            if (subsumeBody(store, body, i + 1, target, s)) return true;
            s.truncate(mark);
        }
    }
    return false;
}

}  // namespace

bool subsumes(Store& store, const Rule& r1, const Rule& r2) {
    if (r1.head.pred != r2.head.pred) return false;
    Substitution s;
    for (size_t i = 0; i < r1.head.args.size(); ++i) {
        if (!matchTerm(store, r1.head.args[i], r2.head.args[i], s)) return false;
    }
    return subsumeBody(store, r1.body, 0, r2.body, s);
}

}  // namespace deqa
