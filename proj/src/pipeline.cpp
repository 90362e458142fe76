#include "deqa/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <sstream>

#include "deqa/magic.hpp"
#include "deqa/transform.hpp"

namespace deqa {

bool isAuxiliaryPred(const Store& store, PredId p) {
    if (store.isEq(p)) return true;
    const std::string& n = store.predInfo(p).name;
    return n == "D" || n.rfind("F_", 0) == 0 || n.rfind("m_", 0) == 0 ||
           n.rfind("fnval_", 0) == 0;
}

std::vector<Atom> usefulFacts(const Store& store, const Instance& model) {
    std::vector<Atom> out;
    for (const Atom& f : model.facts()) {
        if (!isAuxiliaryPred(store, f.pred)) out.push_back(f);
    }
    return out;
}

namespace {

double secondsSince(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::vector<PredId> basePredsOf(const Scenario& sc) {
    std::vector<PredId> out;
    for (const Atom& f : sc.facts) {
        if (std::find(out.begin(), out.end(), f.pred) == out.end()) out.push_back(f.pred);
    }
    return out;
}

// Comparison key for deterministic answer output.
bool atomLess(const Store& store, const Atom& a, const Atom& b) {
    if (a.pred != b.pred) return store.predInfo(a.pred).name < store.predInfo(b.pred).name;
    for (size_t i = 0; i < a.args.size(); ++i) {
        const std::string& x = store.constantName(a.args[i]);
        const std::string& y = store.constantName(b.args[i]);
        if (x != y) return x < y;
    }
    return false;
}

// Does any rule body mention the domain predicate?
bool needsDomainRules(const Store& store, const Program& p) {
    for (const Rule& r : p.rules) {
        for (const Atom& a : r.body) {
            if (isDomainPred(store, a.pred)) return true;
        }
    }
    return false;
}

}  // namespace

PipelineResult answerPipeline(Store& store, const Scenario& scenario,
                              const PipelineOptions& opts) {
    PipelineResult result;
    bool una = opts.una || scenario.una;
    auto t0 = std::chrono::steady_clock::now();

    ChaseResult chased;
    if (opts.mode == AnswerMode::Full) {
        std::vector<Dependency> p1 = fol(store, scenario);
        result.stats.transformSeconds = secondsSince(t0);
        auto t1 = std::chrono::steady_clock::now();
        chased = chase(store, p1, scenario.facts, opts.limits, una);
        result.stats.chaseSeconds = secondsSince(t1);
    } else {
        std::vector<Dependency> p1 = fol(store, scenario);
        std::vector<Dependency> p2 = singularise(store, p1, scenario.queryPreds);
        Program p3 = skolemise(store, p2, scenario.queryPreds);
        result.stats.rulesP3 = p3.rules.size();

        Program p4 = p3;
        if (opts.mode == AnswerMode::Relevance || opts.mode == AnswerMode::Both) {
            RelevanceOptions ro;
            ro.unaKnown = una;
            ro.collapseFunctions = opts.collapseFunctions;
            ro.abstraction = opts.abstraction;
            ro.disableFunctionalReflexivity = opts.disableFunctionalReflexivity;
            ro.basePreds = basePredsOf(scenario);
            p4 = relevance(store, p3, scenario.facts, ro);
        }
        result.stats.rulesP4 = p4.rules.size();

        Program p7;
        if (opts.mode == AnswerMode::Relevance) {
            // No magic output means no function symbols in relational body
            // atoms, so the function-removal step is unnecessary. Deeper
            // body equalities stay behind for the chase to evaluate.
            p7 = desg(store, p4, /*strict=*/false);
            result.stats.rulesP5 = p4.rules.size();
            result.stats.rulesP6 = p4.rules.size();
        } else {
            MagicOptions mo;
            mo.disableFunctionalReflexivity = opts.disableFunctionalReflexivity;
            Program p5 = magic(store, p4, mo);
            result.stats.rulesP5 = p5.rules.size();
            Program p6 = defun(store, p5, opts.disableFunctionalReflexivity);
            result.stats.rulesP6 = p6.rules.size();
            p7 = desg(store, p6);
        }
        result.stats.rulesP7 = p7.rules.size();
        result.finalProgram = p7;

        Program chaseProgramRules = p7;
        if (needsDomainRules(store, p7)) {
            AxiomOptions ao;
            ao.extraPreds = basePredsOf(scenario);
            ao.skipMagicDomains = true;
            Program dom = buildDom(store, p7, ao);
            chaseProgramRules.rules.insert(chaseProgramRules.rules.end(), dom.rules.begin(),
                                           dom.rules.end());
        }
        result.stats.transformSeconds = secondsSince(t0);
        auto t1 = std::chrono::steady_clock::now();
        chased = chaseProgram(store, chaseProgramRules, scenario.facts, opts.limits, una);
        result.stats.chaseSeconds = secondsSince(t1);
    }

    result.stats.status = chased.status;
    result.stats.totalFacts = chased.model.size();
    result.stats.usefulFacts = usefulFacts(store, chased.model).size();
    for (PredId q : scenario.queryPreds) {
        auto qa = chaseAnswers(store, chased, q);
        result.answers.insert(result.answers.end(), qa.begin(), qa.end());
    }
    std::sort(result.answers.begin(), result.answers.end(),
              [&](const Atom& a, const Atom& b) { return atomLess(store, a, b); });
    result.chaseResult = std::move(chased);
    return result;
}

std::string statsToJson(const RunStats& s) {
    std::ostringstream out;
    out << "{";
    out << "\"rules_p3\":" << s.rulesP3 << ",";
    out << "\"rules_p4\":" << s.rulesP4 << ",";
    out << "\"rules_p5\":" << s.rulesP5 << ",";
    out << "\"rules_p6\":" << s.rulesP6 << ",";
    out << "\"rules_p7\":" << s.rulesP7 << ",";
    out << "\"total_facts\":" << s.totalFacts << ",";
    out << "\"useful_facts\":" << s.usefulFacts << ",";
    out << "\"transform_seconds\":" << s.transformSeconds << ",";
    out << "\"chase_seconds\":" << s.chaseSeconds << ",";
    out << "\"status\":\""
        << (s.status == ChaseStatus::Complete
                ? "complete"
                : (s.status == ChaseStatus::LimitHit ? "limit_hit" : "una_violation"))
        << "\"";
    out << "}";
    return out.str();
}

std::string statsToText(const RunStats& s) {
    std::ostringstream out;
    out << "rules      |P3|=" << s.rulesP3 << " |P4|=" << s.rulesP4 << " |P5|=" << s.rulesP5
        << " |P6|=" << s.rulesP6 << " |P7|=" << s.rulesP7 << "\n";
    out << "facts      total=" << s.totalFacts << " useful=" << s.usefulFacts << "\n";
    out << "time (s)   transform=" << s.transformSeconds << " chase=" << s.chaseSeconds << "\n";
    out << "status     "
        << (s.status == ChaseStatus::Complete
                ? "complete"
                : (s.status == ChaseStatus::LimitHit ? "limit_hit" : "una_violation"))
        << "\n";
    return out.str();
}

}  // namespace deqa
