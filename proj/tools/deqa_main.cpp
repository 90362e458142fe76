#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "deqa/generator.hpp"
#include "deqa/magic.hpp"
#include "deqa/pipeline.hpp"
#include "deqa/transform.hpp"

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw deqa::Error("cannot open " + path);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

void emit(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw deqa::Error("cannot write " + path);
    out << text;
}

deqa::FixpointLimits limitArgs(uint64_t maxFacts, uint32_t maxDepth, uint64_t maxRounds) {
    deqa::FixpointLimits lim;
    if (maxFacts) lim.maxFacts = maxFacts;
    if (maxDepth) lim.maxDepth = maxDepth;
    if (maxRounds) lim.maxRounds = maxRounds;
    return lim;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"deqa: goal-driven query answering over dependencies with equality"};
    app.require_subcommand(1);

    using namespace deqa;

    // --- transform ---
    auto* cmdTransform = app.add_subcommand("transform", "apply one rewriting stage");
    std::string stage, inPath, outPath;
    cmdTransform->add_option("--stage", stage, "fol|sg|sk|defun|desg")->required();
    cmdTransform->add_option("--in", inPath, "input file")->required();
    cmdTransform->add_option("-o,--out", outPath, "output file (default stdout)");

    // --- eval ---
    auto* cmdEval = app.add_subcommand("eval", "fixpoint with ordinary equality");
    std::string evalProgram, evalData;
    uint64_t evalMaxFacts = 0, evalMaxRounds = 0;
    uint32_t evalMaxDepth = 0;
    cmdEval->add_option("--program", evalProgram)->required();
    cmdEval->add_option("--data", evalData)->required();
    cmdEval->add_option("--max-facts", evalMaxFacts);
    cmdEval->add_option("--max-depth", evalMaxDepth);
    cmdEval->add_option("--max-rounds", evalMaxRounds);

    // --- chase ---
    auto* cmdChase = app.add_subcommand("chase", "chase with true equality");
    std::string chaseScenario, emitModel, emitMu;
    uint64_t chaseMaxFacts = 0, chaseMaxRounds = 0;
    uint32_t chaseMaxDepth = 0;
    bool chaseUna = false;
    cmdChase->add_option("--scenario", chaseScenario)->required();
    cmdChase->add_option("--max-facts", chaseMaxFacts);
    cmdChase->add_option("--max-depth", chaseMaxDepth);
    cmdChase->add_option("--max-rounds", chaseMaxRounds);
    cmdChase->add_option("--emit-model", emitModel);
    cmdChase->add_option("--emit-mu", emitMu);
    cmdChase->add_flag("--una", chaseUna);

    // --- relevance ---
    auto* cmdRelevance = app.add_subcommand("relevance", "relevance analysis");
    std::string relScenario, relAbstraction = "critical", relOut;
    bool relUna = false, relCollapse = false;
    cmdRelevance->add_option("--scenario", relScenario)->required();
    cmdRelevance->add_flag("--una", relUna);
    cmdRelevance->add_flag("--collapse-functions", relCollapse);
    cmdRelevance->add_option("--abstraction", relAbstraction, "critical|sorted");
    cmdRelevance->add_option("-o,--out", relOut);

    // --- magic ---
    auto* cmdMagic = app.add_subcommand("magic", "magic sets transformation");
    std::string magicProgram, magicOut;
    cmdMagic->add_option("--program", magicProgram)->required();
    cmdMagic->add_option("-o,--out", magicOut);

    // --- generate ---
    auto* cmdGenerate = app.add_subcommand("generate", "random benchmark generator");
    GenParams gp;
    std::string genOut;
    cmdGenerate->add_option("--seed", gp.rngSeed);
    cmdGenerate->add_option("--q", gp.seedQFacts);
    cmdGenerate->add_option("--rules", gp.maxNumberRules);
    cmdGenerate->add_option("--rules-per-fact", gp.maxNumberRulesPerFact);
    cmdGenerate->add_option("--rel-atoms", gp.maxNumberRelBodyAtoms);
    cmdGenerate->add_option("--eq-atoms", gp.maxNumberEqBodyAtoms);
    cmdGenerate->add_option("--depth", gp.maxTermDepth);
    cmdGenerate->add_option("--tuples", gp.maxNumberTuples);
    cmdGenerate->add_option("-o,--out", genOut);

    // --- answer ---
    auto* cmdAnswer = app.add_subcommand("answer", "full pipeline on a scenario");
    std::string ansScenario, ansMode = "both", ansJson;
    uint64_t ansMaxFacts = 0, ansMaxRounds = 0;
    uint32_t ansMaxDepth = 0;
    bool ansUna = false, ansNoDfr = false;
    cmdAnswer->add_option("--scenario", ansScenario)->required();
    cmdAnswer->add_option("--mode", ansMode, "full|relevance|magic|both");
    cmdAnswer->add_flag("--una", ansUna);
    cmdAnswer->add_flag("--no-dfr", ansNoDfr,
                        "drop the domain-restricted functional reflexivity rules");
    cmdAnswer->add_option("--max-facts", ansMaxFacts);
    cmdAnswer->add_option("--max-depth", ansMaxDepth);
    cmdAnswer->add_option("--max-rounds", ansMaxRounds);
    cmdAnswer->add_option("--json", ansJson, "write stats as JSON");

    CLI11_PARSE(app, argc, argv);

    try {
        Store store;
        if (*cmdTransform) {
            std::string text = slurp(inPath);
            if (stage == "fol" || stage == "sg" || stage == "sk") {
                Scenario sc = parseScenario(store, text);
                std::vector<Dependency> deps = fol(store, sc);
                if (stage == "fol") {
                    Scenario out = sc;
                    out.deps = deps;
                    emit(outPath, render(store, out));
                    return 0;
                }
                deps = singularise(store, deps, sc.queryPreds);
                if (stage == "sg") {
                    Scenario out = sc;
                    out.deps = deps;
                    emit(outPath, render(store, out));
                    return 0;
                }
                Program p = skolemise(store, deps, sc.queryPreds);
                emit(outPath, render(store, p));
                return 0;
            }
            if (stage == "defun" || stage == "desg") {
                Program p = parseProgram(store, text);
                Program out = stage == "defun" ? defun(store, p) : desg(store, p);
                emit(outPath, render(store, out));
                return 0;
            }
            std::cerr << "unknown stage: " << stage << "\n";
            return 2;
        }
        if (*cmdEval) {
            Program p = parseProgram(store, slurp(evalProgram));
            Scenario data = parseScenario(store, slurp(evalData));
            Instance b(store);
            for (const Atom& f : data.facts) b.insert(f);
            FixpointResult r =
                fixpoint(store, p, b, limitArgs(evalMaxFacts, evalMaxDepth, evalMaxRounds));
            std::cout << render(store, r.instance);
            std::cout << "# status: " << (r.status == RunStatus::Complete ? "complete" : "limit_hit")
                      << "\n";
            return 0;
        }
        if (*cmdChase) {
            Scenario sc = parseScenario(store, slurp(chaseScenario));
            if (chaseUna) sc.una = true;
            ChaseResult r =
                chase(store, sc, limitArgs(chaseMaxFacts, chaseMaxDepth, chaseMaxRounds));
            if (!emitModel.empty()) emit(emitModel, render(store, r.model));
            if (!emitMu.empty()) {
                std::string text;
                for (const auto& [c, rep] : r.mu)
                    text += renderTerm(store, c) + " -> " + renderTerm(store, rep) + "\n";
                emit(emitMu, text);
            }
            std::cout << "# facts: " << r.model.size() << "\n";
            std::cout << "# status: "
                      << (r.status == ChaseStatus::Complete
                              ? "complete"
                              : (r.status == ChaseStatus::LimitHit ? "limit_hit" : "una_violation"))
                      << "\n";
            return r.status == ChaseStatus::UnaViolation ? 3 : 0;
        }
        if (*cmdRelevance) {
            Scenario sc = parseScenario(store, slurp(relScenario));
            std::vector<Dependency> deps = singularise(store, fol(store, sc), sc.queryPreds);
            Program p3 = skolemise(store, deps, sc.queryPreds);
            RelevanceOptions ro;
            ro.unaKnown = relUna || sc.una;
            ro.collapseFunctions = relCollapse;
            ro.abstraction =
                relAbstraction == "sorted" ? AbstractionChoice::Sorted : AbstractionChoice::Critical;
            for (const Atom& f : sc.facts) {
                if (std::find(ro.basePreds.begin(), ro.basePreds.end(), f.pred) ==
                    ro.basePreds.end())
                    ro.basePreds.push_back(f.pred);
            }
            Program r = relevance(store, p3, sc.facts, ro);
            emit(relOut, render(store, r));
            return 0;
        }
        if (*cmdMagic) {
            Program p = parseProgram(store, slurp(magicProgram));
            Program r = magic(store, p);
            emit(magicOut, render(store, r));
            return 0;
        }
        if (*cmdGenerate) {
            Scenario sc = generate(store, gp);
            emit(genOut, render(store, sc));
            return 0;
        }
        if (*cmdAnswer) {
            Scenario sc = parseScenario(store, slurp(ansScenario));
            PipelineOptions po;
            po.mode = ansMode == "full"
                          ? AnswerMode::Full
                          : (ansMode == "relevance"
                                 ? AnswerMode::Relevance
                                 : (ansMode == "magic" ? AnswerMode::Magic : AnswerMode::Both));
            po.una = ansUna;
            po.disableFunctionalReflexivity = ansNoDfr;
            po.limits = limitArgs(ansMaxFacts, ansMaxDepth, ansMaxRounds);
            PipelineResult r = answerPipeline(store, sc, po);
            for (const Atom& a : r.answers) std::cout << render(store, a) << ".\n";
            std::cerr << statsToText(r.stats);
            if (!ansJson.empty()) emit(ansJson, statsToJson(r.stats));
            return r.stats.status == ChaseStatus::Complete ? 0 : 3;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
