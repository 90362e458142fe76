#include "deqa/syntax.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace deqa {

namespace {

struct Token {
    enum Kind { Ident, Var, String, Arrow, Equals, LPar, RPar, Comma, Dot, Slash, At, Eof } kind;
    std::string text;
    int line;
    int col;
};

class Lexer {
public:
    explicit Lexer(std::string_view text) : text_(text) {}

    Token next() {
        skipWs();
        int line = line_, col = col_;
        if (pos_ >= text_.size()) return {Token::Eof, "", line, col};
        char c = text_[pos_];
        if (c == '#') {
            while (pos_ < text_.size() && text_[pos_] != '\n') advance();
            return next();
        }
        if (c == '-' && pos_ + 1 < text_.size() && text_[pos_ + 1] == '>') {
            advance();
            advance();
            return {Token::Arrow, "->", line, col};
        }
        switch (c) {
            case '=': advance(); return {Token::Equals, "=", line, col};
            case '(': advance(); return {Token::LPar, "(", line, col};
            case ')': advance(); return {Token::RPar, ")", line, col};
            case ',': advance(); return {Token::Comma, ",", line, col};
            case '.': advance(); return {Token::Dot, ".", line, col};
            case '/': advance(); return {Token::Slash, "/", line, col};
            case '@': advance(); return {Token::At, "@", line, col};
            default: break;
        }
        if (c == '?') {
            advance();
            std::string name = ident();
            if (name.empty()) throw ParseError("expected variable name after '?'", line, col);
            return {Token::Var, name, line, col};
        }
        if (c == '"') {
            advance();
            std::string out;
            while (pos_ < text_.size() && text_[pos_] != '"') {
                if (text_[pos_] == '\\' && pos_ + 1 < text_.size()) advance();
                out.push_back(text_[pos_]);
                advance();
            }
            if (pos_ >= text_.size()) throw ParseError("unterminated string", line, col);
            advance();
            return {Token::String, out, line, col};
        }
        if (std::isalnum(static_cast<unsigned char>(c)) || c == '_') {
            return {Token::Ident, ident(), line, col};
        }
        throw ParseError(std::string("unexpected character '") + c + "'", line, col);
    }

private:
    void advance() {
        if (text_[pos_] == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        ++pos_;
    }

    void skipWs() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) advance();
    }

    std::string ident() {
        std::string out;
        while (pos_ < text_.size()) {
            char c = text_[pos_];
            if (std::isalnum(static_cast<unsigned char>(c)) || c == '_') {
                out.push_back(c);
                advance();
            } else {
                break;
            }
        }
        return out;
    }

    std::string_view text_;
    size_t pos_ = 0;
    int line_ = 1;
    int col_ = 1;
};

struct RawTerm {
    enum Kind { Const, Var, Fn } kind;
    std::string name;
    std::vector<RawTerm> args;
    int line = 0;
    int col = 0;

    uint16_t depth() const {
        if (kind != Fn) return 0;
        uint16_t d = 0;
        for (const auto& a : args) d = std::max(d, a.depth());
        return static_cast<uint16_t>(d + 1);
    }
};

struct RawAtom {
    bool isEq = false;
    std::string pred;
    std::vector<RawTerm> args;
    int line = 0;
    int col = 0;
};

struct RawStatement {
    bool isDependency = false;
    std::vector<RawAtom> body;
    std::vector<std::string> existVars;
    std::vector<RawAtom> head;  // facts use head[0]
    int line = 0;
    int col = 0;
};

class Parser {
public:
    explicit Parser(std::string_view text) : lexer_(text) { tok_ = lexer_.next(); }

    // declarations
    std::vector<std::pair<std::string, uint32_t>> queryDecls;
    std::vector<std::pair<std::string, uint32_t>> trueFnDecls;
    std::vector<std::pair<std::string, uint32_t>> skolemFnDecls;
    bool una = false;
    std::vector<RawStatement> statements;

    void parseFile() {
        while (tok_.kind != Token::Eof) {
            if (tok_.kind == Token::At) {
                parseDecl();
            } else {
                parseStatement();
            }
        }
    }

private:
    [[noreturn]] void fail(const std::string& msg) { throw ParseError(msg, tok_.line, tok_.col); }

    Token expect(Token::Kind kind, const char* what) {
        if (tok_.kind != kind) fail(std::string("expected ") + what);
        Token t = tok_;
        tok_ = lexer_.next();
        return t;
    }

    bool accept(Token::Kind kind) {
        if (tok_.kind != kind) return false;
        tok_ = lexer_.next();
        return true;
    }

    void parseDecl() {
        expect(Token::At, "'@'");
        Token name = expect(Token::Ident, "declaration name");
        if (name.text == "una") {
            una = true;
            expect(Token::Dot, "'.'");
            return;
        }
        Token sym = expect(Token::Ident, "symbol name");
        expect(Token::Slash, "'/'");
        Token arity = expect(Token::Ident, "arity");
        uint32_t n = 0;
        for (char c : arity.text) {
            if (!std::isdigit(static_cast<unsigned char>(c)))
                throw ParseError("arity must be a number", arity.line, arity.col);
            n = n * 10 + static_cast<uint32_t>(c - '0');
        }
        expect(Token::Dot, "'.'");
        if (name.text == "query") {
            queryDecls.emplace_back(sym.text, n);
        } else if (name.text == "true_function") {
            trueFnDecls.emplace_back(sym.text, n);
        } else if (name.text == "skolem_function") {
            skolemFnDecls.emplace_back(sym.text, n);
        } else {
            throw ParseError("unknown declaration @" + name.text, name.line, name.col);
        }
    }

    RawTerm parseTerm() {
        if (tok_.kind == Token::Var) {
            RawTerm t{RawTerm::Var, tok_.text, {}, tok_.line, tok_.col};
            tok_ = lexer_.next();
            return t;
        }
        if (tok_.kind == Token::String) {
            RawTerm t{RawTerm::Const, tok_.text, {}, tok_.line, tok_.col};
            tok_ = lexer_.next();
            return t;
        }
        Token name = expect(Token::Ident, "term");
        if (tok_.kind == Token::LPar) {
            tok_ = lexer_.next();
            RawTerm t{RawTerm::Fn, name.text, {}, name.line, name.col};
            if (tok_.kind != Token::RPar) {
                t.args.push_back(parseTerm());
                while (accept(Token::Comma)) t.args.push_back(parseTerm());
            }
            expect(Token::RPar, "')'");
            return t;
        }
        return {RawTerm::Const, name.text, {}, name.line, name.col};
    }

    RawAtom parseAtom() {
        int line = tok_.line, col = tok_.col;
        if (tok_.kind == Token::Ident) {
            // Could be a predicate atom or the left side of an equality.
            Token name = tok_;
            tok_ = lexer_.next();
            if (tok_.kind == Token::LPar) {
                tok_ = lexer_.next();
                RawAtom a;
                a.pred = name.text;
                a.line = line;
                a.col = col;
                if (tok_.kind != Token::RPar) {
                    a.args.push_back(parseTerm());
                    while (accept(Token::Comma)) a.args.push_back(parseTerm());
                }
                expect(Token::RPar, "')'");
                if (tok_.kind == Token::Equals) {
                    // The "atom" was a functional term on the left of '='.
                    RawTerm lhs{RawTerm::Fn, a.pred, a.args, line, col};
                    tok_ = lexer_.next();
                    RawAtom eq;
                    eq.isEq = true;
                    eq.args = {lhs, parseTerm()};
                    eq.line = line;
                    eq.col = col;
                    return eq;
                }
                return a;
            }
            RawTerm lhs{RawTerm::Const, name.text, {}, line, col};
            expect(Token::Equals, "'=' or '('");
            RawAtom eq;
            eq.isEq = true;
            eq.args = {lhs, parseTerm()};
            eq.line = line;
            eq.col = col;
            return eq;
        }
        RawTerm lhs = parseTerm();
        expect(Token::Equals, "'='");
        RawAtom eq;
        eq.isEq = true;
        eq.args = {lhs, parseTerm()};
        eq.line = line;
        eq.col = col;
        return eq;
    }

    void parseStatement() {
        RawStatement st;
        st.line = tok_.line;
        st.col = tok_.col;
        if (tok_.kind != Token::Arrow) {
            st.body.push_back(parseAtom());
            while (accept(Token::Comma)) st.body.push_back(parseAtom());
        }
        if (accept(Token::Arrow)) {
            st.isDependency = true;
            if (tok_.kind == Token::Ident && tok_.text == "exists") {
                tok_ = lexer_.next();
                st.existVars.push_back(expect(Token::Var, "variable").text);
                while (accept(Token::Comma)) st.existVars.push_back(expect(Token::Var, "variable").text);
                expect(Token::Dot, "'.' after exists variables");
            }
            st.head.push_back(parseAtom());
            while (accept(Token::Comma)) st.head.push_back(parseAtom());
        } else {
            if (st.body.size() != 1)
                throw ParseError("a fact must be a single atom", st.line, st.col);
            st.head.push_back(st.body[0]);
            st.body.clear();
        }
        expect(Token::Dot, "'.'");
        statements.push_back(std::move(st));
    }

    Lexer lexer_;
    Token tok_;
};

// Converts raw syntax into interned structures, with per-statement variable
// scoping (standardising apart) and declaration-driven function kinds.
class Builder {
public:
    Builder(Store& store, const Parser& parser) : store_(store), parser_(parser) {
        for (const auto& [name, arity] : parser.trueFnDecls) store_.fn(name, arity, FnKind::True);
        for (const auto& [name, arity] : parser.skolemFnDecls) store_.fn(name, arity, FnKind::Skolem);
        for (const auto& [name, arity] : parser.queryDecls) predArity_.emplace(name, arity);
    }

    TermId buildTerm(const RawTerm& t, int depIndex) {
        switch (t.kind) {
            case RawTerm::Const:
                return store_.constant(t.name);
            case RawTerm::Var:
                return store_.variable(scopedName(t.name, depIndex));
            case RawTerm::Fn: {
                FnId f;
                if (auto existing = store_.findFn(t.name, static_cast<uint32_t>(t.args.size()))) {
                    f = *existing;
                } else {
                    f = store_.fn(t.name, static_cast<uint32_t>(t.args.size()), FnKind::True);
                }
                std::vector<TermId> args;
                args.reserve(t.args.size());
                for (const auto& a : t.args) args.push_back(buildTerm(a, depIndex));
                return store_.app(f, args);
            }
        }
        throw Error("unreachable");
    }

    Atom buildAtom(const RawAtom& a, int depIndex) {
        Atom out;
        if (a.isEq) {
            out.pred = store_.eqPred();
        } else {
            auto [it, fresh] = predArity_.emplace(a.pred, static_cast<uint32_t>(a.args.size()));
            if (!fresh && it->second != a.args.size())
                throw ParseError("arity conflict for predicate " + a.pred, a.line, a.col);
            out.pred = store_.pred(a.pred, static_cast<uint32_t>(a.args.size()));
        }
        for (const auto& t : a.args) out.args.push_back(buildTerm(t, depIndex));
        return out;
    }

private:
    std::string scopedName(const std::string& name, int depIndex) {
        if (depIndex < 0) return name;
        return name + "@" + std::to_string(depIndex);
    }

    Store& store_;
    const Parser& parser_;
    std::unordered_map<std::string, uint32_t> predArity_;
};

void checkDependencyShape(Store& store, const RawStatement& st, const Dependency& d) {
    for (const Atom& a : d.body) {
        if (store.isEq(a.pred)) {
            for (TermId t : a.args) {
                if (store.depth(t) > 1)
                    throw ParseError("equality atom of depth greater than one", st.line, st.col);
            }
        } else {
            for (TermId t : a.args) {
                if (store.kind(t) == TermKind::App)
                    throw ParseError("relational body atom contains a function symbol", st.line,
                                     st.col);
            }
        }
    }
    for (const Atom& a : d.head) {
        for (TermId t : a.args) {
            if (store.depth(t) > 1)
                throw ParseError("head atom of depth greater than one", st.line, st.col);
        }
    }
    // Safety: every universally quantified variable occurs in a relational body atom.
    std::vector<TermId> bodyVars;
    std::vector<TermId> relVars;
    for (const Atom& a : d.body) {
        collectVars(store, a, bodyVars);
        if (!store.isEq(a.pred)) collectVars(store, a, relVars);
    }
    std::vector<TermId> all = bodyVars;
    for (const Atom& a : d.head) collectVars(store, a, all);
    for (TermId v : all) {
        if (std::find(d.existVars.begin(), d.existVars.end(), v) != d.existVars.end()) continue;
        if (std::find(relVars.begin(), relVars.end(), v) == relVars.end())
            throw ParseError("unsafe dependency: variable ?" + store.variableName(v) +
                                 " does not occur in a relational body atom",
                             st.line, st.col);
    }
}

}  // namespace

Scenario parseScenario(Store& store, std::string_view text) {
    Parser parser(text);
    parser.parseFile();
    Builder builder(store, parser);

    Scenario sc;
    sc.store = &store;
    sc.una = parser.una;
    for (const auto& [name, arity] : parser.queryDecls) sc.queryPreds.push_back(store.pred(name, arity));
    for (const auto& [name, arity] : parser.trueFnDecls) sc.trueFns.push_back(*store.findFn(name, arity));

    int depIndex = 0;
    for (const auto& st : parser.statements) {
        if (st.isDependency) {
            Dependency d;
            for (const auto& a : st.body) d.body.push_back(builder.buildAtom(a, depIndex));
            for (const auto& v : st.existVars)
                d.existVars.push_back(store.variable(v + "@" + std::to_string(depIndex)));
            for (const auto& a : st.head) d.head.push_back(builder.buildAtom(a, depIndex));
            checkDependencyShape(store, st, d);
            sc.deps.push_back(std::move(d));
            ++depIndex;
        } else {
            Atom fact = builder.buildAtom(st.head[0], -1);
            if (store.isEq(fact.pred))
                throw ParseError("base fact uses the equality predicate", st.line, st.col);
            for (TermId t : fact.args) {
                if (store.kind(t) == TermKind::App)
                    throw ParseError("base fact contains a function symbol", st.line, st.col);
                if (store.kind(t) == TermKind::Variable)
                    throw ParseError("base fact contains a variable", st.line, st.col);
            }
            sc.facts.push_back(std::move(fact));
        }
    }
    for (PredId q : sc.queryPreds) {
        for (const Dependency& d : sc.deps) {
            for (const Atom& a : d.body) {
                if (a.pred == q)
                    throw Error("query predicate " + store.predInfo(q).name +
                                " occurs in a dependency body");
            }
        }
    }
    return sc;
}

Program parseProgram(Store& store, std::string_view text) {
    Parser parser(text);
    parser.parseFile();
    Builder builder(store, parser);

    Program p;
    for (const auto& [name, arity] : parser.queryDecls) p.queryPreds.push_back(store.pred(name, arity));

    int depIndex = 0;
    for (const auto& st : parser.statements) {
        if (!st.isDependency)
            throw ParseError("expected a rule, found a fact", st.line, st.col);
        if (!st.existVars.empty())
            throw ParseError("rules cannot use existential quantification", st.line, st.col);
        if (st.head.size() != 1)
            throw ParseError("rules must have exactly one head atom", st.line, st.col);
        Rule r;
        for (const auto& a : st.body) r.body.push_back(builder.buildAtom(a, depIndex));
        r.head = builder.buildAtom(st.head[0], depIndex);
        p.rules.push_back(std::move(r));
        ++depIndex;
    }
    return p;
}

namespace {

bool plainIdent(const std::string& s) {
    if (s.empty()) return false;
    for (char c : s) {
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') return false;
    }
    return true;
}

void renderTermInto(const Store& store, TermId t, std::string& out) {
    const TermData& td = store.term(t);
    switch (td.kind) {
        case TermKind::Constant: {
            const std::string& name = store.constantName(t);
            if (plainIdent(name)) {
                out += name;
            } else {
                out.push_back('"');
                out += name;
                out.push_back('"');
            }
            break;
        }
        case TermKind::Variable: {
            std::string name = store.variableName(t);
            // Strip the standardising scope suffix for readability.
            size_t at = name.find('@');
            if (at != std::string::npos) name = name.substr(0, at);
            out.push_back('?');
            out += name;
            break;
        }
        case TermKind::BaseNull:
            out += "_:n" + std::to_string(td.sym);
            break;
        case TermKind::FnNull: {
            const TermData& inner = store.term(td.sym);
            out += "_:fn(" + store.fnInfo(inner.sym).name;
            for (TermId a : inner.args) {
                out.push_back(',');
                renderTermInto(store, a, out);
            }
            out.push_back(')');
            break;
        }
        case TermKind::App: {
            out += store.fnInfo(td.sym).name;
            out.push_back('(');
            for (size_t i = 0; i < td.args.size(); ++i) {
                if (i) out.push_back(',');
                renderTermInto(store, td.args[i], out);
            }
            out.push_back(')');
            break;
        }
    }
}

void renderAtomInto(const Store& store, const Atom& a, std::string& out) {
    if (store.isEq(a.pred)) {
        renderTermInto(store, a.args[0], out);
        out += " = ";
        renderTermInto(store, a.args[1], out);
        return;
    }
    out += store.predInfo(a.pred).name;
    out.push_back('(');
    for (size_t i = 0; i < a.args.size(); ++i) {
        if (i) out.push_back(',');
        renderTermInto(store, a.args[i], out);
    }
    out.push_back(')');
}

void renderConjInto(const Store& store, const std::vector<Atom>& atoms, std::string& out) {
    for (size_t i = 0; i < atoms.size(); ++i) {
        if (i) out += ", ";
        renderAtomInto(store, atoms[i], out);
    }
}

// Function symbols referenced anywhere in a term.
void collectFns(const Store& store, TermId t, std::vector<FnId>& out) {
    const TermData& td = store.term(t);
    if (td.kind == TermKind::App) {
        if (std::find(out.begin(), out.end(), td.sym) == out.end()) out.push_back(td.sym);
        for (TermId a : td.args) collectFns(store, a, out);
    }
}

void renderFnDecls(const Store& store, const std::vector<FnId>& fns, std::string& out) {
    for (FnId f : fns) {
        const FunctionSymbol& info = store.fnInfo(f);
        out += (info.kind == FnKind::True ? "@true_function " : "@skolem_function ") + info.name +
               "/" + std::to_string(info.arity) + ".\n";
    }
}

}  // namespace

std::string renderTerm(const Store& store, TermId t) {
    std::string out;
    renderTermInto(store, t, out);
    return out;
}

std::string render(const Store& store, const Atom& a) {
    std::string out;
    renderAtomInto(store, a, out);
    return out;
}

std::string render(const Store& store, const Rule& r) {
    std::string out;
    renderConjInto(store, r.body, out);
    if (!r.body.empty()) out += " ";
    out += "-> ";
    renderAtomInto(store, r.head, out);
    out.push_back('.');
    return out;
}

std::string render(const Store& store, const Dependency& d) {
    std::string out;
    renderConjInto(store, d.body, out);
    if (!d.body.empty()) out += " ";
    out += "-> ";
    if (!d.existVars.empty()) {
        out += "exists ";
        for (size_t i = 0; i < d.existVars.size(); ++i) {
            if (i) out += ", ";
            renderTermInto(store, d.existVars[i], out);
        }
        out += " . ";
    }
    renderConjInto(store, d.head, out);
    out.push_back('.');
    return out;
}

std::string render(const Store& store, const Scenario& s) {
    std::string out;
    for (PredId q : s.queryPreds) {
        out += "@query " + store.predInfo(q).name + "/" + std::to_string(store.predInfo(q).arity) +
               ".\n";
    }
    std::vector<FnId> fns;
    for (const Dependency& d : s.deps) {
        for (const Atom& a : d.body)
            for (TermId t : a.args) collectFns(store, t, fns);
        for (const Atom& a : d.head)
            for (TermId t : a.args) collectFns(store, t, fns);
    }
    for (FnId f : s.trueFns) {
        if (std::find(fns.begin(), fns.end(), f) == fns.end()) fns.push_back(f);
    }
    renderFnDecls(store, fns, out);
    if (s.una) out += "@una.\n";
    for (const Dependency& d : s.deps) {
        out += render(store, d);
        out.push_back('\n');
    }
    for (const Atom& f : s.facts) {
        out += render(store, f);
        out += ".\n";
    }
    return out;
}

std::string render(const Store& store, const Program& p) {
    std::string out;
    for (PredId q : p.queryPreds) {
        out += "@query " + store.predInfo(q).name + "/" + std::to_string(store.predInfo(q).arity) +
               ".\n";
    }
    std::vector<FnId> fns;
    for (const Rule& r : p.rules) {
        for (const Atom& a : r.body)
            for (TermId t : a.args) collectFns(store, t, fns);
        for (TermId t : r.head.args) collectFns(store, t, fns);
    }
    renderFnDecls(store, fns, out);
    for (const Rule& r : p.rules) {
        out += render(store, r);
        out.push_back('\n');
    }
    return out;
}

std::string render(const Store& store, const Instance& i) {
    std::string out;
    for (const Atom& f : i.facts()) {
        out += render(store, f);
        out += ".\n";
    }
    return out;
}

}  // namespace deqa
