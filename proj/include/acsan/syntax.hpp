#ifndef ACSAN_SYNTAX_HPP
#define ACSAN_SYNTAX_HPP

// Scenario description language:
//
//   scenario "CRO" {
//     principals Ed, Helen, CA, CRep;
//     attributes ise, ish, cans;
//     policy P4: knows(p, a2i(q, tdOn(s2i(r, said(a2i(q, cans)))))) <- knows(p, a2i(r, ish));
//     event SEC: send CA -> Ed : a2i(Ed, ise);
//     order SEC < SEC2;
//     uknows SEC: CA, a2i(Ed, ise);
//     query knows(CRep, a2i(Ed, cans));
//   }
//
// Declared principals and attributes are constants; any other lowercase
// name inside a policy is a variable whose sort is fixed by its position.
// The built-in rules are implicit and may not be redeclared.

#include "acsan/scenario.hpp"

#include <cctype>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

namespace acsan {

struct Location {
    std::size_t line = 1;
    std::size_t column = 1;
};

struct Diagnostic {
    enum class Severity { error, warning };
    Severity severity = Severity::error;
    std::string code;
    std::string message;
    Location location;
    std::string origin;

    std::string str() const {
        std::ostringstream os;
        os << origin << ':' << location.line << ':' << location.column << ": "
           << (severity == Severity::error ? "error" : "warning") << " [" << code << "] " << message;
        return os.str();
    }
};

struct ScenarioSource {
    std::string text;
    std::string origin = "<stdin>";

    static ScenarioSource from_file(const std::string& path) {
        std::ifstream in(path, std::ios::binary);
        if (!in) throw Error("cannot open " + path);
        std::ostringstream os;
        os << in.rdbuf();
        return ScenarioSource{os.str(), path};
    }
};

struct ParseResult {
    std::optional<Scenario> scenario;
    std::vector<Diagnostic> diagnostics;

    bool ok() const noexcept { return scenario.has_value(); }
};

namespace syntax {

enum class Tok { Ident, String, LBrace, RBrace, LParen, RParen, Comma, Semi, Colon, Less, Arrow, LeftArrow, Eq, Bar, End };

struct Token {
    Tok kind;
    std::string text;
    Location loc;
};

struct SyntaxError {
    Diagnostic diag;
};

inline const char* describe(Tok t) {
    switch (t) {
    case Tok::Ident: return "identifier";
    case Tok::String: return "string";
    case Tok::LBrace: return "'{'";
    case Tok::RBrace: return "'}'";
    case Tok::LParen: return "'('";
    case Tok::RParen: return "')'";
    case Tok::Comma: return "','";
    case Tok::Semi: return "';'";
    case Tok::Colon: return "':'";
    case Tok::Less: return "'<'";
    case Tok::Arrow: return "'->'";
    case Tok::LeftArrow: return "'<-'";
    case Tok::Eq: return "'='";
    case Tok::Bar: return "'|'";
    case Tok::End: return "end of input";
    }
    return "?";
}

inline bool is_keyword(std::string_view s) {
    static const char* const words[] = {"scenario", "principals", "attributes", "policy", "event", "send",
                                        "order",    "uknows",     "query",      "knows",  "msg",   "a2i",
                                        "s2i",      "said",       "tdOn",       "true",   "and",   "or",
                                        "not",      "prim"};
    for (const char* w : words)
        if (s == w) return true;
    return false;
}

class Lexer {
public:
    Lexer(const std::string& text, std::string origin) : text_(text), origin_(std::move(origin)) {}

    std::vector<Token> run() {
        std::vector<Token> out;
        for (;;) {
            skip_space();
            Location loc{line_, col_};
            if (pos_ >= text_.size()) {
                out.push_back({Tok::End, "", loc});
                return out;
            }
            char c = text_[pos_];
            if (std::isalpha(static_cast<unsigned char>(c))) {
                std::string id;
                while (pos_ < text_.size() &&
                       (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
                    id += advance();
                out.push_back({Tok::Ident, id, loc});
                continue;
            }
            if (c == '"') {
                advance();
                std::string s;
                for (;;) {
                    if (pos_ >= text_.size() || text_[pos_] == '\n') fail(loc, "unterminated string literal");
                    char d = advance();
                    if (d == '"') break;
                    if (d == '\\' && pos_ < text_.size()) d = advance();
                    s += d;
                }
                out.push_back({Tok::String, s, loc});
                continue;
            }
            advance();
            switch (c) {
            case '{': out.push_back({Tok::LBrace, "{", loc}); break;
            case '}': out.push_back({Tok::RBrace, "}", loc}); break;
            case '(': out.push_back({Tok::LParen, "(", loc}); break;
            case ')': out.push_back({Tok::RParen, ")", loc}); break;
            case ',': out.push_back({Tok::Comma, ",", loc}); break;
            case ';': out.push_back({Tok::Semi, ";", loc}); break;
            case ':': out.push_back({Tok::Colon, ":", loc}); break;
            case '=': out.push_back({Tok::Eq, "=", loc}); break;
            case '|': out.push_back({Tok::Bar, "|", loc}); break;
            case '<':
                if (pos_ < text_.size() && text_[pos_] == '-') {
                    advance();
                    out.push_back({Tok::LeftArrow, "<-", loc});
                } else {
                    out.push_back({Tok::Less, "<", loc});
                }
                break;
            case '-':
                if (pos_ < text_.size() && text_[pos_] == '>') {
                    advance();
                    out.push_back({Tok::Arrow, "->", loc});
                    break;
                }
                fail(loc, "unexpected character '-'");
            default: fail(loc, std::string("unexpected character '") + c + "'");
            }
        }
    }

private:
    char advance() {
        char c = text_[pos_++];
        if (c == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        return c;
    }

    void skip_space() {
        while (pos_ < text_.size()) {
            char c = text_[pos_];
            if (c == '#') {
                while (pos_ < text_.size() && text_[pos_] != '\n') advance();
            } else if (std::isspace(static_cast<unsigned char>(c))) {
                advance();
            } else {
                return;
            }
        }
    }

    [[noreturn]] void fail(Location loc, std::string msg) {
        throw SyntaxError{Diagnostic{Diagnostic::Severity::error, "E-LEX", std::move(msg), loc, origin_}};
    }

    const std::string& text_;
    std::string origin_;
    std::size_t pos_ = 0;
    std::size_t line_ = 1;
    std::size_t col_ = 1;
};

// Unresolved syntax tree.

struct RawTerm {
    std::string head;
    bool application = false;
    std::vector<RawTerm> args;
    Location loc;
};

struct RawAtom {
    std::string predicate;
    std::vector<RawTerm> args;
    Location loc;
};

struct RawConstraint {
    enum class Kind { True, Eq, Prim, And, Or, Not } kind = Kind::True;
    std::vector<RawTerm> terms;
    std::vector<RawConstraint> children;
    Location loc;
};

struct RawPolicy {
    std::string name;
    Location loc;
    RawAtom head;
    std::vector<RawAtom> body;
    std::optional<RawConstraint> constraint;
};

struct RawEvent {
    std::string name;
    Location loc;
    std::string sender, receiver;
    Location sender_loc, receiver_loc;
    RawTerm payload;
};

struct RawOrder {
    std::string before, after;
    Location before_loc, after_loc;
};

struct RawHint {
    std::string event;
    Location loc;
    std::string principal;
    Location principal_loc;
    RawTerm infon;
};

struct RawScenario {
    std::string name;
    std::vector<std::pair<std::string, Location>> principals, attributes;
    std::vector<RawPolicy> policies;
    std::vector<RawEvent> events;
    std::vector<RawOrder> orders;
    std::vector<RawHint> hints;
    std::vector<std::pair<std::vector<RawAtom>, Location>> queries;
};

class Parser {
public:
    Parser(std::vector<Token> toks, std::string origin) : toks_(std::move(toks)), origin_(std::move(origin)) {}

    RawScenario parse() {
        RawScenario sc;
        expect_word("scenario");
        sc.name = expect(Tok::String).text;
        expect(Tok::LBrace);
        while (peek().kind != Tok::RBrace) {
            if (peek().kind == Tok::End) fail(peek().loc, "expected '}' before end of input");
            declaration(sc);
        }
        expect(Tok::RBrace);
        if (peek().kind != Tok::End) fail(peek().loc, "unexpected input after scenario");
        return sc;
    }

private:
    const Token& peek(std::size_t k = 0) const { return toks_[std::min(pos_ + k, toks_.size() - 1)]; }
    const Token& next() { return toks_[std::min(pos_++, toks_.size() - 1)]; }

    bool at_word(std::string_view w) const { return peek().kind == Tok::Ident && peek().text == w; }

    const Token& expect(Tok t) {
        if (peek().kind != t) {
            fail(peek().loc, std::string("expected ") + describe(t) + ", found " +
                                 (peek().kind == Tok::Ident ? "'" + peek().text + "'" : describe(peek().kind)));
        }
        return next();
    }

    void expect_word(std::string_view w) {
        if (!at_word(w)) fail(peek().loc, "expected '" + std::string(w) + "'");
        next();
    }

    std::pair<std::string, Location> name() {
        const Token& t = expect(Tok::Ident);
        if (is_keyword(t.text)) fail(t.loc, "keyword '" + t.text + "' cannot be used as a name");
        return {t.text, t.loc};
    }

    [[noreturn]] void fail(Location loc, std::string msg) const {
        throw SyntaxError{Diagnostic{Diagnostic::Severity::error, "E-SYNTAX", std::move(msg), loc, origin_}};
    }

    void declaration(RawScenario& sc) {
        const Token& kw = peek();
        if (kw.kind != Tok::Ident) fail(kw.loc, "expected a declaration");
        if (kw.text == "principals" || kw.text == "attributes") {
            bool principals = kw.text == "principals";
            next();
            auto& list = principals ? sc.principals : sc.attributes;
            list.push_back(name());
            while (peek().kind == Tok::Comma) {
                next();
                list.push_back(name());
            }
            expect(Tok::Semi);
        } else if (kw.text == "policy") {
            next();
            RawPolicy p;
            std::tie(p.name, p.loc) = name();
            expect(Tok::Colon);
            p.head = atom();
            expect(Tok::LeftArrow);
            if (at_word("true")) {
                next();
            } else {
                p.body.push_back(atom());
                while (peek().kind == Tok::Comma) {
                    next();
                    p.body.push_back(atom());
                }
                if (peek().kind == Tok::Bar) {
                    next();
                    p.constraint = disjunction();
                }
            }
            expect(Tok::Semi);
            sc.policies.push_back(std::move(p));
        } else if (kw.text == "event") {
            next();
            RawEvent e;
            std::tie(e.name, e.loc) = name();
            expect(Tok::Colon);
            expect_word("send");
            std::tie(e.sender, e.sender_loc) = name();
            expect(Tok::Arrow);
            std::tie(e.receiver, e.receiver_loc) = name();
            expect(Tok::Colon);
            e.payload = term();
            expect(Tok::Semi);
            sc.events.push_back(std::move(e));
        } else if (kw.text == "order") {
            next();
            RawOrder o;
            std::tie(o.before, o.before_loc) = name();
            expect(Tok::Less);
            std::tie(o.after, o.after_loc) = name();
            expect(Tok::Semi);
            sc.orders.push_back(std::move(o));
        } else if (kw.text == "uknows") {
            next();
            RawHint h;
            std::tie(h.event, h.loc) = name();
            expect(Tok::Colon);
            std::tie(h.principal, h.principal_loc) = name();
            expect(Tok::Comma);
            h.infon = term();
            expect(Tok::Semi);
            sc.hints.push_back(std::move(h));
        } else if (kw.text == "query") {
            Location loc = kw.loc;
            next();
            std::vector<RawAtom> atoms{atom()};
            while (peek().kind == Tok::Comma) {
                next();
                atoms.push_back(atom());
            }
            expect(Tok::Semi);
            sc.queries.emplace_back(std::move(atoms), loc);
        } else {
            fail(kw.loc, "unknown declaration '" + kw.text + "'");
        }
    }

public:
    RawAtom atom() {
        const Token& t = expect(Tok::Ident);
        if (t.text != "knows" && t.text != "uknows" && t.text != "msg")
            fail(t.loc, "expected knows, uknows or msg, found '" + t.text + "'");
        RawAtom a{t.text, {}, t.loc};
        expect(Tok::LParen);
        a.args.push_back(term());
        while (peek().kind == Tok::Comma) {
            next();
            a.args.push_back(term());
        }
        expect(Tok::RParen);
        return a;
    }

    RawTerm term() {
        const Token& t = expect(Tok::Ident);
        RawTerm r{t.text, false, {}, t.loc};
        if (constructor_from_name(t.text)) {
            r.application = true;
            expect(Tok::LParen);
            r.args.push_back(term());
            while (peek().kind == Tok::Comma) {
                next();
                r.args.push_back(term());
            }
            expect(Tok::RParen);
        } else if (is_keyword(t.text)) {
            fail(t.loc, "keyword '" + t.text + "' cannot be used as a term");
        }
        return r;
    }

    /// atom (',' atom)* followed by end of input.
    std::vector<RawAtom> atom_list() {
        std::vector<RawAtom> atoms{atom()};
        while (peek().kind == Tok::Comma) {
            next();
            atoms.push_back(atom());
        }
        expect(Tok::End);
        return atoms;
    }

private:
    RawConstraint disjunction() {
        RawConstraint lhs = conjunction();
        while (at_word("or")) {
            Location loc = next().loc;
            RawConstraint rhs = conjunction();
            lhs = RawConstraint{RawConstraint::Kind::Or, {}, {std::move(lhs), std::move(rhs)}, loc};
        }
        return lhs;
    }

    RawConstraint conjunction() {
        RawConstraint lhs = negation();
        while (at_word("and")) {
            Location loc = next().loc;
            RawConstraint rhs = negation();
            lhs = RawConstraint{RawConstraint::Kind::And, {}, {std::move(lhs), std::move(rhs)}, loc};
        }
        return lhs;
    }

    RawConstraint negation() {
        if (at_word("not")) {
            Location loc = next().loc;
            return RawConstraint{RawConstraint::Kind::Not, {}, {negation()}, loc};
        }
        if (peek().kind == Tok::LParen) {
            next();
            RawConstraint c = disjunction();
            expect(Tok::RParen);
            return c;
        }
        Location loc = peek().loc;
        if (at_word("true")) {
            next();
            return RawConstraint{RawConstraint::Kind::True, {}, {}, loc};
        }
        if (at_word("prim")) {
            next();
            expect(Tok::LParen);
            RawTerm t = term();
            expect(Tok::RParen);
            return RawConstraint{RawConstraint::Kind::Prim, {std::move(t)}, {}, loc};
        }
        RawTerm lhs = term();
        expect(Tok::Eq);
        RawTerm rhs = term();
        return RawConstraint{RawConstraint::Kind::Eq, {std::move(lhs), std::move(rhs)}, {}, loc};
    }

    std::vector<Token> toks_;
    std::string origin_;
    std::size_t pos_ = 0;
};

/// Resolves names and sorts of the raw tree, collecting diagnostics.
class Resolver {
public:
    explicit Resolver(std::string origin) : origin_(std::move(origin)) {}

    std::vector<Diagnostic>& diagnostics() { return diags_; }

    void error(std::string code, std::string msg, Location loc) {
        diags_.push_back(Diagnostic{Diagnostic::Severity::error, std::move(code), std::move(msg), loc, origin_});
    }

    std::optional<Scenario> resolve(const RawScenario& raw) {
        Scenario sc;
        sc.name = raw.name;
        declare(raw, sc.vocab);
        vocab_ = &sc.vocab;
        if (raw.principals.empty()) error("E-C1", "scenario declares no principals", Location{});

        for (const auto& p : raw.policies) {
            auto rule = policy(p);
            if (!rule) continue;
            if (builtin::is_reserved(rule->name)) {
                error("E-BUILTIN", "policy name '" + rule->name + "' is reserved for a built-in rule", p.loc);
                continue;
            }
            bool redeclared = false;
            for (const auto& b : builtin::all()) {
                if (alpha_equivalent(*rule, b)) {
                    error("E-BUILTIN", "policy " + rule->name + " redeclares built-in rule '" + b.name + "'", p.loc);
                    redeclared = true;
                }
            }
            if (redeclared) continue;
            auto report = validate_rule(*rule);
            for (const auto& v : report.violations) error("E-C2", "policy " + rule->name + ": " + v.reason, p.loc);
            if (!report.ok()) continue;
            try {
                sc.policies.add(std::move(*rule));
            } catch (const Error& e) {
                error("E-DUP", e.what(), p.loc);
            }
        }

        std::map<std::string, std::size_t> event_ids;
        for (const auto& e : raw.events) {
            if (event_ids.contains(e.name)) {
                error("E-DUP", "duplicate event " + e.name, e.loc);
                continue;
            }
            auto sender = ground_constant(e.sender, Sort::Principal, e.sender_loc);
            auto receiver = ground_constant(e.receiver, Sort::Principal, e.receiver_loc);
            auto payload = ground_term(e.payload, Sort::Infon);
            if (!sender || !receiver || !payload) continue;
            event_ids.emplace(e.name, sc.causality.events.size());
            sc.causality.events.emplace_back(e.name, *sender, *payload, *receiver);
        }

        auto event_ref = [&](const std::string& n, Location loc) -> std::optional<std::size_t> {
            auto it = event_ids.find(n);
            if (it != event_ids.end()) return it->second;
            error("E-UNDECLARED", "undeclared event " + n, loc);
            return std::nullopt;
        };

        for (const auto& o : raw.orders) {
            auto a = event_ref(o.before, o.before_loc);
            auto b = event_ref(o.after, o.after_loc);
            if (!a || !b) continue;
            Arc arc{*a, *b};
            if (std::find(sc.causality.edges.begin(), sc.causality.edges.end(), arc) == sc.causality.edges.end())
                sc.causality.edges.push_back(arc);
        }
        try {
            transitive_closure(sc.causality.relation());
        } catch (const CyclicOrder& ex) {
            Location loc = raw.orders.empty() ? Location{} : raw.orders.front().before_loc;
            std::string path;
            for (std::size_t i : ex.cycle()) path += (path.empty() ? "" : " < ") + sc.causality.events[i].name;
            error("E-CYCLE", "causality relation is cyclic: " + path, loc);
        }

        for (const auto& h : raw.hints) {
            auto e = event_ref(h.event, h.loc);
            auto p = ground_constant(h.principal, Sort::Principal, h.principal_loc);
            auto x = ground_term(h.infon, Sort::Infon);
            if (!e || !p || !x) continue;
            sc.hints[*e].insert(uknows(*p, *x));
        }

        if (raw.queries.size() > 1) error("E-DUP", "more than one query declared", raw.queries[1].second);
        if (!raw.queries.empty()) {
            if (auto q = query(raw.queries.front().first)) sc.query = std::move(q);
        }

        for (const auto& d : diags_)
            if (d.severity == Diagnostic::Severity::error) return std::nullopt;
        return sc;
    }

    std::optional<Query> query(const std::vector<RawAtom>& atoms) {
        Query q;
        bool ok = true;
        for (const auto& a : atoms) {
            if (a.predicate != "knows") {
                error("E-SORT", "query conjuncts must be knows-atoms, found " + a.predicate, a.loc);
                ok = false;
                continue;
            }
            auto atom = ground_atom(a);
            if (!atom) {
                ok = false;
                continue;
            }
            q.conjuncts.push_back(std::move(*atom));
        }
        if (!ok) return std::nullopt;
        return q;
    }

    void set_vocabulary(const Vocabulary* v) { vocab_ = v; }

    std::optional<Atom> ground_atom(const RawAtom& a) {
        variables_ = nullptr;
        return atom(a);
    }

    std::optional<Term> ground_term(const RawTerm& t, Sort expected) {
        variables_ = nullptr;
        return term(t, expected);
    }

private:
    void declare(const RawScenario& raw, Vocabulary& vocab) {
        std::set<std::string> seen;
        for (const auto& [n, loc] : raw.principals) {
            if (!seen.insert(n).second) {
                error("E-DUP", "duplicate constant " + n, loc);
                continue;
            }
            vocab.add_principal(n);
        }
        for (const auto& [n, loc] : raw.attributes) {
            if (!seen.insert(n).second) {
                error("E-DUP", "duplicate constant " + n, loc);
                continue;
            }
            vocab.add_attribute(n);
        }
    }

    std::optional<Term> ground_constant(const std::string& n, Sort expected, Location loc) {
        RawTerm t{n, false, {}, loc};
        return ground_term(t, expected);
    }

    std::optional<Term> term(const RawTerm& t, Sort expected) {
        if (t.application) {
            Constructor ctor = *constructor_from_name(t.head);
            const Signature& sig = signature_of(ctor);
            if (sig.result != expected) {
                error("E-SORT",
                      t.head + "(...) has sort " + std::string(to_string(sig.result)) + ", expected " +
                          std::string(to_string(expected)),
                      t.loc);
                return std::nullopt;
            }
            if (t.args.size() != sig.params.size()) {
                error("E-ARITY",
                      t.head + " expects " + std::to_string(sig.params.size()) + " argument(s), got " +
                          std::to_string(t.args.size()),
                      t.loc);
                return std::nullopt;
            }
            std::vector<Term> args;
            bool ok = true;
            for (std::size_t i = 0; i < t.args.size(); ++i) {
                auto a = term(t.args[i], sig.params[i]);
                if (!a) {
                    ok = false;
                    continue;
                }
                args.push_back(std::move(*a));
            }
            if (!ok) return std::nullopt;
            return Term::apply(ctor, std::move(args));
        }
        if (auto c = vocab_->lookup(t.head)) {
            if (c->sort() != expected) {
                error("E-SORT",
                      "constant " + t.head + " has sort " + std::string(to_string(c->sort())) + ", expected " +
                          std::string(to_string(expected)),
                      t.loc);
                return std::nullopt;
            }
            return c;
        }
        bool lower = std::islower(static_cast<unsigned char>(t.head[0]));
        if (!variables_ || !lower) {
            error("E-UNDECLARED", "undeclared name " + t.head, t.loc);
            return std::nullopt;
        }
        auto [it, inserted] = variables_->try_emplace(t.head, expected);
        if (!inserted && it->second != expected) {
            error("E-SORT",
                  "variable " + t.head + " used as " + std::string(to_string(expected)) + " but earlier as " +
                      std::string(to_string(it->second)),
                  t.loc);
            return std::nullopt;
        }
        return Term::variable(t.head, expected);
    }

    std::optional<Atom> atom(const RawAtom& a) {
        Predicate pred = a.predicate == "knows" ? Predicate::knows
                         : a.predicate == "uknows" ? Predicate::uknows
                                                   : Predicate::msg;
        auto params = predicate_params(pred);
        if (a.args.size() != params.size()) {
            error("E-ARITY",
                  a.predicate + " expects " + std::to_string(params.size()) + " argument(s), got " +
                      std::to_string(a.args.size()),
                  a.loc);
            return std::nullopt;
        }
        std::vector<Term> args;
        bool ok = true;
        for (std::size_t i = 0; i < params.size(); ++i) {
            auto t = term(a.args[i], params[i]);
            if (!t) {
                ok = false;
                continue;
            }
            args.push_back(std::move(*t));
        }
        if (!ok) return std::nullopt;
        return Atom(pred, std::move(args));
    }

    std::optional<Sort> infer(const RawTerm& t) {
        if (t.application) {
            if (auto c = constructor_from_name(t.head)) return signature_of(*c).result;
            return std::nullopt;
        }
        if (auto c = vocab_->lookup(t.head)) return c->sort();
        if (variables_) {
            auto it = variables_->find(t.head);
            if (it != variables_->end()) return it->second;
        }
        return std::nullopt;
    }

    std::optional<Constraint> constraint(const RawConstraint& c) {
        using K = RawConstraint::Kind;
        switch (c.kind) {
        case K::True: return Constraint::truth();
        case K::Prim: {
            auto t = term(c.terms[0], Sort::Attribute);
            if (!t) return std::nullopt;
            return Constraint::prim(*t);
        }
        case K::Eq: {
            auto sort = infer(c.terms[0]);
            if (!sort) sort = infer(c.terms[1]);
            if (!sort) {
                error("E-SORT", "cannot infer the sort of an equality between unbound variables", c.loc);
                return std::nullopt;
            }
            auto lhs = term(c.terms[0], *sort);
            auto rhs = term(c.terms[1], *sort);
            if (!lhs || !rhs) return std::nullopt;
            return Constraint::eq(*lhs, *rhs);
        }
        case K::Not: {
            auto inner = constraint(c.children[0]);
            if (!inner) return std::nullopt;
            return Constraint::negate(std::move(*inner));
        }
        case K::And:
        case K::Or: {
            auto a = constraint(c.children[0]);
            auto b = constraint(c.children[1]);
            if (!a || !b) return std::nullopt;
            return c.kind == K::And ? Constraint::conj(std::move(*a), std::move(*b))
                                    : Constraint::disj(std::move(*a), std::move(*b));
        }
        }
        return std::nullopt;
    }

    std::optional<PolicyRule> policy(const RawPolicy& p) {
        std::map<std::string, Sort> vars;
        variables_ = &vars;
        if (p.head.predicate != "knows") {
            error("E-SORT", "policy " + p.name + ": head must be a knows-atom", p.head.loc);
            variables_ = nullptr;
            return std::nullopt;
        }
        auto head = atom(p.head);
        std::vector<Atom> body;
        bool ok = head.has_value();
        for (const auto& b : p.body) {
            auto a = atom(b);
            if (!a) {
                ok = false;
                continue;
            }
            body.push_back(std::move(*a));
        }
        Constraint xi;
        if (p.constraint) {
            auto c = constraint(*p.constraint);
            if (!c) ok = false;
            else xi = std::move(*c);
        }
        variables_ = nullptr;
        if (!ok) return std::nullopt;
        return PolicyRule{p.name, std::move(*head), std::move(body), std::move(xi)};
    }

    std::string origin_;
    std::vector<Diagnostic> diags_;
    const Vocabulary* vocab_ = nullptr;
    std::map<std::string, Sort>* variables_ = nullptr;
};

} // namespace syntax

inline ParseResult parse_scenario(const ScenarioSource& src) {
    ParseResult result;
    try {
        auto toks = syntax::Lexer(src.text, src.origin).run();
        auto raw = syntax::Parser(std::move(toks), src.origin).parse();
        syntax::Resolver resolver(src.origin);
        result.scenario = resolver.resolve(raw);
        result.diagnostics = std::move(resolver.diagnostics());
    } catch (const syntax::SyntaxError& e) {
        result.diagnostics.push_back(e.diag);
    }
    return result;
}

inline ParseResult parse_scenario(std::string text, std::string origin = "<string>") {
    return parse_scenario(ScenarioSource{std::move(text), std::move(origin)});
}

/// Parses a comma-separated list of ground knows-atoms against the
/// scenario's constants (used for query overrides).
inline std::variant<Query, Diagnostic> parse_query(const std::string& text, const Vocabulary& vocab) {
    try {
        auto toks = syntax::Lexer(text, "<query>").run();
        syntax::Parser parser(std::move(toks), "<query>");
        auto atoms = parser.atom_list();
        syntax::Resolver resolver("<query>");
        resolver.set_vocabulary(&vocab);
        auto q = resolver.query(atoms);
        if (!q) return resolver.diagnostics().front();
        return *q;
    } catch (const syntax::SyntaxError& e) {
        return e.diag;
    }
}

/// Renders a scenario in the description language; parsing the output
/// yields an equal scenario.
inline std::string print_scenario(const Scenario& sc) {
    std::ostringstream os;
    os << "scenario \"";
    for (char c : sc.name) {
        if (c == '"' || c == '\\') os << '\\';
        os << c;
    }
    os << "\" {\n";
    auto list = [&](const char* kw, const std::vector<Term>& ts) {
        if (ts.empty()) return;
        os << "  " << kw << ' ';
        for (std::size_t i = 0; i < ts.size(); ++i) os << (i ? ", " : "") << ts[i].name();
        os << ";\n";
    };
    list("principals", sc.vocab.principals());
    list("attributes", sc.vocab.attributes());
    for (const auto& r : sc.policies.user_rules()) os << "  policy " << r.name << ": " << r.str() << ";\n";
    for (const auto& e : sc.events())
        os << "  event " << e.name << ": send " << e.sender.str() << " -> " << e.receiver.str() << " : "
           << e.payload.str() << ";\n";
    for (auto [a, b] : sc.causality.edges)
        os << "  order " << sc.events()[a].name << " < " << sc.events()[b].name << ";\n";
    for (const auto& [e, batch] : sc.hints)
        for (const auto& h : batch)
            os << "  uknows " << sc.events()[e].name << ": " << h.arg(0).str() << ", " << h.arg(1).str() << ";\n";
    if (sc.query) os << "  query " << sc.query->str() << ";\n";
    os << "}\n";
    return os.str();
}

} // namespace acsan

#endif
