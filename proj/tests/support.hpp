#pragma once

#include "acsan/acsan.hpp"

#include <algorithm>
#include <ostream>
#include <random>
#include <string>
#include <vector>

namespace acsan {
inline void PrintTo(const Term& t, std::ostream* os) { *os << t.str(); }
inline void PrintTo(const Atom& a, std::ostream* os) { *os << a.str(); }
} // namespace acsan

namespace acsan::test {

inline std::string source_path(const std::string& rel) { return std::string(ACSAN_SOURCE_DIR) + "/" + rel; }

inline Scenario load(const std::string& rel) {
    auto r = parse_scenario(ScenarioSource::from_file(source_path(rel)));
    if (!r.ok()) {
        std::string msg;
        for (const auto& d : r.diagnostics) msg += d.str() + "\n";
        throw Error("fixture " + rel + " failed to parse:\n" + msg);
    }
    return std::move(*r.scenario);
}

inline Scenario load_cro() { return load("scenarios/cro.acs"); }

/// Constants of the CRO example.
struct Cro {
    Term Ed = Term::constant("Ed", Sort::Principal);
    Term Helen = Term::constant("Helen", Sort::Principal);
    Term CA = Term::constant("CA", Sort::Principal);
    Term CRep = Term::constant("CRep", Sort::Principal);
    Term ise = Term::constant("ise", Sort::Attribute);
    Term ish = Term::constant("ish", Sort::Attribute);
    Term cans = Term::constant("cans", Sort::Attribute);

    Vocabulary vocab() const {
        Vocabulary v;
        for (const auto* p : {&Ed, &Helen, &CA, &CRep}) v.add_principal(p->name());
        for (const auto* a : {&ise, &ish, &cans}) v.add_attribute(a->name());
        return v;
    }

    static Term var(const char* n, Sort s) { return Term::variable(n, s); }

    PolicyRule P1() const {
        auto p = var("p", Sort::Principal), q = var("q", Sort::Principal);
        return {"P1",
                knows(CRep, a2i(p, cans)),
                {knows(CRep, a2i(q, ish)), knows(CRep, a2i(p, ise)), knows(CRep, s2i(q, said(a2i(p, cans))))},
                {}};
    }
    PolicyRule P2() const {
        return {"P2", knows(var("p", Sort::Principal), a2i(CA, tdOn(var("x", Sort::Infon)))), {}, {}};
    }
    PolicyRule P3() const {
        return {"P3",
                knows(var("p", Sort::Principal),
                      a2i(var("q", Sort::Principal), tdOn(s2i(CA, said(var("x", Sort::Infon)))))),
                {},
                {}};
    }
    PolicyRule P4() const {
        auto p = var("p", Sort::Principal), q = var("q", Sort::Principal), r = var("r", Sort::Principal);
        return {"P4", knows(p, a2i(q, tdOn(s2i(r, said(a2i(q, cans)))))), {knows(p, a2i(r, ish))}, {}};
    }

    Atom F1() const { return uknows(CA, a2i(Ed, ise)); }
    Atom F2() const { return uknows(CA, a2i(Helen, ish)); }
    Atom F3() const { return uknows(Helen, a2i(Ed, cans)); }
    Atom G() const { return knows(CRep, a2i(Ed, cans)); }

    std::vector<Event> events() const {
        return {Event("SEC", CA, a2i(Ed, ise), Ed),
                Event("SHC", CA, a2i(Helen, ish), Ed),
                Event("SPC", Helen, a2i(Ed, cans), Ed),
                Event("SEC2", Ed, s2i(CA, said(a2i(Ed, ise))), CRep),
                Event("SHC2", Ed, s2i(CA, said(a2i(Helen, ish))), CRep),
                Event("SPC2", Ed, s2i(Helen, said(a2i(Ed, cans))), CRep)};
    }

    /// The scenario assembled through the library API, without the parser.
    Scenario scenario() const {
        Scenario sc;
        sc.name = "CRO";
        sc.vocab = vocab();
        sc.policies = PolicySet({P1(), P2(), P3(), P4()});
        sc.causality.events = events();
        sc.causality.edges = {{0, 3}, {1, 4}, {2, 5}};
        sc.query = Query{{G()}};
        return sc;
    }
};

using Rng = std::mt19937_64;

inline std::size_t pick(Rng& rng, std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); }
inline bool coin(Rng& rng, double p = 0.5) { return std::bernoulli_distribution(p)(rng); }

template <class T>
const T& pick_from(Rng& rng, const std::vector<T>& v) {
    return v[pick(rng, v.size())];
}

/// Random ground term of sort `s` with nesting depth at most `depth`.
inline Term random_ground(Rng& rng, const Vocabulary& v, Sort s, int depth) {
    switch (s) {
    case Sort::Principal: return pick_from(rng, v.principals());
    case Sort::Attribute:
        if (depth > 0 && coin(rng, 0.2)) return tdOn(random_ground(rng, v, Sort::Infon, depth - 1));
        return pick_from(rng, v.attributes());
    case Sort::Speech: return said(random_ground(rng, v, Sort::Infon, std::max(depth - 1, 0)));
    case Sort::Infon:
        if (depth > 0 && coin(rng, 0.4))
            return s2i(pick_from(rng, v.principals()), random_ground(rng, v, Sort::Speech, depth - 1));
        return a2i(pick_from(rng, v.principals()), random_ground(rng, v, Sort::Attribute, depth));
    }
    throw Error("unreachable");
}

inline Vocabulary random_vocab(Rng& rng, std::size_t max_principals = 4, std::size_t max_attributes = 3) {
    Vocabulary v;
    std::size_t np = 1 + pick(rng, max_principals);
    std::size_t na = 1 + pick(rng, max_attributes);
    for (std::size_t i = 0; i < np; ++i) v.add_principal("P" + std::to_string(i));
    for (std::size_t i = 0; i < na; ++i) v.add_attribute("a" + std::to_string(i));
    return v;
}

/// Random CRO-shaped user policies over `v`: endorsement, trust schemata,
/// delegation, and attribute implication with constraints.
inline std::vector<PolicyRule> random_policies(Rng& rng, const Vocabulary& v) {
    auto P = [](const char* n) { return Term::variable(n, Sort::Principal); };
    auto X = [](const char* n) { return Term::variable(n, Sort::Infon); };
    auto A = [](const char* n) { return Term::variable(n, Sort::Attribute); };
    auto C = [&] { return pick_from(rng, v.principals()); };
    auto At = [&] { return pick_from(rng, v.attributes()); };
    std::vector<PolicyRule> out;
    std::size_t id = 0;
    auto name = [&] { return "R" + std::to_string(id++); };

    if (coin(rng, 0.6)) {
        Term rep = C(), granted = At(), head = At(), base = At();
        out.push_back({name(),
                       knows(rep, a2i(P("p"), granted)),
                       {knows(rep, a2i(P("q"), head)), knows(rep, a2i(P("p"), base)),
                        knows(rep, s2i(P("q"), said(a2i(P("p"), granted))))},
                       {}});
    }
    if (coin(rng, 0.7)) out.push_back({name(), knows(P("p"), a2i(C(), tdOn(X("x")))), {}, {}});
    if (coin(rng, 0.6)) out.push_back({name(), knows(P("p"), a2i(P("q"), tdOn(s2i(C(), said(X("x")))))), {}, {}});
    if (coin(rng, 0.5)) {
        Term granted = At(), head = At();
        out.push_back({name(),
                       knows(P("p"), a2i(P("q"), tdOn(s2i(P("r"), said(a2i(P("q"), granted)))))),
                       {knows(P("p"), a2i(P("r"), head))},
                       {}});
    }
    if (coin(rng, 0.4)) {
        Constraint xi = coin(rng) ? Constraint::prim(A("b")) : Constraint::negate(Constraint::eq(P("r"), C()));
        out.push_back({name(),
                       knows(P("p"), a2i(P("r"), A("b"))),
                       {knows(P("p"), s2i(P("q"), said(a2i(P("r"), A("b"))))), knows(P("p"), a2i(P("q"), At()))},
                       xi});
    }
    if (coin(rng, 0.3)) {
        out.push_back({name(),
                       knows(P("p"), a2i(P("q"), At())),
                       {knows(P("p"), a2i(P("r"), At())), knows(P("r"), a2i(P("q"), At()))},
                       Constraint::negate(Constraint::eq(P("p"), P("q")))});
    }
    return out;
}

/// Fact set, rules and vocabulary for one fixpoint computation.
struct Instance {
    Vocabulary vocab;
    std::vector<PolicyRule> rules; // built-ins, user rules and schemata
    std::vector<Atom> facts;
};

inline FactSet base_of(const Instance& in, const std::vector<Atom>& facts) {
    std::vector<PolicyRule> schemata;
    for (const auto& r : in.rules)
        if (r.is_fact_schema()) schemata.push_back(r);
    FactSet f(schemata, in.vocab);
    for (const auto& a : facts) f.add_input(a);
    return f;
}

inline std::vector<PolicyRule> grounded(const Instance& in) {
    std::vector<PolicyRule> out;
    for (const auto& r : in.rules) {
        if (r.is_fact_schema()) continue;
        for (auto& g : ground_rule(r, in.vocab.principals())) out.push_back(std::move(g));
    }
    return out;
}

inline FactSet closure(const Instance& in, const std::vector<Atom>& facts) {
    FixpointOptions opts;
    opts.universe = in.vocab.principals();
    return constr_fp(base_of(in, facts), grounded(in), opts);
}

inline Instance random_instance(Rng& rng, std::size_t max_facts = 8) {
    Instance in;
    in.vocab = random_vocab(rng, 3, 3);
    in.rules = builtin::all();
    for (auto& r : random_policies(rng, in.vocab)) in.rules.push_back(std::move(r));
    std::size_t n = 1 + pick(rng, max_facts);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& C = in.vocab.principals();
        Term p = pick_from(rng, C);
        Term x = random_ground(rng, in.vocab, Sort::Infon, 2);
        switch (pick(rng, 3)) {
        case 0: in.facts.push_back(uknows(p, x)); break;
        case 1: in.facts.push_back(msg(p, said(x), pick_from(rng, C))); break;
        default: {
            // A forwarded statement, so that trust application has work to do.
            Term q = pick_from(rng, C);
            in.facts.push_back(msg(q, said(s2i(p, said(x))), pick_from(rng, C)));
        }
        }
    }
    return in;
}

/// Random scenario with at most `max_events` events, principals and
/// attributes drawn from a CRO-sized vocabulary, and a random strict order.
inline Scenario random_scenario(Rng& rng, std::size_t max_events = 6) {
    Scenario sc;
    sc.name = "random";
    sc.vocab = random_vocab(rng, 4, 3);
    for (auto& r : random_policies(rng, sc.vocab)) sc.policies.add(std::move(r));
    std::size_t n = 1 + pick(rng, max_events);
    std::vector<Event> issued;
    for (std::size_t i = 0; i < n; ++i) {
        Term p = pick_from(rng, sc.vocab.principals()), q = pick_from(rng, sc.vocab.principals());
        Term x = a2i(pick_from(rng, sc.vocab.principals()), pick_from(rng, sc.vocab.attributes()));
        if (!issued.empty() && coin(rng, 0.5)) {
            const Event& base = pick_from(rng, issued);
            p = base.receiver;
            x = s2i(base.sender, said(base.payload));
        }
        Event e("e" + std::to_string(i), p, x, q);
        issued.push_back(e);
        sc.causality.events.push_back(std::move(e));
    }
    // Random DAG consistent with a random permutation.
    std::vector<std::size_t> perm(n);
    for (std::size_t i = 0; i < n; ++i) perm[i] = i;
    std::shuffle(perm.begin(), perm.end(), rng);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (coin(rng, 0.3)) sc.causality.edges.emplace_back(perm[i], perm[j]);
    Term who = pick_from(rng, sc.vocab.principals());
    Term what = coin(rng, 0.7) ? a2i(pick_from(rng, sc.vocab.principals()), pick_from(rng, sc.vocab.attributes()))
                               : random_ground(rng, sc.vocab, Sort::Infon, 2);
    sc.query = Query{{knows(who, what)}};
    return sc;
}

/// Random relation on n elements that is acyclic (arcs respect a hidden
/// permutation), not necessarily transitive.
inline Relation random_dag(Rng& rng, std::size_t n, double density) {
    std::vector<std::size_t> perm(n);
    for (std::size_t i = 0; i < n; ++i) perm[i] = i;
    std::shuffle(perm.begin(), perm.end(), rng);
    Relation r(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (coin(rng, density)) r.set(perm[i], perm[j]);
    return r;
}

} // namespace acsan::test
