#ifndef ACSAN_POLICY_HPP
#define ACSAN_POLICY_HPP

// Atoms, constraints and CLP policy rules "head <- body | constraint",
// together with well-formedness checking and grounding of body-only
// principal variables over the finite principal universe.

#include "acsan/terms.hpp"

#include <algorithm>
#include <array>
#include <memory>
#include <string>
#include <utility>
#include <vector>

namespace acsan {

enum class Predicate : std::uint8_t { uknows, knows, msg };

inline std::string_view to_string(Predicate p) {
    switch (p) {
    case Predicate::uknows: return "uknows";
    case Predicate::knows: return "knows";
    case Predicate::msg: return "msg";
    }
    return "?";
}

inline std::span<const Sort> predicate_params(Predicate p) {
    static constexpr std::array<Sort, 2> knowledge{Sort::Principal, Sort::Infon};
    static constexpr std::array<Sort, 3> message{Sort::Principal, Sort::Speech, Sort::Principal};
    if (p == Predicate::msg) return message;
    return knowledge;
}

class Atom {
public:
    Atom(Predicate pred, std::vector<Term> args) : pred_(pred), args_(std::move(args)) {
        auto params = predicate_params(pred_);
        if (args_.size() != params.size()) {
            throw ArityError(std::string(to_string(pred_)) + " expects " + std::to_string(params.size()) +
                             " argument(s), got " + std::to_string(args_.size()));
        }
        for (std::size_t i = 0; i < args_.size(); ++i) {
            if (args_[i].sort() != params[i]) {
                throw SortError(std::string(to_string(pred_)) + " argument " + std::to_string(i + 1) + " must be " +
                                std::string(to_string(params[i])) + ", got " +
                                std::string(to_string(args_[i].sort())) + " term " + args_[i].str());
            }
        }
    }

    Predicate predicate() const noexcept { return pred_; }
    std::span<const Term> args() const noexcept { return args_; }
    const Term& arg(std::size_t i) const { return args_.at(i); }

    bool is_ground() const {
        return std::all_of(args_.begin(), args_.end(), [](const Term& t) { return t.is_ground(); });
    }

    std::string str() const {
        std::string out(to_string(pred_));
        out += '(';
        for (std::size_t i = 0; i < args_.size(); ++i) {
            if (i) out += ", ";
            args_[i].print(out);
        }
        out += ')';
        return out;
    }

    friend auto operator<=>(const Atom&, const Atom&) = default;
    friend bool operator==(const Atom&, const Atom&) = default;

private:
    Predicate pred_;
    std::vector<Term> args_;
};

inline Atom knows(Term p, Term x) { return Atom(Predicate::knows, {std::move(p), std::move(x)}); }
inline Atom uknows(Term p, Term x) { return Atom(Predicate::uknows, {std::move(p), std::move(x)}); }
inline Atom msg(Term p, Term s, Term q) { return Atom(Predicate::msg, {std::move(p), std::move(s), std::move(q)}); }

inline Atom substitute(const Atom& a, const Substitution& sigma) {
    if (a.is_ground()) return a;
    std::vector<Term> args;
    args.reserve(a.args().size());
    for (const auto& t : a.args()) args.push_back(substitute(t, sigma));
    return Atom(a.predicate(), std::move(args));
}

inline bool match_into(const Atom& pattern, const Atom& target, Substitution& sigma) {
    if (pattern.predicate() != target.predicate()) return false;
    for (std::size_t i = 0; i < pattern.args().size(); ++i)
        if (!match_into(pattern.args()[i], target.args()[i], sigma)) return false;
    return true;
}

inline std::optional<Substitution> match(const Atom& pattern, const Atom& target, Substitution sigma = {}) {
    if (!match_into(pattern, target, sigma)) return std::nullopt;
    return sigma;
}

inline bool may_unify(const Atom& a, const Atom& b) {
    if (a.predicate() != b.predicate()) return false;
    for (std::size_t i = 0; i < a.args().size(); ++i)
        if (!may_unify(a.args()[i], b.args()[i])) return false;
    return true;
}

inline void collect_variables(const Atom& a, std::set<Variable>& out) {
    for (const auto& t : a.args()) collect_variables(t, out);
}

/// Quantifier-free constraint over term equalities and prim.
class Constraint {
public:
    enum class Kind : std::uint8_t { True, Eq, Prim, And, Or, Not };

    Constraint() = default;

    static Constraint truth() { return Constraint(); }

    static Constraint eq(Term lhs, Term rhs) {
        if (lhs.sort() != rhs.sort()) {
            throw SortError("equality between " + std::string(to_string(lhs.sort())) + " and " +
                            std::string(to_string(rhs.sort())) + " terms");
        }
        Constraint c(Kind::Eq);
        c.terms_ = {std::move(lhs), std::move(rhs)};
        return c;
    }

    static Constraint prim(Term a) {
        if (a.sort() != Sort::Attribute) {
            throw SortError("prim expects an Attribute term, got " + std::string(to_string(a.sort())));
        }
        Constraint c(Kind::Prim);
        c.terms_ = {std::move(a)};
        return c;
    }

    static Constraint conj(Constraint a, Constraint b) { return binary(Kind::And, std::move(a), std::move(b)); }
    static Constraint disj(Constraint a, Constraint b) { return binary(Kind::Or, std::move(a), std::move(b)); }

    static Constraint negate(Constraint a) {
        Constraint c(Kind::Not);
        c.children_ = {std::move(a)};
        return c;
    }

    Kind kind() const noexcept { return kind_; }
    bool is_trivial() const noexcept { return kind_ == Kind::True; }
    std::span<const Term> terms() const noexcept { return terms_; }
    std::span<const Constraint> children() const noexcept { return children_; }

    void collect_variables(std::set<Variable>& out) const {
        for (const auto& t : terms_) acsan::collect_variables(t, out);
        for (const auto& c : children_) c.collect_variables(out);
    }

    Constraint substituted(const Substitution& sigma) const {
        Constraint c(kind_);
        for (const auto& t : terms_) c.terms_.push_back(substitute(t, sigma));
        for (const auto& ch : children_) c.children_.push_back(ch.substituted(sigma));
        return c;
    }

    std::string str() const {
        switch (kind_) {
        case Kind::True: return "true";
        case Kind::Eq: return terms_[0].str() + " = " + terms_[1].str();
        case Kind::Prim: return "prim(" + terms_[0].str() + ")";
        case Kind::And: return "(" + children_[0].str() + " and " + children_[1].str() + ")";
        case Kind::Or: return "(" + children_[0].str() + " or " + children_[1].str() + ")";
        case Kind::Not: return "not " + children_[0].str();
        }
        return "?";
    }

    friend bool operator==(const Constraint&, const Constraint&) = default;

private:
    explicit Constraint(Kind k) : kind_(k) {}

    static Constraint binary(Kind k, Constraint a, Constraint b) {
        Constraint c(k);
        c.children_ = {std::move(a), std::move(b)};
        return c;
    }

    Kind kind_ = Kind::True;
    std::vector<Term> terms_;
    std::vector<Constraint> children_;
};

/// Evaluates a constraint under free-algebra semantics.
inline bool eval_constraint(const Constraint& c, const Substitution& sigma, const Vocabulary& vocab) {
    auto ground = [&](const Term& t) {
        Term g = substitute(t, sigma);
        if (!g.is_ground()) {
            std::set<Variable> vs;
            collect_variables(g, vs);
            throw UnboundVariable("constraint variable " + vs.begin()->name + " is not bound");
        }
        return g;
    };
    switch (c.kind()) {
    case Constraint::Kind::True: return true;
    case Constraint::Kind::Eq: return ground(c.terms()[0]) == ground(c.terms()[1]);
    case Constraint::Kind::Prim: return vocab.is_prim(ground(c.terms()[0]));
    case Constraint::Kind::And:
        return eval_constraint(c.children()[0], sigma, vocab) && eval_constraint(c.children()[1], sigma, vocab);
    case Constraint::Kind::Or:
        return eval_constraint(c.children()[0], sigma, vocab) || eval_constraint(c.children()[1], sigma, vocab);
    case Constraint::Kind::Not: return !eval_constraint(c.children()[0], sigma, vocab);
    }
    return false;
}

struct PolicyRule {
    std::string name;
    Atom head;
    std::vector<Atom> body;
    Constraint constraint;

    bool is_fact_schema() const noexcept { return body.empty(); }

    std::set<Variable> head_variables() const {
        std::set<Variable> out;
        collect_variables(head, out);
        return out;
    }

    std::set<Variable> body_variables() const {
        std::set<Variable> out;
        for (const auto& a : body) collect_variables(a, out);
        return out;
    }

    std::set<Variable> constraint_variables() const {
        std::set<Variable> out;
        constraint.collect_variables(out);
        return out;
    }

    std::string str() const {
        std::string out = head.str() + " <- ";
        if (body.empty()) return out + "true";
        for (std::size_t i = 0; i < body.size(); ++i) {
            if (i) out += ", ";
            out += body[i].str();
        }
        if (!constraint.is_trivial()) out += " | " + constraint.str();
        return out;
    }
};

struct RuleViolation {
    std::string reason;
    std::optional<Variable> variable;
};

struct RuleReport {
    std::vector<RuleViolation> violations;
    bool ok() const noexcept { return violations.empty(); }
};

/// Well-formedness: the head is a knows-atom; every non-principal head
/// variable of a rule with a body occurs in the body; every body-only
/// variable is principal-sorted; constraint variables occur in head or body.
inline RuleReport validate_rule(const PolicyRule& r) {
    RuleReport report;
    if (r.head.predicate() != Predicate::knows) {
        report.violations.push_back({"head predicate must be knows, got " + std::string(to_string(r.head.predicate())),
                                     std::nullopt});
    }
    auto head_vars = r.head_variables();
    auto body_vars = r.body_variables();
    if (!r.body.empty()) {
        for (const auto& v : head_vars) {
            if (v.sort != Sort::Principal && !body_vars.contains(v)) {
                report.violations.push_back({"head variable " + v.name + " of sort " + std::string(to_string(v.sort)) +
                                                 " does not occur in the body",
                                             v});
            }
        }
    }
    for (const auto& v : body_vars) {
        if (!head_vars.contains(v) && v.sort != Sort::Principal) {
            report.violations.push_back({"body-only variable " + v.name + " has sort " +
                                             std::string(to_string(v.sort)) + ", expected Principal",
                                         v});
        }
    }
    for (const auto& v : r.constraint_variables()) {
        if (!head_vars.contains(v) && !body_vars.contains(v)) {
            report.violations.push_back({"constraint variable " + v.name + " occurs in neither head nor body", v});
        }
    }
    return report;
}

/// Principal-sorted variables that occur in the body but not in the head.
inline std::vector<Variable> body_only_principals(const PolicyRule& r) {
    auto head_vars = r.head_variables();
    std::vector<Variable> out;
    for (const auto& v : r.body_variables())
        if (v.sort == Sort::Principal && !head_vars.contains(v)) out.push_back(v);
    return out;
}

/// Replaces every body-only principal variable by each constant of the
/// universe; yields |C|^k instances, or {r} when k = 0.
inline std::vector<PolicyRule> ground_rule(const PolicyRule& r, std::span<const Term> universe) {
    if (universe.empty()) throw EmptyPrincipalSet();
    auto vars = body_only_principals(r);
    if (vars.empty()) return {r};
    std::vector<PolicyRule> out;
    std::vector<std::size_t> idx(vars.size(), 0);
    for (;;) {
        Substitution sigma;
        for (std::size_t i = 0; i < vars.size(); ++i) sigma.emplace(vars[i], universe[idx[i]]);
        PolicyRule inst{r.name, r.head, {}, r.constraint.substituted(sigma)};
        for (const auto& a : r.body) inst.body.push_back(substitute(a, sigma));
        out.push_back(std::move(inst));
        std::size_t k = vars.size();
        while (k > 0) {
            --k;
            if (++idx[k] < universe.size()) break;
            idx[k] = 0;
            if (k == 0) return out;
        }
    }
}

namespace builtin {

inline constexpr std::string_view internal = "internal";
inline constexpr std::string_view receive = "receive";
inline constexpr std::string_view trust_app = "trust_app";

inline bool is_reserved(std::string_view name) { return name == internal || name == receive || name == trust_app; }

/// knows(p, x) <- uknows(p, x)
inline PolicyRule internal_knowledge() {
    auto p = Term::variable("p", Sort::Principal);
    auto x = Term::variable("x", Sort::Infon);
    return {std::string(internal), knows(p, x), {uknows(p, x)}, {}};
}

/// knows(q, s2i(p, s)) <- msg(p, s, q)
inline PolicyRule receive_action() {
    auto p = Term::variable("p", Sort::Principal);
    auto q = Term::variable("q", Sort::Principal);
    auto s = Term::variable("s", Sort::Speech);
    return {std::string(receive), knows(q, s2i(p, s)), {msg(p, s, q)}, {}};
}

/// knows(p, x) <- knows(p, s2i(q, said(x))), knows(p, a2i(q, tdOn(x)))
inline PolicyRule trust_application() {
    auto p = Term::variable("p", Sort::Principal);
    auto q = Term::variable("q", Sort::Principal);
    auto x = Term::variable("x", Sort::Infon);
    return {std::string(trust_app), knows(p, x), {knows(p, s2i(q, said(x))), knows(p, a2i(q, tdOn(x)))}, {}};
}

inline std::vector<PolicyRule> all() { return {internal_knowledge(), receive_action(), trust_application()}; }

} // namespace builtin

namespace detail {

inline Term rename_canonical(const Term& t, std::map<Variable, std::string>& names) {
    if (t.is_ground()) return t;
    if (t.is_var()) {
        auto v = t.as_variable();
        auto it = names.find(v);
        if (it == names.end()) it = names.emplace(v, "_" + std::to_string(names.size())).first;
        return Term::variable(it->second, v.sort);
    }
    std::vector<Term> args;
    for (const auto& a : t.args()) args.push_back(rename_canonical(a, names));
    return Term::apply(t.ctor(), std::move(args));
}

inline Atom rename_canonical(const Atom& a, std::map<Variable, std::string>& names) {
    std::vector<Term> args;
    for (const auto& t : a.args()) args.push_back(rename_canonical(t, names));
    return Atom(a.predicate(), std::move(args));
}

} // namespace detail

/// True if the two rules are equal up to a consistent renaming of variables.
inline bool alpha_equivalent(const PolicyRule& a, const PolicyRule& b) {
    if (a.body.size() != b.body.size()) return false;
    std::map<Variable, std::string> na, nb;
    if (detail::rename_canonical(a.head, na) != detail::rename_canonical(b.head, nb)) return false;
    for (std::size_t i = 0; i < a.body.size(); ++i)
        if (detail::rename_canonical(a.body[i], na) != detail::rename_canonical(b.body[i], nb)) return false;
    Substitution sa, sb;
    for (const auto& [v, n] : na) sa.emplace(v, Term::variable(n, v.sort));
    for (const auto& [v, n] : nb) sb.emplace(v, Term::variable(n, v.sort));
    return a.constraint.substituted(sa) == b.constraint.substituted(sb);
}

/// The policy set Po: built-ins (2), (3), (4) followed by the user rules in
/// declaration order.
class PolicySet {
public:
    PolicySet() : rules_(builtin::all()) {}

    explicit PolicySet(std::vector<PolicyRule> user) : PolicySet() {
        for (auto& r : user) add(std::move(r));
    }

    void add(PolicyRule r) {
        if (builtin::is_reserved(r.name)) throw Error("policy name " + r.name + " is reserved for a built-in rule");
        for (const auto& existing : rules_)
            if (existing.name == r.name) throw Error("duplicate policy name " + r.name);
        rules_.push_back(std::move(r));
    }

    bool remove(std::string_view name) {
        if (builtin::is_reserved(name)) return false;
        auto it = std::find_if(rules_.begin(), rules_.end(), [&](const PolicyRule& r) { return r.name == name; });
        if (it == rules_.end()) return false;
        rules_.erase(it);
        return true;
    }

    const std::vector<PolicyRule>& rules() const noexcept { return rules_; }

    std::span<const PolicyRule> user_rules() const noexcept {
        return std::span<const PolicyRule>(rules_).subspan(builtin::all().size());
    }

    /// Rules with bodies, grounded over `universe`.
    std::vector<PolicyRule> grounded_rules(std::span<const Term> universe) const {
        std::vector<PolicyRule> out;
        for (const auto& r : rules_) {
            if (r.is_fact_schema()) continue;
            for (auto& g : ground_rule(r, universe)) out.push_back(std::move(g));
        }
        return out;
    }

    std::vector<PolicyRule> schemata() const {
        std::vector<PolicyRule> out;
        for (const auto& r : rules_)
            if (r.is_fact_schema()) out.push_back(r);
        return out;
    }

private:
    std::vector<PolicyRule> rules_;
};

} // namespace acsan

#endif
