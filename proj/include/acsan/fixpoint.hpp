#ifndef ACSAN_FIXPOINT_HPP
#define ACSAN_FIXPOINT_HPP

// Ground least-fixpoint computation over policy rules (constraint Datalog
// restricted to ground derived facts), recording one derivation per fact.
//
// A fact set holds ground atoms plus bodiless rule schemata taken from the
// input. A ground atom is entailed when it is a member of the ground part or
// an instance of some schema whose constraint holds. Derived heads are
// always ground, so entailment never needs implication between constraints.

#include "acsan/policy.hpp"

#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

namespace acsan {

struct Justification {
    enum class Kind : std::uint8_t { Input, Schema, Rule };
    Kind kind = Kind::Input;
    std::string rule;
    Substitution binding;
    std::vector<Atom> premises;
};

class FactSet {
public:
    FactSet() = default;

    explicit FactSet(std::vector<PolicyRule> schemata, Vocabulary vocab = {})
        : schemata_(std::move(schemata)), vocab_(std::move(vocab)) {}

    /// Adds an input fact. Returns false if it was already present.
    bool add_input(const Atom& a) {
        if (!a.is_ground()) throw Error("input fact must be ground: " + a.str());
        auto [_, inserted] = ground_.insert(a);
        if (inserted) why_.emplace(a, Justification{});
        return inserted;
    }

    void add_schema(PolicyRule r) {
        if (!r.is_fact_schema()) throw Error("schema " + r.name + " has a body");
        schemata_.push_back(std::move(r));
    }

    const std::set<Atom>& ground() const noexcept { return ground_; }
    const std::vector<PolicyRule>& schemata() const noexcept { return schemata_; }
    const Vocabulary& vocabulary() const noexcept { return vocab_; }

    bool contains(const Atom& a) const { return ground_.contains(a); }

    /// First schema (in declaration order) having `a` as an instance.
    const PolicyRule* schema_for(const Atom& a) const {
        for (const auto& s : schemata_) {
            auto sigma = match(s.head, a);
            if (sigma && eval_constraint(s.constraint, *sigma, vocab_)) return &s;
        }
        return nullptr;
    }

    bool entails(const Atom& a) const { return ground_.contains(a) || schema_for(a) != nullptr; }

    const Justification* justification(const Atom& a) const {
        auto it = why_.find(a);
        return it == why_.end() ? nullptr : &it->second;
    }

    /// Ground facts of one predicate, in atom order.
    std::vector<const Atom*> with_predicate(Predicate p) const {
        std::vector<const Atom*> out;
        for (const auto& a : ground_)
            if (a.predicate() == p) out.push_back(&a);
        return out;
    }

    /// Records a derived fact; the first justification is kept.
    bool add_derived(const Atom& a, Justification j) {
        auto [_, inserted] = ground_.insert(a);
        if (inserted) why_.emplace(a, std::move(j));
        return inserted;
    }

    std::size_t size() const noexcept { return ground_.size(); }

private:
    std::set<Atom> ground_;
    std::map<Atom, Justification> why_;
    std::vector<PolicyRule> schemata_;
    Vocabulary vocab_;
};

inline bool entails(const FactSet& facts, const Atom& a) { return facts.entails(a); }

struct FixpointOptions {
    std::size_t budget = 10000;
    /// Principal universe C; used to instantiate principal variables that the
    /// body cannot bind from ground facts.
    std::vector<Term> universe;
};

struct FixpointStats {
    std::size_t passes = 0;
    std::size_t derived = 0;
};

namespace detail {

class RuleFiring {
public:
    RuleFiring(const PolicyRule& rule, const FactSet& snapshot, std::span<const Term> universe)
        : rule_(rule), facts_(snapshot), universe_(universe), done_(rule.body.size(), false),
          deferred_(rule.body.size(), false), premises_(rule.body.size(), std::nullopt) {
        for (const auto& a : rule.body) {
            bool schema_free = true;
            for (const auto& s : snapshot.schemata())
                if (may_unify(a, s.head)) schema_free = false;
            schema_free_.push_back(schema_free);
        }
    }

    template <class Emit>
    void run(Emit&& emit) {
        Substitution sigma;
        search(sigma, emit);
    }

private:
    static bool only_principal_unbound(const Atom& a, const Substitution& sigma) {
        std::set<Variable> vs;
        collect_variables(a, vs);
        for (const auto& v : vs)
            if (v.sort != Sort::Principal && !sigma.contains(v)) return false;
        return true;
    }

    template <class Emit>
    void search(Substitution& sigma, Emit& emit) {
        const auto& body = rule_.body;
        std::size_t n = body.size();

        // Ground atoms: a plain entailment check.
        for (std::size_t i = 0; i < n; ++i) {
            if (done_[i]) continue;
            Atom inst = substitute(body[i], sigma);
            if (!inst.is_ground()) continue;
            if (!facts_.entails(inst)) return;
            step(i, std::move(inst), sigma, emit);
            return;
        }

        // Atoms whose open variables are all principals: enumerate over C.
        if (!universe_.empty()) {
            for (std::size_t i = 0; i < n; ++i) {
                if (done_[i] || !only_principal_unbound(body[i], sigma)) continue;
                std::set<Variable> open;
                collect_variables(substitute(body[i], sigma), open);
                std::vector<Variable> vars(open.begin(), open.end());
                enumerate(vars, 0, sigma, [&](Substitution& s) {
                    Atom inst = substitute(body[i], s);
                    if (facts_.entails(inst)) step(i, std::move(inst), s, emit);
                });
                return;
            }
        }

        // Remaining non-ground atoms are matched against ground facts.
        std::optional<std::size_t> pick;
        for (std::size_t i = 0; i < n; ++i) {
            if (done_[i] || deferred_[i]) continue;
            if (schema_free_[i]) {
                pick = i;
                break;
            }
            if (!pick) pick = i;
        }
        if (!pick) {
            bool all_done = true;
            for (std::size_t i = 0; i < n; ++i) all_done = all_done && done_[i];
            if (all_done) finish(sigma, emit);
            return;
        }
        std::size_t i = *pick;
        for (const Atom* fact : facts_.with_predicate(body[i].predicate())) {
            Substitution extended = sigma;
            if (match_into(body[i], *fact, extended)) step(i, *fact, extended, emit);
        }
        if (!schema_free_[i]) {
            // The atom may instead be discharged by a schema once other atoms
            // have bound its variables.
            deferred_[i] = true;
            search(sigma, emit);
            deferred_[i] = false;
        }
    }

    template <class Emit>
    void step(std::size_t i, Atom premise, Substitution& sigma, Emit& emit) {
        done_[i] = true;
        premises_[i] = std::move(premise);
        search(sigma, emit);
        premises_[i].reset();
        done_[i] = false;
    }

    template <class F>
    void enumerate(const std::vector<Variable>& vars, std::size_t k, Substitution& sigma, F&& f) {
        if (k == vars.size()) {
            Substitution copy = sigma;
            f(copy);
            return;
        }
        for (const auto& c : universe_) {
            sigma.insert_or_assign(vars[k], c);
            enumerate(vars, k + 1, sigma, f);
        }
        sigma.erase(vars[k]);
    }

    template <class Emit>
    void finish(Substitution& sigma, Emit& emit) {
        std::set<Variable> open;
        collect_variables(substitute(rule_.head, sigma), open);
        rule_.constraint.collect_variables(open);
        std::vector<Variable> vars;
        for (const auto& v : open)
            if (!sigma.contains(v)) vars.push_back(v);
        for (const auto& v : vars)
            if (v.sort != Sort::Principal || universe_.empty()) return;
        enumerate(vars, 0, sigma, [&](Substitution& s) {
            if (!eval_constraint(rule_.constraint, s, facts_.vocabulary())) return;
            Atom head = substitute(rule_.head, s);
            std::vector<Atom> premises;
            premises.reserve(premises_.size());
            for (const auto& p : premises_) premises.push_back(*p);
            emit(std::move(head), s, std::move(premises));
        });
    }

    const PolicyRule& rule_;
    const FactSet& facts_;
    std::span<const Term> universe_;
    std::vector<bool> done_;
    std::vector<bool> deferred_;
    std::vector<bool> schema_free_;
    std::vector<std::optional<Atom>> premises_;
};

} // namespace detail

/// All ground heads derivable from `facts` by one application of `rule`.
template <class Emit>
void fire_rule(const PolicyRule& rule, const FactSet& facts, std::span<const Term> universe, Emit&& emit) {
    detail::RuleFiring(rule, facts, universe).run(emit);
}

/// Least fixpoint of `facts` under `rules` (grounded, with bodies).
/// Each pass applies every rule to the facts known at the start of the pass,
/// so the first recorded derivation of a fact has minimal height.
inline FactSet constr_fp(FactSet facts, std::span<const PolicyRule> rules, const FixpointOptions& opts = {},
                         FixpointStats* stats = nullptr) {
    if (opts.budget == 0) throw Error("fixpoint budget must be at least 1");
    for (std::size_t pass = 1;; ++pass) {
        std::map<Atom, Justification> fresh;
        for (const auto& rule : rules) {
            if (rule.is_fact_schema()) continue;
            fire_rule(rule, facts, opts.universe, [&](Atom head, const Substitution& sigma, std::vector<Atom> premises) {
                if (facts.entails(head) || fresh.contains(head)) return;
                fresh.emplace(std::move(head),
                              Justification{Justification::Kind::Rule, rule.name, sigma, std::move(premises)});
            });
        }
        if (stats) stats->passes = pass;
        if (fresh.empty()) break;
        if (pass > opts.budget) {
            throw BudgetExceeded("fixpoint still growing after " + std::to_string(opts.budget) + " passes");
        }
        if (stats) stats->derived += fresh.size();
        for (auto& [a, j] : fresh) facts.add_derived(a, std::move(j));
    }
    return facts;
}

struct DerivationTree {
    Atom root;
    Justification::Kind kind = Justification::Kind::Input;
    std::string rule;
    Substitution binding;
    std::vector<DerivationTree> children;

    std::size_t height() const {
        std::size_t h = 0;
        for (const auto& c : children) h = std::max(h, c.height() + 1);
        return h;
    }

    /// Appends every leaf (pre-order).
    void leaves(std::vector<const DerivationTree*>& out) const {
        if (children.empty()) out.push_back(this);
        for (const auto& c : children) c.leaves(out);
    }
};

/// Extracts the recorded derivation of `a` from a closed fact set.
inline DerivationTree derivation_of(const FactSet& facts, const Atom& a) {
    if (const Justification* j = facts.justification(a)) {
        DerivationTree t{a, j->kind, j->rule, j->binding, {}};
        for (const auto& p : j->premises) t.children.push_back(derivation_of(facts, p));
        return t;
    }
    if (const PolicyRule* s = facts.schema_for(a)) {
        auto sigma = match(s->head, a);
        return DerivationTree{a, Justification::Kind::Schema, s->name, sigma.value_or(Substitution{}), {}};
    }
    throw NotDerivable(a.str() + " is not entailed");
}

} // namespace acsan

#endif
