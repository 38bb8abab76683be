#ifndef ACSAN_TRANSITION_HPP
#define ACSAN_TRANSITION_HPP

// States of the access-control transition system and the send-action
// state-change rule knows(p, x) => +msg(p, said(x), q).

#include "acsan/fixpoint.hpp"

#include <atomic>
#include <set>
#include <span>
#include <string>
#include <vector>

namespace acsan {

struct Event {
    std::string name;
    Term sender;
    Term payload;
    Term receiver;

    Event(std::string n, Term p, Term x, Term q)
        : name(std::move(n)), sender(std::move(p)), payload(std::move(x)), receiver(std::move(q)) {
        if (sender.sort() != Sort::Principal || receiver.sort() != Sort::Principal)
            throw SortError("event " + name + ": sender and receiver must be principals");
        if (payload.sort() != Sort::Infon) throw SortError("event " + name + ": payload must be an Infon term");
        if (!sender.is_ground() || !payload.is_ground() || !receiver.is_ground())
            throw SortError("event " + name + " must be ground");
    }

    Atom guard() const { return knows(sender, payload); }
    Atom message() const { return msg(sender, said(payload), receiver); }

    friend bool operator==(const Event&, const Event&) = default;
};

using UknowsBatch = std::set<Atom>;

struct Query {
    std::vector<Atom> conjuncts;

    std::string str() const {
        std::string out;
        for (std::size_t i = 0; i < conjuncts.size(); ++i) {
            if (i) out += ", ";
            out += conjuncts[i].str();
        }
        return out;
    }
};

/// Fixed context of a run: grounded policies, schemata, universe, budget.
struct PolicyContext {
    Vocabulary vocab;
    std::vector<PolicyRule> rules;
    std::vector<PolicyRule> schemata;
    FixpointOptions fixpoint;
    /// Whether `rules` contain knows(p, x) <- uknows(p, x).
    bool internal_knowledge = false;

    PolicyContext() = default;

    PolicyContext(const PolicySet& po, Vocabulary v, std::size_t budget = 10000)
        : vocab(std::move(v)), rules(po.grounded_rules(vocab.principals())), schemata(po.schemata()) {
        fixpoint.budget = budget;
        fixpoint.universe = vocab.principals();
        auto internal = builtin::internal_knowledge();
        for (const auto& r : rules) internal_knowledge = internal_knowledge || alpha_equivalent(r, internal);
    }
};

struct RunCounters {
    std::atomic<std::size_t> fixpoint_calls{0};
};

struct State {
    std::size_t step = 0;
    std::set<Atom> msgs;
    std::set<Atom> uknows_acc;
    FactSet closure;
};

inline FactSet close(const PolicyContext& ctx, const std::set<Atom>& msgs, const std::set<Atom>& uknows_acc,
                     RunCounters* counters) {
    FactSet base(ctx.schemata, ctx.vocab);
    for (const auto& a : uknows_acc) base.add_input(a);
    for (const auto& a : msgs) base.add_input(a);
    if (counters) ++counters->fixpoint_calls;
    return constr_fp(std::move(base), ctx.rules, ctx.fixpoint);
}

inline void check_batch(const UknowsBatch& h) {
    for (const auto& a : h) {
        if (a.predicate() != Predicate::uknows || !a.is_ground())
            throw Error("uknows batch may only hold ground uknows facts, got " + a.str());
    }
}

/// Empty network, internal knowledge h0.
inline State initial_state(const UknowsBatch& h0, const PolicyContext& ctx, RunCounters* counters = nullptr) {
    check_batch(h0);
    State s;
    s.uknows_acc = h0;
    s.closure = close(ctx, s.msgs, s.uknows_acc, counters);
    return s;
}

inline bool enabled(const State& s, const Event& e) { return s.closure.entails(e.guard()); }

/// Injects `h`, checks that every event is enabled, adds their messages in
/// one step and recloses. Concurrency of `es` is the caller's obligation.
inline State apply_events(const State& s, std::span<const Event> es, const UknowsBatch& h, const PolicyContext& ctx,
                          RunCounters* counters = nullptr) {
    check_batch(h);
    State next;
    next.step = s.step + 1;
    next.msgs = s.msgs;
    next.uknows_acc = s.uknows_acc;
    next.uknows_acc.insert(h.begin(), h.end());

    bool grew = next.uknows_acc.size() != s.uknows_acc.size();
    std::optional<FactSet> injected;
    for (const auto& e : es) {
        if (s.closure.entails(e.guard())) continue;
        if (grew) {
            // uknows(p, x) yields knows(p, x) through the built-in internal-knowledge rule.
            if (ctx.internal_knowledge && next.uknows_acc.contains(uknows(e.sender, e.payload))) continue;
            if (!injected) injected = close(ctx, s.msgs, next.uknows_acc, counters);
            if (injected->entails(e.guard())) continue;
        }
        throw DisabledEvent(e.name, "event " + e.name + " is not enabled: " + e.guard().str() + " is not derivable");
    }

    if (es.empty() && !grew) {
        next.closure = s.closure;
        return next;
    }
    for (const auto& e : es) next.msgs.insert(e.message());
    next.closure = close(ctx, next.msgs, next.uknows_acc, counters);
    return next;
}

inline bool check_query(const State& s, const Query& g) {
    for (const auto& c : g.conjuncts)
        if (!s.closure.entails(c)) return false;
    return true;
}

} // namespace acsan

#endif
