#ifndef ACSAN_ANALYSIS_HPP
#define ACSAN_ANALYSIS_HPP

// Reachability of a query over a scenario, under interleaving semantics
// (every linear extension of the causality relation, one event per step)
// and under partial-order semantics (layers of pairwise concurrent events
// executed in one step each). Also checks the two compatibility conditions
// a causality relation must meet for the layered analysis to be complete.

#include "acsan/scenario.hpp"

#include <algorithm>
#include <future>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace acsan {

struct WitnessStep {
    std::vector<std::size_t> events;
    UknowsBatch injected;
};

struct AnalysisStats {
    std::size_t fixpoint_calls = 0;
    std::size_t sequences_explored = 0;
    std::size_t layers = 0;
};

struct Verdict {
    enum class Result { reachable, unreachable };
    enum class Mode { interleaving, partial_order };

    Result result = Result::unreachable;
    Mode mode = Mode::partial_order;
    /// Steps in execution order; each injects its batch, then fires its events.
    std::vector<WitnessStep> witness;
    /// Number of steps after which the query first held (0 = initial state).
    std::optional<std::size_t> earliest_step;
    /// One derivation per query conjunct, taken from the final witness state.
    std::vector<DerivationTree> derivations;
    AnalysisStats stats;

    bool reachable() const noexcept { return result == Result::reachable; }
};

inline std::string_view to_string(Verdict::Mode m) {
    return m == Verdict::Mode::interleaving ? "interleaving" : "partial-order";
}

inline std::string_view to_string(Verdict::Result r) {
    return r == Verdict::Result::reachable ? "reachable" : "unreachable";
}

struct AnalysisOptions {
    std::size_t max_iters = 10000;
    /// Worker threads for interleaving exploration.
    std::size_t jobs = 1;
    /// Interleaving: keep exploring after the first witness (statistics only).
    bool exhaustive = false;
};

inline PolicyContext make_context(const Scenario& sc, const AnalysisOptions& opts = {}) {
    return PolicyContext(sc.policies, sc.vocab, opts.max_iters);
}

/// uknows facts that make `e` enabled in `s`: none if it already is, the
/// scenario's hint for `e` if declared, otherwise uknows(sender, payload).
inline UknowsBatch abduce_uknows(const State& s, const Event& e, const UknowsBatch* hint = nullptr) {
    if (enabled(s, e)) return {};
    if (hint) return *hint;
    return {uknows(e.sender, e.payload)};
}

inline UknowsBatch abduce_uknows(const Scenario& sc, const State& s, std::size_t event) {
    return abduce_uknows(s, sc.events().at(event), sc.hint_for(event));
}

namespace detail {

inline const Query& require_query(const Scenario& sc) {
    if (!sc.query) throw Error("scenario " + sc.name + " declares no query");
    return *sc.query;
}

inline std::vector<Event> select(const Scenario& sc, const std::vector<std::size_t>& idx) {
    std::vector<Event> out;
    out.reserve(idx.size());
    for (auto i : idx) out.push_back(sc.events().at(i));
    return out;
}

struct SequenceRun {
    std::vector<WitnessStep> steps;
    std::optional<std::size_t> earliest;
    std::optional<State> final_state;
};

/// Executes one linear extension with per-step abduction.
inline SequenceRun run_sequence(const Scenario& sc, const PolicyContext& ctx, const State& start, const Query& g,
                                const std::vector<std::size_t>& seq, RunCounters* counters) {
    SequenceRun run;
    State s = start;
    if (check_query(s, g)) run.earliest = 0;
    for (std::size_t k = 0; k < seq.size(); ++k) {
        const Event& e = sc.events()[seq[k]];
        UknowsBatch h = abduce_uknows(sc, s, seq[k]);
        try {
            s = apply_events(s, std::span<const Event>(&e, 1), h, ctx, counters);
        } catch (const DisabledEvent& ex) {
            std::string prefix;
            for (std::size_t i = 0; i <= k; ++i) prefix += (i ? " " : "") + sc.events()[seq[i]].name;
            throw DisabledEvent(ex.event(), std::string(ex.what()) + " (sequence prefix: " + prefix + ")");
        }
        run.steps.push_back(WitnessStep{{seq[k]}, std::move(h)});
        if (!run.earliest && check_query(s, g)) run.earliest = k + 1;
    }
    run.final_state = std::move(s);
    return run;
}

inline void fill_derivations(Verdict& v, const State& final_state, const Query& g) {
    for (const auto& c : g.conjuncts) v.derivations.push_back(derivation_of(final_state.closure, c));
}

} // namespace detail

/// Explores the linear extensions of the causality relation in lexicographic
/// order; returns the first sequence whose run satisfies the query.
inline Verdict analyze_interleaving(const Scenario& sc, const AnalysisOptions& opts = {}) {
    const Query& g = detail::require_query(sc);
    PolicyContext ctx = make_context(sc, opts);
    RunCounters counters;
    Verdict v;
    v.mode = Verdict::Mode::interleaving;

    State start = initial_state({}, ctx, &counters);
    LinearExtensionCursor cursor(sc.causality.relation());
    std::size_t batch_size = std::max<std::size_t>(1, opts.jobs);
    std::optional<detail::SequenceRun> found;

    for (;;) {
        std::vector<std::vector<std::size_t>> batch;
        while (batch.size() < batch_size) {
            auto seq = cursor.next();
            if (!seq) break;
            batch.push_back(std::move(*seq));
        }
        if (batch.empty()) break;

        std::vector<detail::SequenceRun> runs;
        if (batch.size() == 1) {
            runs.push_back(detail::run_sequence(sc, ctx, start, g, batch[0], &counters));
        } else {
            std::vector<std::future<detail::SequenceRun>> pending;
            for (const auto& seq : batch) {
                pending.push_back(std::async(std::launch::async, [&, seq] {
                    return detail::run_sequence(sc, ctx, start, g, seq, &counters);
                }));
            }
            for (auto& f : pending) runs.push_back(f.get());
        }
        v.stats.sequences_explored += runs.size();
        for (auto& r : runs) {
            if (r.earliest && !found) found = std::move(r);
        }
        if (found && !opts.exhaustive) break;
    }

    v.stats.fixpoint_calls = counters.fixpoint_calls;
    if (found) {
        v.result = Verdict::Result::reachable;
        v.witness = std::move(found->steps);
        v.earliest_step = found->earliest;
        v.stats.layers = v.witness.size();
        detail::fill_derivations(v, *found->final_state, g);
    }
    return v;
}

/// Layered run over the causality graph: abduce for the minimal events,
/// then fire each layer of concurrent events in one step.
inline Verdict analyze_partial_order(const Scenario& sc, const AnalysisOptions& opts = {}) {
    const Query& g = detail::require_query(sc);
    PolicyContext ctx = make_context(sc, opts);
    RunCounters counters;
    Verdict v;
    v.mode = Verdict::Mode::partial_order;

    auto layers = peel_layers(transitive_reduction(sc.causality.relation()));
    State s = initial_state({}, ctx, &counters);
    if (check_query(s, g)) v.earliest_step = 0;

    for (std::size_t i = 0; i < layers.size(); ++i) {
        UknowsBatch h;
        if (i == 0) {
            for (auto e : layers[0]) {
                auto part = abduce_uknows(sc, s, e);
                h.insert(part.begin(), part.end());
            }
        }
        auto events = detail::select(sc, layers[i]);
        try {
            s = apply_events(s, events, h, ctx, &counters);
        } catch (const DisabledEvent& ex) {
            throw CompatViolation("layer " + std::to_string(i + 1) + ": " + ex.what());
        }
        v.witness.push_back(WitnessStep{layers[i], std::move(h)});
        if (!v.earliest_step && check_query(s, g)) v.earliest_step = i + 1;
    }

    v.stats.fixpoint_calls = counters.fixpoint_calls;
    v.stats.sequences_explored = 1;
    v.stats.layers = layers.size();
    if (v.earliest_step) {
        v.result = Verdict::Result::reachable;
        detail::fill_derivations(v, s, g);
    } else {
        v.witness.clear();
    }
    return v;
}

/// Replays a witness through the transition system from the empty state.
inline State replay_witness(const Scenario& sc, const Verdict& v, const PolicyContext& ctx) {
    State s = initial_state({}, ctx);
    for (const auto& step : v.witness) s = apply_events(s, detail::select(sc, step.events), step.injected, ctx);
    return s;
}

struct GuardDerivation {
    std::size_t event;
    std::size_t step;
    DerivationTree tree;
};

/// Derivation of each witness event's guard in the state it fired from
/// (after that step's injection).
inline std::vector<GuardDerivation> explain_guards(const Scenario& sc, const Verdict& v, const PolicyContext& ctx) {
    std::vector<GuardDerivation> out;
    State s = initial_state({}, ctx);
    for (std::size_t k = 0; k < v.witness.size(); ++k) {
        const auto& step = v.witness[k];
        State injected = step.injected.empty() ? s : apply_events(s, {}, step.injected, ctx);
        for (auto e : step.events)
            out.push_back(GuardDerivation{e, k + 1, derivation_of(injected.closure, sc.events()[e].guard())});
        s = apply_events(s, detail::select(sc, step.events), step.injected, ctx);
    }
    return out;
}

struct Comp1Violation {
    std::size_t first;  // fired event
    std::size_t second; // event whose enabledness changed
    std::size_t step;
    bool enabled_before;
    bool enabled_after;
};

struct Comp2Violation {
    std::size_t event;
    Atom missing_guard;
};

struct CompatReport {
    std::vector<Comp1Violation> comp1;
    std::vector<Comp2Violation> comp2;

    bool comp1_pass() const noexcept { return comp1.empty(); }
    bool comp2_pass() const noexcept { return comp2.empty(); }
    bool pass() const noexcept { return comp1.empty() && comp2.empty(); }
};

enum class CompatMode { canonical, exhaustive };

inline constexpr std::size_t exhaustive_compat_cap = 8;

namespace detail {

/// Checks every incomparable pair of `pending` events in state `s`: fire l1
/// (after abducing its own enabling fact) and compare l2's enabledness.
inline void comp1_at(const Scenario& sc, const PolicyContext& ctx, const Relation& closed, const State& s,
                     const std::vector<std::size_t>& pending, std::size_t step, std::vector<Comp1Violation>& out) {
    for (auto l1 : pending) {
        const Event& e1 = sc.events()[l1];
        UknowsBatch h = abduce_uknows(sc, s, l1);
        State s1 = h.empty() ? s : apply_events(s, {}, h, ctx);
        if (!enabled(s1, e1)) continue;
        State after = apply_events(s1, std::span<const Event>(&e1, 1), {}, ctx);
        for (auto l2 : pending) {
            if (l1 == l2 || comparable(closed, l1, l2)) continue;
            bool before = enabled(s1, sc.events()[l2]);
            bool later = enabled(after, sc.events()[l2]);
            if (before == later) continue;
            bool seen = std::any_of(out.begin(), out.end(),
                                    [&](const Comp1Violation& v) { return v.first == l1 && v.second == l2; });
            if (!seen) out.push_back(Comp1Violation{l1, l2, step, before, later});
        }
    }
}

} // namespace detail

inline CompatReport check_compat(const Scenario& sc, CompatMode mode = CompatMode::canonical,
                                 const AnalysisOptions& opts = {}) {
    PolicyContext ctx = make_context(sc, opts);
    Relation closed = sc.closed_order();
    auto layers = peel_layers(transitive_reduction(sc.causality.relation()));
    CompatReport report;

    // COMP1 over the canonical layered run.
    State s = initial_state({}, ctx);
    for (std::size_t i = 0; i < layers.size(); ++i) {
        std::vector<std::size_t> pending;
        for (std::size_t j = i; j < layers.size(); ++j) pending.insert(pending.end(), layers[j].begin(), layers[j].end());
        std::sort(pending.begin(), pending.end());
        detail::comp1_at(sc, ctx, closed, s, pending, i, report.comp1);

        UknowsBatch h;
        if (i == 0)
            for (auto e : layers[0]) {
                auto part = abduce_uknows(sc, s, e);
                h.insert(part.begin(), part.end());
            }
        if (!h.empty()) {
            State injected = apply_events(s, {}, h, ctx);
            detail::comp1_at(sc, ctx, closed, injected, pending, i, report.comp1);
        }
        std::vector<Event> firing;
        State pre = h.empty() ? s : apply_events(s, {}, h, ctx);
        for (auto e : layers[i])
            if (enabled(pre, sc.events()[e])) firing.push_back(sc.events()[e]);
        s = apply_events(s, firing, h, ctx);
    }

    if (mode == CompatMode::exhaustive) {
        if (sc.events().size() > exhaustive_compat_cap) {
            throw TooLarge("exhaustive compatibility check is limited to " + std::to_string(exhaustive_compat_cap) +
                           " events");
        }
        State start = initial_state({}, ctx);
        for_each_linear_extension(sc.causality.relation(), [&](const std::vector<std::size_t>& seq) {
            State cur = start;
            for (std::size_t k = 0; k < seq.size(); ++k) {
                std::vector<std::size_t> pending(seq.begin() + static_cast<std::ptrdiff_t>(k), seq.end());
                std::sort(pending.begin(), pending.end());
                detail::comp1_at(sc, ctx, closed, cur, pending, k, report.comp1);
                const Event& e = sc.events()[seq[k]];
                UknowsBatch h = abduce_uknows(sc, cur, seq[k]);
                State pre = h.empty() ? cur : apply_events(cur, {}, h, ctx);
                if (!enabled(pre, e)) return true;
                cur = apply_events(pre, std::span<const Event>(&e, 1), {}, ctx);
            }
            return true;
        });
    }

    // COMP2: executing exactly the predecessors of l' enables l'.
    for (std::size_t target = 0; target < sc.events().size(); ++target) {
        auto pre = predecessors(closed, target);
        if (pre.empty()) continue;
        State cur = initial_state({}, ctx);
        bool first = true;
        for (const auto& layer : layers) {
            std::vector<std::size_t> part;
            for (auto e : layer)
                if (std::find(pre.begin(), pre.end(), e) != pre.end()) part.push_back(e);
            if (part.empty()) continue;
            UknowsBatch h;
            if (first)
                for (auto e : part) {
                    auto ab = abduce_uknows(sc, cur, e);
                    h.insert(ab.begin(), ab.end());
                }
            first = false;
            State injected = h.empty() ? cur : apply_events(cur, {}, h, ctx);
            std::vector<Event> firing;
            for (auto e : part)
                if (enabled(injected, sc.events()[e])) firing.push_back(sc.events()[e]);
            cur = apply_events(injected, firing, {}, ctx);
        }
        const Event& e = sc.events()[target];
        if (!enabled(cur, e)) report.comp2.push_back(Comp2Violation{target, e.guard()});
    }
    return report;
}

} // namespace acsan

#endif
