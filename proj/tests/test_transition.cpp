#include "support.hpp"

#include <gtest/gtest.h>

using namespace acsan;
using test::Cro;

namespace {

PolicyContext cro_context() {
    Cro c;
    return PolicyContext(PolicySet({c.P1(), c.P2(), c.P3(), c.P4()}), c.vocab());
}

} // namespace

TEST(Transition, EventGuardAndMessage) {
    Cro c;
    Event e("SEC", c.CA, a2i(c.Ed, c.ise), c.Ed);
    EXPECT_EQ(e.guard(), knows(c.CA, a2i(c.Ed, c.ise)));
    EXPECT_EQ(e.message(), msg(c.CA, said(a2i(c.Ed, c.ise)), c.Ed));
    EXPECT_THROW(Event("bad", c.ise, a2i(c.Ed, c.ise), c.Ed), SortError);
    EXPECT_THROW(Event("bad", c.CA, said(a2i(c.Ed, c.ise)), c.Ed), SortError);
    EXPECT_THROW(Event("bad", c.CA, a2i(Term::variable("p", Sort::Principal), c.ise), c.Ed), SortError);
}

TEST(Transition, InitialStateAndDisabledEvent) {
    Cro c;
    auto ctx = cro_context();
    RunCounters counters;
    State s = initial_state({}, ctx, &counters);
    EXPECT_EQ(counters.fixpoint_calls, 1u);
    auto es = c.events();
    EXPECT_FALSE(enabled(s, es[0]));
    EXPECT_THROW(apply_events(s, std::span<const Event>(&es[0], 1), {}, ctx), DisabledEvent);
    EXPECT_THROW(initial_state({knows(c.CA, a2i(c.Ed, c.ise))}, ctx), Error);
}

TEST(Transition, InjectionEnablesWithoutExtraClosure) {
    Cro c;
    auto ctx = cro_context();
    RunCounters counters;
    State s = initial_state({}, ctx, &counters);
    auto es = c.events();
    State t = apply_events(s, std::span<const Event>(es.data(), 3), {c.F1(), c.F2(), c.F3()}, ctx, &counters);
    EXPECT_EQ(counters.fixpoint_calls, 2u);
    EXPECT_EQ(t.step, 1u);
    EXPECT_EQ(t.msgs.size(), 3u);
    EXPECT_TRUE(enabled(t, es[3]));
    EXPECT_TRUE(t.closure.entails(knows(c.Ed, s2i(c.CA, said(a2i(c.Ed, c.ise))))));
    State u = apply_events(t, std::span<const Event>(es.data() + 3, 3), {}, ctx, &counters);
    EXPECT_EQ(counters.fixpoint_calls, 3u);
    EXPECT_TRUE(check_query(u, Query{{c.G()}}));
    EXPECT_FALSE(check_query(u, Query{{c.G(), knows(c.CRep, a2i(c.Helen, c.cans))}}));
}

TEST(Transition, EmptyStepKeepsClosure) {
    auto ctx = cro_context();
    RunCounters counters;
    State s = initial_state({}, ctx, &counters);
    State t = apply_events(s, {}, {}, ctx, &counters);
    EXPECT_EQ(counters.fixpoint_calls, 1u);
    EXPECT_EQ(t.closure.ground(), s.closure.ground());
    EXPECT_EQ(t.step, 1u);
}

TEST(TransitionProperty, ConcurrentEventsCommuteAndKnowledgeGrows) {
    Cro c;
    auto ctx = cro_context();
    auto es = c.events();
    test::Rng rng(51);
    UknowsBatch all{c.F1(), c.F2(), c.F3()};
    State s0 = initial_state(all, ctx);
    for (int i = 0; i < 60; ++i) {
        std::size_t a = test::pick(rng, 3), b = test::pick(rng, 3);
        if (a == b) continue;
        State ab = apply_events(apply_events(s0, std::span<const Event>(&es[a], 1), {}, ctx),
                                std::span<const Event>(&es[b], 1), {}, ctx);
        State ba = apply_events(apply_events(s0, std::span<const Event>(&es[b], 1), {}, ctx),
                                std::span<const Event>(&es[a], 1), {}, ctx);
        EXPECT_EQ(ab.msgs, ba.msgs);
        EXPECT_EQ(ab.closure.ground(), ba.closure.ground());
        std::vector<Event> both{es[a], es[b]};
        State joint = apply_events(s0, both, {}, ctx);
        EXPECT_EQ(joint.closure.ground(), ab.closure.ground());
        for (const auto& f : s0.closure.ground()) EXPECT_TRUE(ab.closure.entails(f));
    }
}

TEST(TransitionProperty, RandomRunsAreMonotone) {
    test::Rng rng(52);
    for (int i = 0; i < 40; ++i) {
        auto sc = test::random_scenario(rng);
        auto ctx = PolicyContext(sc.policies, sc.vocab);
        State s = initial_state({}, ctx);
        for (const auto& e : sc.events()) {
            UknowsBatch h = enabled(s, e) ? UknowsBatch{} : UknowsBatch{uknows(e.sender, e.payload)};
            State t = apply_events(s, std::span<const Event>(&e, 1), h, ctx);
            for (const auto& f : s.closure.ground()) ASSERT_TRUE(t.closure.entails(f));
            EXPECT_TRUE(t.msgs.contains(e.message()));
            s = std::move(t);
        }
    }
}
