#include "oracles.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

using namespace acsan;
using test::Cro;

namespace {

using test::Instance;
using test::base_of;
using test::closure;
using test::random_instance;

bool subset(const FactSet& a, const FactSet& b) {
    for (const auto& f : a.ground())
        if (!b.entails(f)) return false;
    return true;
}

} // namespace

TEST(Fixpoint, InternalAndReceive) {
    Cro c;
    Instance in{c.vocab(), builtin::all(), {}};
    auto f = closure(in, {c.F1(), msg(c.CA, said(a2i(c.Ed, c.ise)), c.Ed)});
    EXPECT_TRUE(f.entails(knows(c.CA, a2i(c.Ed, c.ise))));
    EXPECT_TRUE(f.entails(knows(c.Ed, s2i(c.CA, said(a2i(c.Ed, c.ise))))));
    EXPECT_FALSE(f.entails(knows(c.Ed, a2i(c.Ed, c.ise))));
}

TEST(Fixpoint, TrustApplicationThroughSchema) {
    Cro c;
    Instance in{c.vocab(), builtin::all(), {}};
    in.rules.push_back(c.P2());
    auto f = closure(in, {msg(c.CA, said(a2i(c.Ed, c.ise)), c.Ed)});
    EXPECT_TRUE(f.entails(knows(c.Ed, a2i(c.CA, tdOn(a2i(c.Ed, c.ise))))));
    EXPECT_TRUE(f.contains(knows(c.Ed, a2i(c.Ed, c.ise))));
    auto t = derivation_of(f, knows(c.Ed, a2i(c.Ed, c.ise)));
    EXPECT_EQ(t.rule, "trust_app");
    ASSERT_EQ(t.children.size(), 2u);
    EXPECT_EQ(t.children[0].rule, "receive");
    EXPECT_EQ(t.children[1].kind, Justification::Kind::Schema);
    EXPECT_EQ(t.children[1].rule, "P2");
    EXPECT_EQ(t.height(), 2u);
}

TEST(Fixpoint, CroFinalStateDerivesQuery) {
    Cro c;
    Instance in{c.vocab(), builtin::all(), {}};
    for (auto r : {c.P1(), c.P2(), c.P3(), c.P4()}) in.rules.push_back(r);
    std::vector<Atom> facts;
    for (const auto& e : c.events()) facts.push_back(e.message());
    auto f = closure(in, facts);
    EXPECT_TRUE(f.entails(c.G()));
    EXPECT_FALSE(f.entails(knows(c.CRep, a2i(c.Helen, c.cans))));
    // H1..H6 of the worked derivation.
    EXPECT_TRUE(f.contains(knows(c.CRep, s2i(c.CA, said(a2i(c.Ed, c.ise))))));
    EXPECT_TRUE(f.contains(knows(c.CRep, s2i(c.CA, said(a2i(c.Helen, c.ish))))));
    EXPECT_TRUE(f.contains(knows(c.CRep, a2i(c.Ed, c.ise))));
    EXPECT_TRUE(f.contains(knows(c.CRep, a2i(c.Helen, c.ish))));
    EXPECT_TRUE(f.contains(knows(c.CRep, a2i(c.Ed, tdOn(s2i(c.Helen, said(a2i(c.Ed, c.cans))))))));
    EXPECT_TRUE(f.contains(knows(c.CRep, s2i(c.Helen, said(a2i(c.Ed, c.cans))))));
}

TEST(Fixpoint, WithoutP4QueryFails) {
    Cro c;
    Instance in{c.vocab(), builtin::all(), {}};
    for (auto r : {c.P1(), c.P2(), c.P3()}) in.rules.push_back(r);
    std::vector<Atom> facts;
    for (const auto& e : c.events()) facts.push_back(e.message());
    EXPECT_FALSE(closure(in, facts).entails(c.G()));
}

TEST(Fixpoint, BudgetExceeded) {
    Cro c;
    Instance in{c.vocab(), builtin::all(), {}};
    for (auto r : {c.P1(), c.P2(), c.P3(), c.P4()}) in.rules.push_back(r);
    std::vector<Atom> facts;
    for (const auto& e : c.events()) facts.push_back(e.message());
    FixpointOptions opts;
    opts.universe = in.vocab.principals();
    opts.budget = 1;
    EXPECT_THROW(constr_fp(base_of(in, facts), grounded(in), opts), BudgetExceeded);
    opts.budget = 10;
    FixpointStats st;
    EXPECT_NO_THROW(constr_fp(base_of(in, facts), grounded(in), opts, &st));
    EXPECT_GT(st.passes, 1u);
}

TEST(Fixpoint, NotDerivable) {
    Cro c;
    Instance in{c.vocab(), builtin::all(), {}};
    auto f = closure(in, {c.F1()});
    EXPECT_THROW(derivation_of(f, c.G()), NotDerivable);
    auto t = derivation_of(f, c.F1());
    EXPECT_EQ(t.kind, Justification::Kind::Input);
}

TEST(Fixpoint, FirstDerivationIsKept) {
    // Both uknows and a message would give knows(Ed, s2i(CA, ...)); the
    // shortest one found first is recorded and not replaced.
    Cro c;
    Instance in{c.vocab(), builtin::all(), {}};
    auto x = s2i(c.CA, said(a2i(c.Ed, c.ise)));
    auto f = closure(in, {uknows(c.Ed, x), msg(c.CA, said(a2i(c.Ed, c.ise)), c.Ed)});
    auto t = derivation_of(f, knows(c.Ed, x));
    EXPECT_EQ(t.rule, "internal");
    auto again = closure(in, {uknows(c.Ed, x), msg(c.CA, said(a2i(c.Ed, c.ise)), c.Ed)});
    EXPECT_EQ(derivation_of(again, knows(c.Ed, x)).rule, "internal");
}

TEST(FixpointProperty, ExtensiveIdempotentMonotoneOrderIndependent) {
    test::Rng rng(31);
    for (int i = 0; i < 500; ++i) {
        auto in = random_instance(rng);
        auto f = closure(in, in.facts);

        for (const auto& a : in.facts) ASSERT_TRUE(f.contains(a)) << "extensivity";

        std::vector<Atom> again(f.ground().begin(), f.ground().end());
        auto ff = closure(in, again);
        ASSERT_EQ(ff.ground(), f.ground()) << "idempotence";

        auto more = in.facts;
        auto extra = random_instance(rng, 3);
        for (const auto& a : extra.facts) {
            // Extra facts must use this instance's vocabulary.
            bool ok = true;
            std::set<Term> subs;
            for (const auto& t : a.args()) collect_subterms(t, subs);
            for (const auto& t : subs)
                if (t.is_const() && !in.vocab.lookup(t.name())) ok = false;
            if (ok) more.push_back(a);
        }
        auto fm = closure(in, more);
        ASSERT_TRUE(subset(f, fm)) << "monotonicity";

        Instance shuffled = in;
        std::shuffle(shuffled.rules.begin(), shuffled.rules.end(), rng);
        auto facts = in.facts;
        std::shuffle(facts.begin(), facts.end(), rng);
        auto fs = closure(shuffled, facts);
        ASSERT_EQ(fs.ground(), f.ground()) << "order independence";
    }
}

TEST(FixpointProperty, MatchesNaiveOracle) {
    test::Rng rng(32);
    int nontrivial = 0;
    for (int i = 0; i < 100; ++i) {
        auto in = random_instance(rng, 5);
        auto f = closure(in, in.facts);
        std::set<Atom> input(in.facts.begin(), in.facts.end());
        auto expected = oracle::naive_closure(input, in.rules, in.vocab);
        ASSERT_EQ(f.ground(), expected) << "instance " << i;
        if (expected.size() > input.size() + 2) ++nontrivial;
    }
    EXPECT_GT(nontrivial, 30);
}
