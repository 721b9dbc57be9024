#include <gtest/gtest.h>

#include "oag/errors.hpp"
#include "oag/qe.hpp"

using namespace oag;

namespace {
GroupSpec G(const char* s) { return GroupSpec::parse(s); }
bool dec(const char* g, const char* s) { return decide(G(g), parse(G(g), s)); }
bool eqv(const char* g, const char* a, const char* b) { return equivalent(G(g), parse(G(g), a), parse(G(g), b)); }
}  // namespace

TEST(Qe, EvenIsCongruence) {
    auto z = G("Z");
    auto r = eliminate(z, parse(z, "(exists (y) (= x (* 2 y)))"));
    EXPECT_EQ(scalar::print(r), "(congr 2 x.1 0)");
}

TEST(Qe, Z2StrictBounds) {
    EXPECT_TRUE(eqv("Z*Z", "(exists (y) (and (< (c 0 1) y) (< y x)))", "(< (c 0 2) x)"));
}

TEST(Qe, NoEvenPointInTheInterval) {
    EXPECT_FALSE(dec("Z*Z", "(exists (x) (and (< (c 1 -1) (* 2 x)) (< (* 2 x) (c 1 4))))"));
    EXPECT_TRUE(dec("Z*Z", "(exists (x) (and (< (c 1 -1) (* 2 x)) (< (* 2 x) (c 2 4))))"));
}

TEST(Qe, Density) {
    const char* dense = "(forall (x) (forall (y) (implies (< x y) (exists (z) (and (< x z) (< z y))))))";
    EXPECT_TRUE(dec("Q", dense));
    EXPECT_FALSE(dec("Z", dense));
    EXPECT_TRUE(dec("Z*Q", "(exists (x) (and (< (c 0 0) x) (< x (c 0 1/1000))))"));
    EXPECT_FALSE(dec("Z*Z", "(exists (x) (= (* 2 x) (c 1 1)))"));
    EXPECT_TRUE(dec("Q*Q", "(exists (x) (= (* 2 x) (c 1 1)))"));
}

TEST(Qe, ShiftedBound) {
    for (const char* b : {"(c 1 -3)", "(c 1 0)", "(c 1 7)"}) {
        std::string alt = std::string("(<= ") + b + " (* 2 z))";
        EXPECT_TRUE(eqv("Z*Z", "(<= (c 1 1) (* 2 z))", alt.c_str())) << b;
    }
    EXPECT_TRUE(eqv("Z", "(< (c 0) x)", "(<= (c 1) x)"));
    EXPECT_FALSE(eqv("Q", "(< (c 0) x)", "(<= (c 1) x)"));
}

TEST(Qe, Relativized) {
    EXPECT_TRUE(dec("Z*Q", "(forall (x) (exists (y) (and (eq@ 1 x y) (< x y))))"));
    EXPECT_TRUE(dec("Z*Z", "(forall (x) (iff (insub 1 x) (= x (* 0 x))))") == false);
    EXPECT_TRUE(dec("Z*Z", "(forall (x) (or (congr@ 1 2 x (c 0 0)) (congr@ 1 2 x (c 1 0))))"));
}

TEST(Qe, Witness) {
    auto z = G("Z");
    auto w = witness(z, parse(z, "(exists (x) (and (< (c 5) x) (congr 3 x (c 1))))"));
    ASSERT_TRUE(w);
    EXPECT_EQ(w->coords[0], Rational(7));
    auto z2 = G("Z*Z");
    auto w2 = witness(z2, parse(z2, "(<= (c 1 1) (* 2 x))"));
    ASSERT_TRUE(w2);
    EXPECT_GE(w2->coords[0], Rational(1));
    EXPECT_FALSE(witness(z, parse(z, "(and (< x (c 0)) (< (c 0) x))")));
    auto q = G("Z*Q");
    auto w3 = witness(q, parse(q, "(and (< (c 2 1/3) x) (< x (c 2 1/2)))"));
    ASSERT_TRUE(w3);
    EXPECT_EQ(w3->coords[0], Rational(2));
}

TEST(Qe, DecideRejectsOpenFormulas) {
    auto z = G("Z");
    EXPECT_THROW(decide(z, parse(z, "(< x (c 0))")), DomainError);
}

TEST(Qe, BudgetIsEnforced) {
    auto z = G("Z");
    QeOptions tiny;
    tiny.node_budget = 5;
    EXPECT_THROW(decide(z, parse(z, "(exists (x) (exists (y) (and (congr 6 x y) (< x (* 3 y)) (congr 5 (+ x y) (c 1)))))"), tiny),
                 ResourceError);
}
