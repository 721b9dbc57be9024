#include <gtest/gtest.h>

#include "oag/errors.hpp"
#include "oag/normalize.hpp"
#include "oag/oracle.hpp"

using namespace oag;

namespace {
GroupSpec G(const char* s) { return GroupSpec::parse(s); }

void expect_union_matches(const GroupSpec& g, const FormulaPtr& phi) {
    auto sets = nice_decompose(g, phi);
    auto back = to_formula(g, sets, unary_var(phi));
    EXPECT_TRUE(equivalent(g, phi, back)) << print(phi) << "\n  vs " << print(back);
}
}  // namespace

TEST(Normalize, CanonicalKeysIgnorePresentation) {
    auto g = G("Z*Q");
    auto a = canonical_set(g, parse(g, "(and (lt@ 1 (c 1 0) x) (not (= x (c 3 1))))"));
    auto b = canonical_set(g, parse(g, "(or (and (lt@ 1 (c 1 0) x) (< x (c 3 1))) (< (c 3 1) x))"));
    EXPECT_EQ(a->key, b->key);
    auto c = canonical_set(g, parse(g, "(< (c 1 0) x)"));
    EXPECT_NE(a->key, c->key);
}

TEST(Normalize, ContainsAgreesWithFormula) {
    auto g = G("Z*Z");
    auto phi = parse(g, "(or (and (< (c 0 3) (* 2 x)) (congr 3 x (c 1 0))) (= x (c -1 -1)))");
    auto set = canonical_set(g, phi);
    for (const auto& e : box_points(g, Box{4})) EXPECT_EQ(set->contains(e), evaluate(g, phi, {{"x", e}})) << e.str();
}

TEST(Normalize, LeftTailAndCongruence) {
    auto g = G("Z");
    auto phi = parse(g, "(and (< (c 5) x) (congr 3 x (c 1)))");
    auto sets = nice_decompose(g, phi);
    ASSERT_EQ(sets.size(), 1u);
    EXPECT_EQ(sets[0].upper.beta, Element({Rational(7)}));
    EXPECT_TRUE(sets[0].lower.is_whole());
    ASSERT_EQ(sets[0].congr.size(), 1u);
    EXPECT_EQ(sets[0].congr[0].modulus, 3);
    EXPECT_EQ(sets[0].congr[0].beta, Element({Rational(1)}));
    expect_union_matches(g, phi);
}

TEST(Normalize, MixedFibers) {
    auto g = G("Q*Z");
    auto phi = parse(g, "(or (and (lt@ 1 (c 0 0) x) (< x (c 1 3))) (congr 2 x (c 0 1)))");
    auto sets = nice_decompose(g, phi);
    EXPECT_EQ(sets.size(), 5u);
    expect_union_matches(g, phi);
}

TEST(Normalize, UnionOverCorpus) {
    for (const char* gs : {"Z", "Q", "Z*Z", "Z*Q", "Q*Z"}) {
        auto g = G(gs);
        FuzzLimits lim;
        lim.free_vars = 1;
        auto corpus = fuzz_corpus(g, 11, 25, lim, Template::Mixed);
        int done = 0;
        for (const auto& phi : corpus) {
            if (free_vars(phi).size() != 1) continue;
            try {
                expect_union_matches(g, phi);
                ++done;
            } catch (const DomainError&) {
            }
        }
        EXPECT_GT(done, 10) << gs;
    }
}

TEST(Normalize, Segments) {
    auto z = G("Z");
    EXPECT_TRUE(is_end_segment(z, parse(z, "(<= (c 4) x)")));
    EXPECT_FALSE(is_end_segment(z, parse(z, "(congr 2 x (c 0))")));
    EXPECT_TRUE(is_initial_segment(z, parse(z, "(< x (c 4))")));
    EXPECT_EQ(minimum(z, parse(z, "(<= (c 4) x)")), Element({Rational(4)}));
    auto q = G("Q");
    EXPECT_FALSE(has_minimum(q, parse(q, "(< (c 1) (* 2 x))")));
    EXPECT_THROW(end_hull(q, parse(q, "false"), {}), DomainError);
    EXPECT_THROW(end_hull(z, parse(z, "(<= (c 4) x)"), {}), DomainError);
    auto hull = end_hull(q, parse(q, "(and (< (c 1) x) (< x (c 2)))"));
    EXPECT_TRUE(equivalent(q, hull, parse(q, "(< (c 1) x)")));
}

TEST(Normalize, DivSegments) {
    auto g = G("Z*Z");
    auto phi = parse(g, "(<= (c 1 1) (* 2 x))");
    EXPECT_EQ(stabilizer(g, phi).level, 1);
    auto d = to_div_segment(g, phi);
    EXPECT_EQ(d.direction, Direction::End);
    EXPECT_EQ(d.level, 1);
    EXPECT_EQ(d.beta, Element({Rational(1), Rational(0)}));
    EXPECT_TRUE(equivalent(g, phi, to_formula(g, d)));

    auto psi = parse(g, "(< x (c 2 5))");
    auto e = to_div_segment(g, psi);
    EXPECT_EQ(e.direction, Direction::Initial);
    EXPECT_EQ(e.level, 2);
    EXPECT_TRUE(equivalent(g, psi, to_formula(g, e)));

    auto t = to_div_segment(g, parse(g, "true"));
    EXPECT_TRUE(t.is_whole());
    auto f = to_div_segment(g, parse(g, "false"));
    EXPECT_TRUE(f.is_empty());

    auto q = G("Q*Q");
    auto r = parse(q, "(< (c 0 1/2) x)");
    auto rd = to_div_segment(q, r);
    EXPECT_TRUE(rd.strict);
    EXPECT_EQ(rd.level, 2);
    EXPECT_TRUE(equivalent(q, r, to_formula(q, rd)));
    EXPECT_THROW(to_div_segment(q, parse(q, "(= x (c 0 0))")), DomainError);
}
