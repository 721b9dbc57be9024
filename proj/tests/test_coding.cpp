#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "oag/coding.hpp"
#include "oag/errors.hpp"
#include "oag/oracle.hpp"

using namespace oag;

namespace {
GroupSpec G(const char* s) { return GroupSpec::parse(s); }
}  // namespace

TEST(Coding, Segments) {
    auto z = G("Z");
    auto c = code_segment(z, to_div_segment(z, parse(z, "(<= (c 4) x)")));
    ASSERT_EQ(c.values.size(), 1u);
    EXPECT_EQ(c.values[0], CodeValue::of(Element({Rational(4)})));
    EXPECT_TRUE(equivalent(z, reconstruct(z, c), parse(z, "(<= (c 4) x)")));

    auto z2 = G("Z*Z");
    DivSegment two{Direction::End, 2, 1, Bound::Finite, Element({Rational(1), Rational(1)}), false};
    auto c2 = code_segment(z2, two);
    ASSERT_EQ(c2.values.size(), 1u);
    EXPECT_EQ(c2.values[0], CodeValue::of(QuotientElement{1, {Rational(1)}}));
    EXPECT_TRUE(equivalent(z2, reconstruct(z2, c2), parse(z2, "(<= (c 1 1) (* 2 x))")));

    DivSegment whole{Direction::End, 1, 0, Bound::MinusInf, Element::zero(z2), false};
    EXPECT_EQ(code_segment(z2, whole).values[0], CodeValue::of(Marker::WholeGroup));

    auto init = to_div_segment(z2, parse(z2, "(< x (c 3 -2))"));
    EXPECT_TRUE(equivalent(z2, reconstruct(z2, code_segment(z2, init)), parse(z2, "(< x (c 3 -2))")));
    auto q = G("Q");
    auto half = parse(q, "(< (c 1) (* 2 x))");
    EXPECT_TRUE(equivalent(q, reconstruct(q, code_segment(q, to_div_segment(q, half))), half));
}

TEST(Coding, SetsAreCanonical) {
    auto z2 = G("Z*Z");
    auto base = code_set(z2, parse(z2, "(<= (c 1 1) (* 2 z))"));
    for (int b : {-5, 0, 1, 9}) {
        auto phi = parse(z2, "(<= (c 1 " + std::to_string(b) + ") (* 2 z))");
        EXPECT_EQ(code_set(z2, phi), base) << b;
    }
    EXPECT_EQ(stabilizer(z2, parse(z2, "(<= (c 1 1) (* 2 z))")).level, 1);

    auto z = G("Z");
    auto c = code_set(z, parse(z, "(and (< (c 5) x) (congr 3 x (c 1)))"));
    EXPECT_EQ(c, code_set(z, parse(z, "(and (< (c 6) x) (congr 3 x (c -2)))")));
    ASSERT_EQ(c.values.size(), 3u);
    EXPECT_EQ(c.values[1], CodeValue::of(Marker::PlusInf));
    EXPECT_EQ(c.values[2], CodeValue::of(FiniteQuotientElement{1, 3, {1}}));
    EXPECT_TRUE(equivalent(z, reconstruct(z, c), parse(z, "(and (< (c 5) x) (congr 3 x (c 1)))")));

    auto empty = code_set(z, parse(z, "(and (< x (c 0)) (< (c 0) x))"));
    ASSERT_EQ(empty.values.size(), 1u);
    EXPECT_EQ(empty.values[0], CodeValue::of(Marker::Empty));
    EXPECT_TRUE(equivalent(z, reconstruct(z, empty), parse(z, "false")));
}

TEST(Coding, RoundTripOverCorpus) {
    for (const char* gs : {"Z", "Q", "Z*Z", "Z*Q", "Q*Z"}) {
        auto g = G(gs);
        FuzzLimits lim;
        auto corpus = fuzz_corpus(g, 5, 20, lim, Template::Mixed);
        for (const auto& phi : corpus) {
            if (free_vars(phi).size() != 1) continue;
            auto c = code_set(g, phi);
            auto back = reconstruct(g, c, unary_var(phi));
            EXPECT_TRUE(equivalent(g, back, phi)) << gs << " " << print(phi);
            EXPECT_EQ(code_set(g, back), c) << gs << " " << print(phi);
            EXPECT_EQ(code_from_json(to_json(c)), c);
        }
    }
}

TEST(Coding, MalformedCodes) {
    auto z = G("Z");
    Code bad{"set 1 end.min whole", {CodeValue::of(Element({Rational(1)}))}};
    EXPECT_THROW(reconstruct(z, bad), DomainError);
    EXPECT_THROW(reconstruct(z, Code{"seg end.min", {}}), DomainError);
    EXPECT_THROW(code_from_json("{\"version\":\"code-v0\"}"), DomainError);
}

TEST(Coding, FiniteSets) {
    auto z2 = G("Z*Z");
    using Q = QuotientElement;
    auto c = code_finite_set(z2, {{Q{1, {3}}}, {Q{1, {1}}}});
    ASSERT_EQ(c.values.size(), 2u);
    EXPECT_EQ(c.values[0], CodeValue::of(Q{1, {1}}));
    auto d = code_finite_set(z2, {{Q{2, {1, 0}}}, {Q{2, {0, 9}}}});
    EXPECT_EQ(d.values[0], CodeValue::of(Q{2, {0, 9}}));
    EXPECT_THROW(code_finite_set(z2, {{Q{1, {3}}}, {Q{2, {1, 0}}}}), DomainError);

    std::mt19937_64 rng(3);
    std::vector<std::vector<Q>> tuples;
    for (int i = 0; i < 6; ++i)
        tuples.push_back({Q{2, {Rational(static_cast<Int>(rng() % 5)), Rational(static_cast<Int>(rng() % 5))}}, Q{1, {Rational(i)}}});
    auto ref = code_finite_set(z2, tuples);
    for (int i = 0; i < 10; ++i) {
        std::shuffle(tuples.begin(), tuples.end(), rng);
        EXPECT_EQ(code_finite_set(z2, tuples), ref);
    }

    EXPECT_EQ(enumerate_finite_quotient(z2, 1, 2).size(), 2u);
    EXPECT_EQ(enumerate_finite_quotient(z2, 0, 5).size(), 1u);
    EXPECT_EQ(enumerate_finite_quotient(G("Q*Q"), 2, 4).size(), 1u);
    EXPECT_EQ(enumerate_finite_quotient(G("Z*Q*Z"), 3, 3).size(), 9u);
}

TEST(Coding, Types) {
    auto z = G("Z");
    TypeDescriptor p;
    p.cut = CutKind::PlusInf;
    p.residue_bound = 6;
    p.coset.assign(2, std::nullopt);
    for (Int l = 2; l <= 6; ++l) p.residues[{1, l}] = FiniteQuotientElement{1, l, {0}};
    auto c = code_type(z, p);
    ASSERT_EQ(c.values.size(), 6u);
    EXPECT_EQ(c.values[0], CodeValue::of(Marker::PlusInf));
    EXPECT_EQ(c.values[5], CodeValue::of(FiniteQuotientElement{1, 6, {0}}));

    p.residues[{1, 4}] = FiniteQuotientElement{1, 4, {1}};
    EXPECT_FALSE(residues_coherent(z, p));
    EXPECT_THROW(code_type(z, p), DomainError);

    TypeDescriptor r;
    r.cut = CutKind::Realized;
    r.realized = Element({Rational(5)});
    EXPECT_EQ(code_type(z, r).values, std::vector<CodeValue>{CodeValue::of(Element({Rational(5)}))});
}
