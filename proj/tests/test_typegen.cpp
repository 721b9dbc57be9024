#include <gtest/gtest.h>

#include "oag/errors.hpp"
#include "oag/oracle.hpp"
#include "oag/typegen.hpp"

using namespace oag;

namespace {
GroupSpec G(const char* s) { return GroupSpec::parse(s); }
}  // namespace

TEST(Typegen, WholeLineDescendsGenerically) {
    auto z = G("Z");
    auto phi = parse(z, "true");
    auto p = generic_type(z, phi, 4);
    EXPECT_EQ(p.cut, CutKind::MinusInf);
    ASSERT_EQ(p.residues.size(), 3u);
    for (Int l = 2; l <= 4; ++l) EXPECT_EQ(p.residues.at({1, l}).residues, std::vector<Int>{0});
    EXPECT_TRUE(check_descriptor(z, p, phi));
}

TEST(Typegen, MinimumIsRealized) {
    auto z = G("Z");
    auto phi = parse(z, "(and (< (c 5) x) (congr 3 x (c 1)))");
    auto p = generic_type(z, phi, 6);
    EXPECT_EQ(p.cut, CutKind::Realized);
    EXPECT_EQ(p.realized, Element({Rational(7)}));
    EXPECT_TRUE(check_descriptor(z, p, phi));
    p.realized = Element({Rational(6)});
    EXPECT_FALSE(check_descriptor(z, p, phi));
}

TEST(Typegen, CosetThenGenericFiber) {
    auto g = G("Z*Z");
    auto phi = parse(g, "(<= (c 1 1) (* 2 x))");
    std::vector<StageState> trace;
    auto p = generic_type(g, phi, 3, {}, &trace);
    EXPECT_EQ(p.cut, CutKind::AtSegment);
    ASSERT_TRUE(p.coset[1]);
    EXPECT_EQ(p.coset[1]->coords, std::vector<Rational>{Rational(1)});
    EXPECT_FALSE(p.coset[2]);
    EXPECT_TRUE(check_descriptor(g, p, phi));
    for (std::size_t i = 1; i < trace.size(); ++i) EXPECT_TRUE(entails(g, trace[i].fragment, trace[i - 1].fragment));
    EXPECT_EQ(generic_type(g, phi, 3), p);
}

TEST(Typegen, OddNumbersBelow) {
    auto g = G("Z*Q");
    auto phi = parse(g, "(and (< x (c 4 0)) (congr 2 x (c 1 0)))");
    auto p = generic_type(g, phi, 4);
    EXPECT_EQ(p.cut, CutKind::MinusInf);
    EXPECT_EQ(p.residues.at({1, 2}).residues, std::vector<Int>{1});
    EXPECT_EQ(p.residues.at({1, 4}).residues[0] % 2, 1);
    EXPECT_TRUE(check_descriptor(g, p, phi));
}

TEST(Typegen, BadDescriptors) {
    auto z = G("Z");
    auto phi = parse(z, "true");
    auto p = generic_type(z, phi, 4);
    p.residues[{1, 2}] = FiniteQuotientElement{1, 2, {1}};
    EXPECT_FALSE(check_descriptor(z, p, phi));
    auto odd = parse(z, "(congr 2 x (c 1))");
    auto q = generic_type(z, parse(z, "(congr 2 x (c 0))"), 4);
    EXPECT_FALSE(check_descriptor(z, q, odd));
    EXPECT_THROW(generic_type(z, parse(z, "false"), 4), DomainError);
}

TEST(Typegen, Corpus) {
    for (const char* gs : {"Z", "Q", "Z*Z", "Q*Z"}) {
        auto g = G(gs);
        auto corpus = fuzz_corpus(g, 9, 12, FuzzLimits{}, Template::Mixed);
        for (const auto& phi : corpus) {
            if (free_vars(phi).size() != 1 || !satisfiable(g, phi)) continue;
            auto p = generic_type(g, phi, 4);
            EXPECT_TRUE(check_descriptor(g, p, phi)) << gs << " " << print(phi);
        }
    }
}
