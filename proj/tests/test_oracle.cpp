#include <gtest/gtest.h>

#include "oag/errors.hpp"
#include "oag/oracle.hpp"
#include "oag/qe.hpp"

using namespace oag;

namespace {
GroupSpec G(const char* s) { return GroupSpec::parse(s); }
Element el(std::initializer_list<Rational> c) { return Element(std::vector<Rational>(c)); }
}  // namespace

TEST(Oracle, Evaluate) {
    auto z2 = G("Z*Z");
    EXPECT_TRUE(evaluate(z2, parse(z2, "(< (c 1 -1) (* 2 x))"), {{"x", el({1, 0})}}));
    EXPECT_TRUE(evaluate(z2, parse(z2, "(congr@ 1 2 x b)"), {{"x", el({3, 4})}, {"b", el({1, 0})}}));
    auto q = G("Q");
    EXPECT_TRUE(evaluate(q, parse(q, "(congr 3 x (c 0))"), {{"x", el({Rational(1, 2)})}}));
    EXPECT_THROW(evaluate(q, parse(q, "(< x y)"), {{"x", el({1})}}), DomainError);
}

TEST(Oracle, ExpandBounded) {
    auto z = G("Z");
    EXPECT_TRUE(expand_bounded(z, parse(z, "(exists (x) (and (<= (c 0) x) (<= x (c 5)) (congr 3 x (c 1))))"), {}));
    EXPECT_TRUE(expand_bounded(z, parse(z, "(forall (x) (implies (and (<= (c 0) x) (<= x (c 3))) (< x (c 5))))"), {}));
    EXPECT_THROW(expand_bounded(z, parse(z, "(exists (x) (< x (c 0)))"), {}), DomainError);
    auto z2 = G("Z*Z");
    std::string box = "(or";
    for (int a = -10; a <= 10; ++a)
        box += " (and (<= (c " + std::to_string(a) + " -10) x) (<= x (c " + std::to_string(a) + " 10)))";
    box += ")";
    auto f = parse(z2, "(exists (x) (and " + box + " (< (c 1 -1) (* 2 x)) (< (* 2 x) (c 1 4))))");
    EXPECT_FALSE(expand_bounded(z2, f, {}));
    EXPECT_THROW(expand_bounded(z2, parse(z2, "(exists (x) (and (<= (c 0 0) x) (<= x (c 1 0)) (< x x)))"), {}),
                 DomainError);
    auto q = G("Q");
    EXPECT_THROW(expand_bounded(q, parse(q, "(exists (x) (and (<= (c 0) x) (<= x (c 1)) (< x x)))"), {}),
                 DomainError);
}

TEST(Oracle, Boxes) {
    EXPECT_EQ(box_size(G("Z*Z"), Box{2}), 25u);
    EXPECT_EQ(box_points(G("Z*Z"), Box{1}).size(), 9u);
    Box tiny{8, 10};
    EXPECT_THROW(box_points(G("Z*Z"), tiny), ResourceError);
    auto q = box_points(G("Q"), Box{2});
    EXPECT_EQ(q.size(), 7u);  // -2 -1 -1/2 0 1/2 1 2
}

TEST(Oracle, CorpusIsDeterministic) {
    auto g = G("Z*Z");
    auto a = fuzz_corpus(g, 1, 3), b = fuzz_corpus(g, 1, 3);
    ASSERT_EQ(a.size(), 3u);
    for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(print(a[i]), print(b[i]));
    FuzzLimits flat;
    flat.max_depth = 0;
    for (const auto& f : fuzz_corpus(g, 9, 20, flat, Template::Relativized))
        EXPECT_EQ(f->op, Formula::Op::Atom);
}

TEST(Oracle, DifferentialSmall) {
    for (const char* spec : {"Z", "Z*Z", "Z*Z*Z"}) {
        auto g = G(spec);
        FuzzLimits lim;
        lim.free_vars = g.rank() == 1 ? 2 : 1;
        auto corpus = fuzz_corpus(g, 42, 30, lim, Template::Bounded);
        Box box{g.rank() == 3 ? 3 : 5};
        auto pts = box_points(g, box);
        for (const auto& f : corpus) {
            auto qf = eliminate(g, f);
            auto fv = free_vars(f);
            std::vector<std::string> names(fv.begin(), fv.end());
            std::vector<std::size_t> idx(names.size(), 0);
            while (true) {
                GroupAssignment a;
                for (std::size_t i = 0; i < names.size(); ++i) a[names[i]] = pts[idx[i]];
                bool want = expand_bounded(g, f, a);
                bool got = scalar::evaluate(qf, scalar::scalarize(a));
                ASSERT_EQ(want, got) << spec << " " << print(f);
                std::size_t i = 0;
                while (i < idx.size() && ++idx[i] == pts.size()) idx[i++] = 0;
                if (i == idx.size()) break;
            }
        }
    }
}
