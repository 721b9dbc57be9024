#include <gtest/gtest.h>

#include "oag/errors.hpp"
#include "oag/formula.hpp"
#include "oag/scalar.hpp"

using namespace oag;

TEST(Formula, ParseShapes) {
    auto z2 = GroupSpec::parse("Z*Z");
    auto f = parse(z2, "(exists (x) (= (* 2 x) (c 1 1)))");
    ASSERT_EQ(f->op, Formula::Op::Exists);
    EXPECT_EQ(f->kids[0]->atom.kind, Atom::Kind::Cmp);
    EXPECT_EQ(f->kids[0]->atom.rel, Rel::Eq);

    auto c = parse(z2, "(congr@ 1 2 x (c 1 0))");
    EXPECT_EQ(c->atom.kind, Atom::Kind::RelCongr);
    EXPECT_EQ(c->atom.level, 1);
    EXPECT_EQ(c->atom.modulus, 2);
}

TEST(Formula, Errors) {
    auto z2 = GroupSpec::parse("Z*Z");
    EXPECT_THROW(parse(z2, "(< x (c 1))"), ArityError);
    EXPECT_THROW(parse(z2, "(congr 1 x (c 0 0))"), DomainError);
    EXPECT_THROW(parse(z2, "(lt@ 3 x (c 0 0))"), DomainError);
    EXPECT_THROW(parse(z2, "(< x (c 1/2 0))"), ParseError);
    try {
        parse(z2, "(and (< x y)\n  (frob x))");
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 2);
        EXPECT_EQ(e.column(), 3);
    }
}

TEST(Formula, PrintParseFixpoint) {
    auto g = GroupSpec::parse("Z*Q");
    const char* texts[] = {
        "(and (< x (c 1 1/2)) (not (= y x)))",
        "(forall (x) (implies (le@ 1 x y) (exists (z) (congr 3 (+ x z) (c 0 0)))))",
        "(iff (insub 1 (- x y)) (eq@ 1 x y))",
        "(or true (< (* -2 x) (c -1 0)))",
    };
    for (const char* t : texts) {
        auto once = print(parse(g, t));
        EXPECT_EQ(print(parse(g, once)), once) << t;
    }
}

TEST(Formula, Substitute) {
    auto z = GroupSpec::parse("Z");
    auto f = parse(z, "(< x y)");
    auto t = parse_term(z, "(+ y (c 1))");
    EXPECT_EQ(print(substitute(f, "x", t)), "(< (+ y (c 1)) y)");
}

TEST(Formula, SubstituteAvoidsCapture) {
    auto z = GroupSpec::parse("Z");
    auto f = parse(z, "(exists (y) (< x y))");
    auto g = substitute(f, "x", parse_term(z, "y"));
    EXPECT_EQ(free_vars(g), (std::set<std::string>{"y"}));
    EXPECT_NE(g->var, "y");
}

TEST(Formula, FreeVarsAndAlphaRenaming) {
    auto z = GroupSpec::parse("Z");
    EXPECT_EQ(free_vars(parse(z, "(exists (x) (< x y))")), (std::set<std::string>{"y"}));
    auto f = parse(z, "(and (< x (c 0)) (exists (x) (exists (x) (= x (c 1)))))");
    EXPECT_EQ(free_vars(f), (std::set<std::string>{"x"}));
    auto inner = f->kids[1];
    EXPECT_NE(inner->var, "x");
    EXPECT_NE(inner->kids[0]->var, inner->var);
}

TEST(Lower, LexExpansion) {
    auto z2 = GroupSpec::parse("Z*Z");
    auto l = scalar::lower(z2, parse(z2, "(< x y)"));
    EXPECT_EQ(scalar::print(l),
              "(or (< (+ x.1 (* -1 y.1)) 0) (and (< (+ x.2 (* -1 y.2)) 0) (= (+ x.1 (* -1 y.1)) 0)))");
    auto c = scalar::lower(z2, parse(z2, "(congr@ 1 2 x (c 1 0))"));
    EXPECT_EQ(scalar::print(c), "(congr 2 x.1 1)");
    auto q = GroupSpec::parse("Q");
    EXPECT_TRUE(scalar::is_true(scalar::lower(q, parse(q, "(congr 3 x (c 0))"))));
}
