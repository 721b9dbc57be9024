#pragma once

// Brute-force semantics, independent of the eliminator: direct evaluation in
// the group, finite expansion of bounded quantifiers, point boxes, and a
// seeded formula generator.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "oag/formula.hpp"

namespace oag {

using GroupAssignment = std::map<std::string, Element>;

Element eval_term(const GroupSpec& g, const Term& t, const GroupAssignment& a);
bool eval_atom(const GroupSpec& g, const Atom& at, const GroupAssignment& a);

/// Truth of a quantifier-free formula.
bool evaluate(const GroupSpec& g, const FormulaPtr& f, const GroupAssignment& a);

/// Truth of a formula whose quantifiers are all bounded, i.e. of the shapes
///   (exists (v) (and R ψ ...))   and   (forall (v) (implies R ψ))
/// where R is (and (<= L v) (<= v U)) or an `or` of such, L and U constants
/// that agree on all but the last coordinate. DiscreteZ groups only.
bool expand_bounded(const GroupSpec& g, const FormulaPtr& f, const GroupAssignment& a);

struct Box {
    Int bound = 8;
    std::size_t cap = 5'000'000;
};

/// Number of points of the box in g^arity.
std::size_t box_size(const GroupSpec& g, const Box& b, int arity = 1);
/// All elements of g inside the box, in lexicographic order.
std::vector<Element> box_points(const GroupSpec& g, const Box& b);

enum class Template {
    Mixed,         // a blend of everything below
    Arbitrary,     // unary formulas, possibly with unbounded quantifiers
    Bounded,       // bounded quantifiers only (for differential elimination)
    EndSegment,    // upward closures (exists (y) (and (<= y x) ψ))
    Congruence,    // congruence-heavy unary formulas
    Relativized,   // atoms relativized at every level
};

struct FuzzLimits {
    Int max_coeff = 3;
    Int max_modulus = 6;
    int max_depth = 3;
    Int window = 2;        // radius of bounded-quantifier ranges
    Int max_const = 6;     // range of constant entries
    int free_vars = 1;     // number of free variables (x, y, ...)
    int max_quantifiers = 2;
};

std::vector<FormulaPtr> fuzz_corpus(const GroupSpec& g, std::uint64_t seed, std::size_t count,
                                    const FuzzLimits& lim = {}, Template t = Template::Mixed);

}  // namespace oag
