#pragma once

// Coordinate-level formulas. A group variable x of rank n lowers to scalar
// variables "x.1" .. "x.n"; every scalar atom lives in a single coordinate
// sort (Z or Q). This is the representation the eliminator works on.

#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "oag/formula.hpp"
#include "oag/group.hpp"

namespace oag::scalar {

using Assignment = std::map<std::string, Rational>;

struct Lin {
    std::map<std::string, Rational> coeffs;  // no zero entries
    Rational constant;

    static Lin var(const std::string& name, Rational c = Rational(1));
    static Lin constant_of(Rational c);

    bool is_constant() const { return coeffs.empty(); }
    Rational coeff(const std::string& name) const;
    bool has(const std::string& name) const { return coeffs.count(name) != 0; }
    Lin without(const std::string& name) const;
    Lin substitute(const std::string& name, const Lin& value) const;
    Rational eval(const Assignment& a) const;
    std::string str() const;

    Lin operator-() const;
    friend Lin operator+(const Lin& a, const Lin& b);
    friend Lin operator-(const Lin& a, const Lin& b);
    friend Lin operator*(const Rational& s, const Lin& a);
    friend bool operator==(const Lin&, const Lin&) = default;
};

struct SAtom {
    enum class Type { Lt, Eq, Div, NDiv };  // e<0, e=0, m|e, not m|e
    Type type = Type::Lt;
    Kind sort = Kind::DiscreteZ;
    Lin e;
    Int modulus = 0;
};

struct Node;
using NodeP = std::shared_ptr<const Node>;

struct Node {
    enum class Op { True, False, Atom, Not, And, Or, Exists, Forall };
    Op op = Op::True;
    SAtom atom;
    std::vector<NodeP> kids;
    std::string var;  // quantifiers
    Kind sort = Kind::DiscreteZ;
    std::string key;  // canonical printed form
    std::size_t size = 1;
};

// Builders normalise: atoms are reduced (ground atoms fold to true/false),
// And/Or are flattened, sorted by key and deduplicated.
NodeP mk_true();
NodeP mk_false();
NodeP mk_atom(SAtom a);
NodeP mk_lt(Kind s, Lin e);
NodeP mk_eq(Kind s, Lin e);
NodeP mk_div(Int m, Lin e);
NodeP mk_not(NodeP a);
NodeP mk_and(std::vector<NodeP> kids);
NodeP mk_or(std::vector<NodeP> kids);
NodeP mk_exists(const std::string& v, Kind s, NodeP body);
NodeP mk_forall(const std::string& v, Kind s, NodeP body);

bool is_true(const NodeP& n);
bool is_false(const NodeP& n);
bool is_quantifier_free(const NodeP& n);

std::string print(const NodeP& n);
std::set<std::string> free_vars(const NodeP& n);
bool mentions(const NodeP& n, const std::string& var);

/// Negation normal form of a quantifier-free node; atoms only of types
/// Lt/Eq/Div/NDiv, no Not.
NodeP nnf(const NodeP& n, bool negate = false);

/// Quantifier-free simplification: atoms decided by the atoms of an enclosing
/// conjunction (or by the negated atoms of a sibling disjunct) fold away.
NodeP simplify(const NodeP& n);

/// Substitutes a linear expression for a scalar variable (quantifier-free input).
NodeP substitute(const NodeP& n, const std::string& var, const Lin& value);

/// Truth of a quantifier-free node; every free variable must be assigned.
bool evaluate(const NodeP& n, const Assignment& a);

/// "x.3" -> ("x", 3).
std::pair<std::string, int> split_name(const std::string& scalar);
std::string coord_name(const std::string& var, int i);
Kind sort_of(const GroupSpec& g, const std::string& scalar);

/// Rewrites a group-level formula into scalar coordinates.
NodeP lower(const GroupSpec& g, const FormulaPtr& f);
/// Scalar assignment of group-level values.
Assignment scalarize(const std::map<std::string, Element>& a);

}  // namespace oag::scalar
