#pragma once

// First-order syntax over a GroupSpec: linear terms, Presburger atoms,
// atoms relativized to the convex subgroups Delta^(k), and quantifiers over
// the main sort.

#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "oag/group.hpp"

namespace oag {

/// Sum of integer multiples of main-sort variables plus a constant element.
struct Term {
    std::map<std::string, Int> coeffs;  // no zero entries
    Element constant;

    static Term var(const GroupSpec& g, const std::string& name);
    static Term constant_of(Element e);

    bool is_constant() const { return coeffs.empty(); }
    Term operator-() const;
    friend Term operator+(const Term& a, const Term& b);
    friend Term operator-(const Term& a, const Term& b);
    friend Term operator*(Int s, const Term& t);
    friend bool operator==(const Term&, const Term&) = default;
};

enum class Rel { Lt, Le, Eq };

struct Atom {
    enum class Kind { Cmp, Congr, RelCmp, RelCongr, RelEq };
    Kind kind = Kind::Cmp;
    Rel rel = Rel::Lt;  // Cmp / RelCmp
    int level = 0;      // RelCmp / RelCongr / RelEq
    Int modulus = 0;    // Congr / RelCongr
    Term lhs;
    Term rhs;

    static Atom cmp(Rel r, Term a, Term b);
    static Atom congr(Int m, Term a, Term b);
    static Atom rel_cmp(int k, Rel r, Term a, Term b);
    static Atom rel_congr(int k, Int m, Term a, Term b);
    static Atom rel_eq(int k, Term a, Term b);
    friend bool operator==(const Atom&, const Atom&) = default;
};

struct Formula;
using FormulaPtr = std::shared_ptr<const Formula>;

struct Formula {
    enum class Op { True, False, Atom, Not, And, Or, Implies, Iff, Exists, Forall };
    Op op = Op::True;
    oag::Atom atom;                // Op::Atom
    std::vector<FormulaPtr> kids;  // connectives; the body for quantifiers
    std::string var;               // quantifiers
};

// Builders. And/Or flatten nested conjunctions/disjunctions.
FormulaPtr f_true();
FormulaPtr f_false();
FormulaPtr f_atom(Atom a);
FormulaPtr f_not(FormulaPtr a);
FormulaPtr f_and(std::vector<FormulaPtr> kids);
FormulaPtr f_or(std::vector<FormulaPtr> kids);
FormulaPtr f_implies(FormulaPtr a, FormulaPtr b);
FormulaPtr f_iff(FormulaPtr a, FormulaPtr b);
FormulaPtr f_exists(std::string v, FormulaPtr body);
FormulaPtr f_forall(std::string v, FormulaPtr body);

// Atom shorthands.
FormulaPtr f_lt(Term a, Term b);
FormulaPtr f_le(Term a, Term b);
FormulaPtr f_eq(Term a, Term b);

/// Parses the s-expression grammar; bound variables that shadow an enclosing
/// binder or a free variable are alpha-renamed.
FormulaPtr parse(const GroupSpec& g, const std::string& text);
Term parse_term(const GroupSpec& g, const std::string& text);

std::string print(const FormulaPtr& f);
std::string print(const Term& t);

std::set<std::string> free_vars(const FormulaPtr& f);
/// All variable names occurring anywhere (free or bound).
std::set<std::string> all_vars(const FormulaPtr& f);
/// Capture-avoiding substitution of `t` for the free occurrences of `var`.
FormulaPtr substitute(const FormulaPtr& f, const std::string& var, const Term& t);
bool is_quantifier_free(const FormulaPtr& f);
/// A name not in `used`, derived from `base`.
std::string fresh_name(const std::string& base, const std::set<std::string>& used);

/// Universal closure over the free variables (sorted by name).
FormulaPtr universal_closure(const FormulaPtr& f);
FormulaPtr existential_closure(const FormulaPtr& f);

}  // namespace oag
