#pragma once

// Normal forms for unary definable sets.
//
// CanonicalSet is a presentation-independent description of a subset of the
// group: coordinate by coordinate, the values of the current coordinate are
// partitioned into points/intervals (dense) or into a finite middle part with
// two eventually periodic tails (discrete), each part labelled by the set of
// remaining coordinates. Equal sets give identical keys.

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "oag/formula.hpp"
#include "oag/qe.hpp"

namespace oag {

struct CNode;
using CNodeP = std::shared_ptr<const CNode>;

struct CNode {
    enum class Type { Leaf, Discrete, Dense };
    Type type = Type::Leaf;
    bool value = false;  // Leaf
    int level = 0;       // coordinate handled by this node (1-based)
    std::vector<CNodeP> children;  // distinct labels, sorted by key

    // Discrete: f(a) = children[label(a)].
    bool periodic = false;         // f periodic everywhere with period `left_period`
    Int left_period = 1;
    std::vector<int> left_pattern;  // indexed by a mod left_period, for a < left_start
    Int left_start = 0;             // first a where the left tail stops
    std::vector<int> middle;        // labels of [left_start, right_start) when nonempty
    Int right_start = 0;
    Int right_period = 1;
    std::vector<int> right_pattern;  // indexed by a mod right_period, for a >= right_start

    // Dense: points p_1 < ... < p_m and 2m+1 labels (segment, point, segment, ...).
    std::vector<Rational> points;
    std::vector<int> labels;

    std::string key;

    int label_at(const Rational& a) const;
    bool contains(const Element& e) const;
};

/// Canonical form of the set defined by the unary formula.
CNodeP canonical_set(const GroupSpec& g, const FormulaPtr& phi, const QeOptions& opts = {});
/// Same, from a quantifier-free scalar formula in coordinates var.1 .. var.n.
CNodeP canonical_set(const GroupSpec& g, const scalar::NodeP& qf, const std::string& var);

enum class Direction { End, Initial };
enum class Bound { Finite, MinusInf, PlusInf };

/// {x : n*x + D_k >= beta + D_k} (End) or the dual with <= / < (Initial).
/// Markers: End with MinusInf is the whole group, End with PlusInf is empty;
/// Initial with PlusInf is the whole group, Initial with MinusInf is empty.
struct DivSegment {
    Direction direction = Direction::End;
    Int n = 1;
    int level = 0;
    Bound bound = Bound::MinusInf;
    Element beta;
    bool strict = false;  // > (End) or < (Initial)

    bool is_whole() const;
    bool is_empty() const;
    friend bool operator==(const DivSegment&, const DivSegment&) = default;
};

struct CongruenceLiteral {
    bool positive = true;
    Int z = 1;
    int level = 0;
    Int modulus = 2;
    Element beta;
    Int offset = 0;
    friend bool operator==(const CongruenceLiteral&, const CongruenceLiteral&) = default;
};

struct NiceSet {
    DivSegment upper;  // End
    DivSegment lower;  // Initial
    std::vector<CongruenceLiteral> congr;
    friend bool operator==(const NiceSet&, const NiceSet&) = default;
};

std::string describe(const DivSegment& s);
std::string describe(const NiceSet& s);

FormulaPtr to_formula(const GroupSpec& g, const DivSegment& s, const std::string& var = "x");
FormulaPtr to_formula(const GroupSpec& g, const CongruenceLiteral& l, const std::string& var = "x");
FormulaPtr to_formula(const GroupSpec& g, const NiceSet& s, const std::string& var = "x");
FormulaPtr to_formula(const GroupSpec& g, const std::vector<NiceSet>& sets, const std::string& var = "x");

/// The variable of a unary formula; throws ArityError otherwise.
std::string unary_var(const FormulaPtr& phi);

std::vector<NiceSet> nice_decompose(const GroupSpec& g, const FormulaPtr& phi, const QeOptions& opts = {});
std::vector<NiceSet> nice_decompose(const GroupSpec& g, const CNodeP& set);

bool is_end_segment(const GroupSpec& g, const FormulaPtr& phi, const QeOptions& opts = {});
bool is_initial_segment(const GroupSpec& g, const FormulaPtr& phi, const QeOptions& opts = {});
bool has_minimum(const GroupSpec& g, const FormulaPtr& phi, const QeOptions& opts = {});
std::optional<Element> minimum(const GroupSpec& g, const FormulaPtr& phi, const QeOptions& opts = {});

/// {x : exists y <= x with phi(y)}; requires phi satisfiable without minimum.
FormulaPtr end_hull(const GroupSpec& g, const FormulaPtr& phi, const QeOptions& opts = {});
/// The same set without the precondition checks.
FormulaPtr upward_closure(const FormulaPtr& phi);

ConvexSubgroup stabilizer(const GroupSpec& g, const FormulaPtr& phi, const QeOptions& opts = {});

/// Divisibility form of an end-segment (or, dually, of an initial segment).
DivSegment to_div_segment(const GroupSpec& g, const FormulaPtr& phi, const QeOptions& opts = {});

}  // namespace oag
