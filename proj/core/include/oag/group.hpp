#pragma once

// Concrete ordered abelian groups K_1 (+) ... (+) K_n with each K_i either Z or Q,
// ordered lexicographically (most significant coordinate first).

#include <compare>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "oag/arith.hpp"

namespace oag {

enum class Kind { DiscreteZ, DenseQ };

class GroupSpec {
public:
    GroupSpec() = default;
    explicit GroupSpec(std::vector<Kind> kinds) : kinds_(std::move(kinds)) {}

    /// Parses "Z*Z*Q"; "0" or "" is the trivial group.
    static GroupSpec parse(const std::string& text);
    std::string str() const;

    int rank() const noexcept { return static_cast<int>(kinds_.size()); }
    /// Kind of coordinate i, 1-based.
    Kind kind(int i) const { return kinds_.at(static_cast<std::size_t>(i - 1)); }
    const std::vector<Kind>& kinds() const noexcept { return kinds_; }
    /// Number of DiscreteZ coordinates among the first k.
    int discrete_count(int k) const;
    int discrete_count() const { return discrete_count(rank()); }
    bool all_discrete() const { return discrete_count() == rank(); }

    friend bool operator==(const GroupSpec&, const GroupSpec&) = default;

private:
    std::vector<Kind> kinds_;
};

struct Element {
    std::vector<Rational> coords;

    Element() = default;
    explicit Element(std::vector<Rational> c) : coords(std::move(c)) {}
    static Element zero(const GroupSpec& g);
    /// Unit vector e_i (1-based).
    static Element unit(const GroupSpec& g, int i);

    int arity() const noexcept { return static_cast<int>(coords.size()); }
    bool is_zero() const;
    std::string str() const;  // "(1,-1/2)"

    Element operator-() const;
    friend Element operator+(const Element& a, const Element& b);
    friend Element operator-(const Element& a, const Element& b);
    friend Element operator*(Int s, const Element& a);
    friend bool operator==(const Element&, const Element&) = default;
    /// Lexicographic; arities must agree.
    friend std::strong_ordering operator<=>(const Element& a, const Element& b);
};

/// Throws ArityError / DomainError unless `a` is a valid element of `g`.
void check_element(const GroupSpec& g, const Element& a);

struct ConvexSubgroup {
    int level = 0;  // Delta^(k): first k coordinates vanish
    friend bool operator==(const ConvexSubgroup&, const ConvexSubgroup&) = default;
    friend auto operator<=>(const ConvexSubgroup&, const ConvexSubgroup&) = default;
};

struct QuotientElement {
    int level = 0;
    std::vector<Rational> coords;  // length == level
    std::string str() const;
    friend bool operator==(const QuotientElement&, const QuotientElement&) = default;
    friend std::strong_ordering operator<=>(const QuotientElement& a, const QuotientElement& b);
};

struct FiniteQuotientElement {
    int level = 0;
    Int modulus = 2;
    std::vector<Int> residues;  // one per DiscreteZ coordinate among the first `level`
    std::string str() const;
    friend bool operator==(const FiniteQuotientElement&, const FiniteQuotientElement&) = default;
    friend auto operator<=>(const FiniteQuotientElement&, const FiniteQuotientElement&) = default;
};

enum class Ordering { LT, EQ, GT };

Ordering compare(const GroupSpec& g, const Element& a, const Element& b);

/// A(gamma) and B(gamma): the convex jump around a nonzero element.
std::pair<ConvexSubgroup, ConvexSubgroup> conv_jump(const GroupSpec& g, const Element& gamma);

/// Whether the lexicographic block K_from (+) ... (+) K_to is n-regular.
bool is_n_regular_block(const GroupSpec& g, int from, int to, Int n);

/// RJ_n(Gamma) as levels, finest (trivial subgroup) first.
std::vector<ConvexSubgroup> compute_rj(const GroupSpec& g, Int n);

ConvexSubgroup schmitt_An(const GroupSpec& g, const Element& gamma, Int n);
ConvexSubgroup schmitt_Bn(const GroupSpec& g, const Element& gamma, Int n);

QuotientElement project(const GroupSpec& g, int level, const Element& a);
FiniteQuotientElement project_fin(const GroupSpec& g, int level, Int modulus, const Element& a);
/// Canonical lift of a quotient element: the coordinates beyond `level` are zero.
Element lift(const GroupSpec& g, const QuotientElement& q);
/// Canonical lift of a finite-quotient element (zeros on DenseQ coordinates and beyond `level`).
Element lift(const GroupSpec& g, const FiniteQuotientElement& q);

bool is_prime(Int p);
/// [Gamma : p Gamma]; std::nullopt would mean infinite (never for this family).
std::optional<Int> compute_chi(const GroupSpec& g, Int p);

std::vector<Element> representatives_mod(const GroupSpec& g, int level, Int modulus);

}  // namespace oag
