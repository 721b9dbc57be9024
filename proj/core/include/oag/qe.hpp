#pragma once

// Quantifier elimination over lowered formulas, and the decision procedures
// built on it.

#include <cstddef>
#include <optional>

#include "oag/formula.hpp"
#include "oag/scalar.hpp"

namespace oag {

struct QeOptions {
    std::size_t node_budget = 4'000'000;  // total nodes produced per call
};

/// Quantifier-free scalar formula with the same extension as `f`.
scalar::NodeP eliminate(const GroupSpec& g, const FormulaPtr& f, const QeOptions& opts = {});
/// Same, for an already lowered formula.
scalar::NodeP eliminate(const scalar::NodeP& f, const QeOptions& opts = {});

bool decide(const GroupSpec& g, const FormulaPtr& sentence, const QeOptions& opts = {});
bool equivalent(const GroupSpec& g, const FormulaPtr& a, const FormulaPtr& b, const QeOptions& opts = {});
bool satisfiable(const GroupSpec& g, const FormulaPtr& f, const QeOptions& opts = {});
bool entails(const GroupSpec& g, const FormulaPtr& a, const FormulaPtr& b, const QeOptions& opts = {});

/// A value for the single free variable of `f` (or for the bound variable of
/// a closed `(exists (x) ...)`), or nullopt when there is none.
std::optional<Element> witness(const GroupSpec& g, const FormulaPtr& f, const QeOptions& opts = {});

/// Smallest-candidate satisfying value of a quantifier-free formula in one
/// scalar variable of the given sort.
std::optional<Rational> solve_1d(const scalar::NodeP& f, const std::string& var, Kind sort);

}  // namespace oag
