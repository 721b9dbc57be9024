#pragma once

// Eliminator versus brute force on the points of a box.

#include <optional>

#include "oag/oracle.hpp"
#include "oag/qe.hpp"

namespace oag {

struct Disagreement {
    FormulaPtr formula;
    GroupAssignment point;
    bool oracle = false;
    bool eliminated = false;
};

/// Compares eliminate() with expand_bounded() at every assignment of the free
/// variables to points of the box; returns the first mismatch.
std::optional<Disagreement> differential_check(const GroupSpec& g, const FormulaPtr& f, const Box& box,
                                               const QeOptions& opts = {});

std::string describe(const GroupAssignment& a);

}  // namespace oag
