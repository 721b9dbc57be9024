#pragma once

// Definable 1-types concentrating on a definable set, built stage by stage.

#include <string>
#include <vector>

#include "oag/coding.hpp"

namespace oag {

struct StageState {
    int stage = 0;
    int level = 0;    // k of the decided (k, l); 0 for the initial stage
    Int modulus = 1;  // l; 1 means the coset of the level itself
    bool generic = false;  // the coset was left generic
    std::string choice;    // printed decision
    FormulaPtr fragment;   // finite part of the partial type
    FormulaPtr segment;    // the end-segment the type sits at the bottom of
};

/// Throws DomainError if phi is unsatisfiable or residue_bound < 2.
TypeDescriptor generic_type(const GroupSpec& g, const FormulaPtr& phi, Int residue_bound = 12, const QeOptions& opts = {},
                            std::vector<StageState>* trace = nullptr);

/// Whether the stored data of p describes a consistent type containing phi.
bool check_descriptor(const GroupSpec& g, const TypeDescriptor& p, const FormulaPtr& phi, const QeOptions& opts = {});

}  // namespace oag
