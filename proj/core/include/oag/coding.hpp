#pragma once

// Canonical codes for segments, unary definable sets, 1-types and finite
// sets of quotient tuples, with reconstruction back to formulas.

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "oag/normalize.hpp"

namespace oag {

enum class Marker { PlusInf, MinusInf, Empty, WholeGroup };

struct CodeValue {
    enum class Sort { Main, Quot, FinQuot, Mark };
    Sort sort = Sort::Mark;
    Element main;
    QuotientElement quot;
    FiniteQuotientElement fin;
    Marker marker = Marker::Empty;

    static CodeValue of(Element e);
    static CodeValue of(QuotientElement q);
    static CodeValue of(FiniteQuotientElement f);
    static CodeValue of(Marker m);
    std::string str() const;
    friend bool operator==(const CodeValue&, const CodeValue&) = default;
};

// header: space separated tokens saying what is coded and how the values
// are to be read back, e.g. "seg end.min" or "set 1 end.min whole +".
struct Code {
    std::string header;
    std::vector<CodeValue> values;
    std::string str() const;
    friend bool operator==(const Code&, const Code&) = default;
};

std::string to_json(const Code& c);
Code code_from_json(const std::string& text);

enum class CutKind { Realized, AtSegment, MinusInf, PlusInf };

struct TypeDescriptor {
    CutKind cut = CutKind::MinusInf;
    Element realized;    // Realized
    DivSegment segment;  // AtSegment: x sits at the bottom of this end-segment
    Int residue_bound = 12;
    // coset[k] for k = 1..n (index 0 unused); nullopt means generic
    std::vector<std::optional<QuotientElement>> coset;
    std::map<std::pair<int, Int>, FiniteQuotientElement> residues;  // (level, modulus)
    friend bool operator==(const TypeDescriptor&, const TypeDescriptor&) = default;
};

Code code_segment(const GroupSpec& g, const DivSegment& seg, const QeOptions& opts = {});
Code code_set(const GroupSpec& g, const FormulaPtr& phi, const QeOptions& opts = {});
/// Throws DomainError on a malformed code.
FormulaPtr reconstruct(const GroupSpec& g, const Code& c, const std::string& var = "x");
Code code_type(const GroupSpec& g, const TypeDescriptor& p);
Code code_finite_set(const GroupSpec& g, const std::vector<std::vector<QuotientElement>>& tuples);
std::vector<FiniteQuotientElement> enumerate_finite_quotient(const GroupSpec& g, int level, Int modulus);

/// CRT coherence of residues and agreement of cosets with residues.
bool residues_coherent(const GroupSpec& g, const TypeDescriptor& p);
/// Conjunction of the stored coset and residue constraints (the cut excluded).
FormulaPtr type_constraints(const GroupSpec& g, const TypeDescriptor& p, const std::string& var = "x");

}  // namespace oag
