#include "oag/typegen.hpp"

#include <optional>

#include "oag/errors.hpp"

namespace oag {

namespace {

struct Ctx {
    const GroupSpec& g;
    const QeOptions& opts;
    std::string x, b, d;
    FormulaPtr seg;     // end-segment in x; the type sits at its bottom
    bool above = false;  // type at +infinity instead

    Term tx() const { return Term::var(g, x); }
    Term tb() const { return Term::var(g, b); }
    Term td() const { return Term::var(g, d); }

    FormulaPtr beyond(const Term& t) const { return above ? f_lt(tb(), t) : f_lt(t, tb()); }
    FormulaPtr seg_at_b() const { return substitute(seg, x, tb()); }
    FormulaPtr other_coset(int k) const { return f_not(f_atom(Atom::rel_eq(k, tx(), td()))); }

    // F is co-initial in the segment (co-final for +infinity), also after
    // removing any single coset of level `generic` when set.
    bool consistent(const FormulaPtr& f, std::optional<int> generic) const {
        FormulaPtr inner = f_and({f, beyond(tx())});
        if (generic) inner = f_and({inner, other_coset(*generic)});
        FormulaPtr s = f_forall(b, f_implies(seg_at_b(), f_exists(x, inner)));
        if (generic) s = f_forall(d, s);
        return decide(g, s, opts);
    }
};

std::string fresh(const std::set<std::string>& used, const std::string& base) {
    return used.count(base) ? fresh_name(base, used) : base;
}

FormulaPtr residue_atom(const GroupSpec& g, const std::string& x, int k, Int l, const Element& r) {
    Term t = Term::var(g, x), c = Term::constant_of(r);
    return k == g.rank() ? f_atom(Atom::congr(l, t, c)) : f_atom(Atom::rel_congr(k, l, t, c));
}

bool agrees(const GroupSpec& g, const TypeDescriptor& p, int k, Int l, const Element& r) {
    for (const auto& [key, f] : p.residues)
        if (key.first <= k && l % key.second == 0 && project_fin(g, key.first, key.second, r) != f) return false;
    return true;
}

}  // namespace

TypeDescriptor generic_type(const GroupSpec& g, const FormulaPtr& phi, Int residue_bound, const QeOptions& opts,
                            std::vector<StageState>* trace) {
    if (residue_bound < 2) throw DomainError("residue bound must be at least 2");
    if (!satisfiable(g, phi, opts)) throw DomainError("formula is unsatisfiable");
    const int n = g.rank();
    TypeDescriptor p;
    p.residue_bound = residue_bound;
    if (auto m = minimum(g, phi, opts)) {
        p.cut = CutKind::Realized;
        p.realized = *m;
        if (trace) trace->push_back(StageState{0, 0, 1, false, "realized " + m->str(), phi, phi});
        return p;
    }
    std::string x = unary_var(phi);
    auto used = all_vars(phi);
    used.insert(x);
    std::string b = fresh(used, "b");
    used.insert(b);
    std::string d = fresh(used, "d");

    DivSegment seg = to_div_segment(g, upward_closure(phi), opts);
    if (seg.is_whole()) {
        p.cut = CutKind::MinusInf;
    } else {
        p.cut = CutKind::AtSegment;
        p.segment = seg;
    }
    Ctx ctx{g, opts, x, b, d, to_formula(g, seg, x), false};
    p.coset.assign(static_cast<std::size_t>(n) + 1, std::nullopt);

    FormulaPtr frag = phi;
    std::optional<int> generic;
    int stage = 0;
    if (trace) trace->push_back(StageState{stage, 0, 1, false, "start", frag, ctx.seg});
    for (int k = 1; k <= n; ++k) {
        for (Int l = 1; l <= residue_bound; ++l) {
            ++stage;
            StageState st{stage, k, l, false, "", nullptr, ctx.seg};
            if (l == 1) {
                if (generic || ctx.consistent(frag, k)) {
                    if (!generic) generic = k;
                    st.generic = true;
                    st.choice = "generic";
                } else {
                    // the bottom of the set lies in a single coset
                    FormulaPtr in = f_atom(Atom::rel_eq(k, ctx.tx(), ctx.td()));
                    FormulaPtr pd = f_forall(b, f_implies(ctx.seg_at_b(), f_exists(x, f_and({frag, in, ctx.beyond(ctx.tx())}))));
                    auto w = witness(g, pd, opts);
                    if (!w) throw DomainError("stage " + std::to_string(stage) + ": no consistent coset");
                    QuotientElement q = project(g, k, *w);
                    p.coset[static_cast<std::size_t>(k)] = q;
                    frag = f_and({frag, f_atom(Atom::rel_eq(k, ctx.tx(), Term::constant_of(lift(g, q))))});
                    st.choice = "coset " + q.str();
                }
            } else {
                std::optional<Element> pick;
                if (!generic || *generic > k) {
                    // a fixed coset at level >= k already decides the residue
                    for (int j = k; j <= n && !pick; ++j)
                        if (p.coset[static_cast<std::size_t>(j)]) pick = lift(g, *p.coset[static_cast<std::size_t>(j)]);
                }
                if (!pick) {
                    for (const auto& r : representatives_mod(g, k, l)) {
                        if (!agrees(g, p, k, l, r)) continue;
                        if (ctx.consistent(f_and({frag, residue_atom(g, x, k, l, r)}), generic)) {
                            pick = r;
                            break;
                        }
                    }
                }
                if (!pick) throw DomainError("stage " + std::to_string(stage) + ": every residue class is inconsistent");
                auto fq = project_fin(g, k, l, *pick);
                p.residues[{k, l}] = fq;
                frag = f_and({frag, residue_atom(g, x, k, l, lift(g, fq))});
                st.choice = "residue " + fq.str();
            }
            st.fragment = frag;
            if (trace) trace->push_back(std::move(st));
        }
    }
    return p;
}

bool check_descriptor(const GroupSpec& g, const TypeDescriptor& p, const FormulaPtr& phi, const QeOptions& opts) {
    std::string x = unary_var(phi);
    if (p.cut == CutKind::Realized) {
        if (!residues_coherent(g, p)) return false;
        check_element(g, p.realized);
        FormulaPtr at = substitute(f_and({phi, type_constraints(g, p, x)}), x, Term::constant_of(p.realized));
        return decide(g, at, opts);
    }
    if (!residues_coherent(g, p)) return false;
    auto used = all_vars(phi);
    used.insert(x);
    std::string b = fresh(used, "b");
    used.insert(b);
    std::string d = fresh(used, "d");
    FormulaPtr seg = p.cut == CutKind::AtSegment ? to_formula(g, p.segment, x) : f_true();
    if (p.cut == CutKind::AtSegment && (p.segment.direction != Direction::End || p.segment.is_empty())) return false;
    Ctx ctx{g, opts, x, b, d, seg, p.cut == CutKind::PlusInf};
    std::optional<int> generic;
    for (int k = 1; k <= g.rank(); ++k)
        if (static_cast<std::size_t>(k) >= p.coset.size() || !p.coset[static_cast<std::size_t>(k)]) {
            generic = k;
            break;
        }
    // phi is part of the fragment, so entailment reduces to consistency
    FormulaPtr frag = f_and({phi, seg, type_constraints(g, p, x)});
    return ctx.consistent(frag, generic);
}

}  // namespace oag
