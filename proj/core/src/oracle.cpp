#include "oag/oracle.hpp"

#include <random>

#include "oag/errors.hpp"

namespace oag {

// ---------------------------------------------------------------- evaluation

Element eval_term(const GroupSpec& g, const Term& t, const GroupAssignment& a) {
    Element r = t.constant.arity() == 0 ? Element::zero(g) : t.constant;
    for (const auto& [v, c] : t.coeffs) {
        auto it = a.find(v);
        if (it == a.end()) throw DomainError("unbound variable " + v);
        r = r + c * it->second;
    }
    return r;
}

bool eval_atom(const GroupSpec& g, const Atom& at, const GroupAssignment& a) {
    Element l = eval_term(g, at.lhs, a), r = eval_term(g, at.rhs, a);
    auto rel = [&](const std::vector<Rational>& x, const std::vector<Rational>& y) {
        switch (at.rel) {
            case Rel::Lt:
                return x < y;
            case Rel::Le:
                return x <= y;
            case Rel::Eq:
                return x == y;
        }
        return false;
    };
    switch (at.kind) {
        case Atom::Kind::Cmp:
            return rel(l.coords, r.coords);
        case Atom::Kind::Congr:
            return project_fin(g, g.rank(), at.modulus, l) == project_fin(g, g.rank(), at.modulus, r);
        case Atom::Kind::RelCmp:
            return rel(project(g, at.level, l).coords, project(g, at.level, r).coords);
        case Atom::Kind::RelCongr:
            return project_fin(g, at.level, at.modulus, l) == project_fin(g, at.level, at.modulus, r);
        case Atom::Kind::RelEq:
            return project(g, at.level, l) == project(g, at.level, r);
    }
    return false;
}

namespace {

struct Interval {
    Element lo, hi;
};

bool bound_atom(const FormulaPtr& f, const std::string& v, bool lower, Element& out) {
    if (f->op != Formula::Op::Atom) return false;
    const Atom& a = f->atom;
    if (a.kind != Atom::Kind::Cmp || a.rel != Rel::Le) return false;
    const Term& c = lower ? a.lhs : a.rhs;
    const Term& x = lower ? a.rhs : a.lhs;
    if (!c.is_constant()) return false;
    if (x.coeffs.size() != 1 || x.coeffs.begin()->first != v || x.coeffs.begin()->second != 1) return false;
    if (!x.constant.is_zero()) return false;
    out = c.constant;
    return true;
}

bool interval_pair(const FormulaPtr& a, const FormulaPtr& b, const std::string& v, Interval& out) {
    return bound_atom(a, v, true, out.lo) && bound_atom(b, v, false, out.hi);
}

bool range_of(const FormulaPtr& r, const std::string& v, std::vector<Interval>& out) {
    if (r->op != Formula::Op::Or) return false;
    for (const auto& k : r->kids) {
        Interval iv;
        if (k->op != Formula::Op::And || k->kids.size() != 2 || !interval_pair(k->kids[0], k->kids[1], v, iv))
            return false;
        out.push_back(iv);
    }
    return true;
}

// Splits the body of a bounded quantifier into its range and the rest.
bool split_bounded(const FormulaPtr& f, std::vector<Interval>& range, std::vector<FormulaPtr>& rest) {
    const std::string& v = f->var;
    const FormulaPtr& body = f->kids[0];
    std::vector<FormulaPtr> parts;
    if (f->op == Formula::Op::Exists) {
        if (body->op != Formula::Op::And) return false;
        parts = body->kids;
    } else {
        if (body->op != Formula::Op::Implies) return false;
        const FormulaPtr& ante = body->kids[0];
        if (ante->op == Formula::Op::And)
            parts = ante->kids;
        else
            parts = {ante};
        rest.push_back(body->kids[1]);
        if (parts.size() == 2) {
            Interval iv;
            if (!interval_pair(parts[0], parts[1], v, iv)) return false;
            range.push_back(iv);
            return true;
        }
        return parts.size() == 1 && range_of(parts[0], v, range);
    }
    Interval iv;
    if (parts.size() >= 2 && interval_pair(parts[0], parts[1], v, iv)) {
        range.push_back(iv);
        rest.assign(parts.begin() + 2, parts.end());
        return true;
    }
    if (!parts.empty() && range_of(parts[0], v, range)) {
        rest.assign(parts.begin() + 1, parts.end());
        return true;
    }
    return false;
}

std::vector<Element> enumerate(const GroupSpec& g, const Interval& iv) {
    int n = g.rank();
    if (!g.all_discrete()) throw DomainError("bounded quantifier over a group with a dense coordinate");
    if (iv.lo.arity() != n || iv.hi.arity() != n) throw ArityError("bound arity mismatch");
    std::vector<Element> pts;
    if (n == 0) {
        pts.push_back(Element());
        return pts;
    }
    if (iv.hi < iv.lo) return pts;
    for (int i = 0; i + 1 < n; ++i)
        if (iv.lo.coords[static_cast<std::size_t>(i)] != iv.hi.coords[static_cast<std::size_t>(i)])
            throw DomainError("lexicographic interval " + iv.lo.str() + ".." + iv.hi.str() + " is infinite");
    Int a = iv.lo.coords.back().num(), b = iv.hi.coords.back().num();
    if (b - a > 100000) throw ResourceError("bounded quantifier range too large");
    for (Int x = a; x <= b; ++x) {
        Element e = iv.lo;
        e.coords.back() = Rational(x);
        pts.push_back(e);
    }
    return pts;
}

bool eval_rec(const GroupSpec& g, const FormulaPtr& f, GroupAssignment& a, bool allow_bounded) {
    using Op = Formula::Op;
    switch (f->op) {
        case Op::True:
            return true;
        case Op::False:
            return false;
        case Op::Atom:
            return eval_atom(g, f->atom, a);
        case Op::Not:
            return !eval_rec(g, f->kids[0], a, allow_bounded);
        case Op::And:
            for (const auto& k : f->kids)
                if (!eval_rec(g, k, a, allow_bounded)) return false;
            return true;
        case Op::Or:
            for (const auto& k : f->kids)
                if (eval_rec(g, k, a, allow_bounded)) return true;
            return false;
        case Op::Implies:
            return !eval_rec(g, f->kids[0], a, allow_bounded) || eval_rec(g, f->kids[1], a, allow_bounded);
        case Op::Iff:
            return eval_rec(g, f->kids[0], a, allow_bounded) == eval_rec(g, f->kids[1], a, allow_bounded);
        case Op::Exists:
        case Op::Forall: {
            if (!allow_bounded) throw DomainError("evaluate expects a quantifier-free formula");
            std::vector<Interval> range;
            std::vector<FormulaPtr> rest;
            if (!split_bounded(f, range, rest)) throw DomainError("unbounded quantifier: " + print(f));
            bool ex = f->op == Op::Exists;
            auto saved = a.find(f->var) == a.end() ? std::optional<Element>() : std::optional<Element>(a[f->var]);
            bool result = !ex;
            for (const auto& iv : range) {
                for (const auto& p : enumerate(g, iv)) {
                    a[f->var] = p;
                    bool ok = true;
                    for (const auto& r : rest)
                        if (!eval_rec(g, r, a, true)) {
                            ok = false;
                            break;
                        }
                    if (ok == ex) {
                        result = ex;
                        goto done;
                    }
                }
            }
        done:
            if (saved)
                a[f->var] = *saved;
            else
                a.erase(f->var);
            return result;
        }
    }
    return false;
}

}  // namespace

bool evaluate(const GroupSpec& g, const FormulaPtr& f, const GroupAssignment& a) {
    GroupAssignment copy = a;
    return eval_rec(g, f, copy, false);
}

bool expand_bounded(const GroupSpec& g, const FormulaPtr& f, const GroupAssignment& a) {
    GroupAssignment copy = a;
    return eval_rec(g, f, copy, true);
}

// ---------------------------------------------------------------- boxes

namespace {
std::vector<Rational> coordinate_values(Kind k, Int b) {
    std::vector<Rational> vals;
    if (k == Kind::DiscreteZ) {
        for (Int x = -b; x <= b; ++x) vals.emplace_back(x);
        return vals;
    }
    for (Int d = 1; d <= std::max<Int>(b, 1); ++d)
        for (Int n = -b; n <= b; ++n)
            if (gcd(n, d) == 1 || (n == 0 && d == 1)) vals.emplace_back(n, d);
    std::sort(vals.begin(), vals.end());
    vals.erase(std::unique(vals.begin(), vals.end()), vals.end());
    return vals;
}
}  // namespace

std::size_t box_size(const GroupSpec& g, const Box& b, int arity) {
    long double total = 1;
    for (int r = 0; r < arity; ++r)
        for (int i = 1; i <= g.rank(); ++i) total *= static_cast<long double>(coordinate_values(g.kind(i), b.bound).size());
    return total > 1e18L ? static_cast<std::size_t>(-1) : static_cast<std::size_t>(total);
}

std::vector<Element> box_points(const GroupSpec& g, const Box& b) {
    std::size_t size = box_size(g, b);
    if (size > b.cap)
        throw ResourceError("box of " + std::to_string(size) + " points exceeds the cap of " + std::to_string(b.cap));
    std::vector<std::vector<Rational>> axes;
    for (int i = 1; i <= g.rank(); ++i) axes.push_back(coordinate_values(g.kind(i), b.bound));
    std::vector<Element> out;
    out.reserve(size);
    std::vector<std::size_t> idx(axes.size(), 0);
    while (true) {
        Element e;
        for (std::size_t i = 0; i < axes.size(); ++i) e.coords.push_back(axes[i][idx[i]]);
        out.push_back(std::move(e));
        std::size_t i = axes.size();
        while (i > 0) {
            --i;
            if (++idx[i] < axes[i].size()) break;
            idx[i] = 0;
            if (i == 0) return out;
        }
        if (axes.empty()) return out;
    }
}

// ---------------------------------------------------------------- fuzzing

namespace {

class Gen {
public:
    Gen(const GroupSpec& g, std::uint64_t seed, const FuzzLimits& lim) : g_(g), rng_(seed), lim_(lim) {}

    Int range(Int lo, Int hi) { return lo + static_cast<Int>(rng_() % static_cast<std::uint64_t>(hi - lo + 1)); }
    bool coin(int percent) { return range(1, 100) <= percent; }

    Element constant() {
        Element e = Element::zero(g_);
        for (int i = 1; i <= g_.rank(); ++i) {
            Int n = range(-lim_.max_const, lim_.max_const);
            Int d = g_.kind(i) == Kind::DenseQ ? range(1, 3) : 1;
            e.coords[static_cast<std::size_t>(i - 1)] = Rational(n, d);
        }
        return e;
    }

    Int coeff() {
        Int c = range(1, lim_.max_coeff);
        return coin(30) ? -c : c;
    }

    Term term(const std::vector<std::string>& vars, const std::string& must = "") {
        Term t = Term::constant_of(Element::zero(g_));
        if (!must.empty()) t = t + coeff() * Term::var(g_, must);
        if (t.coeffs.empty() || (vars.size() > 1 && coin(50)))
            t = t + coeff() * Term::var(g_, vars[static_cast<std::size_t>(range(0, static_cast<Int>(vars.size()) - 1))]);
        return t;
    }

    Term side() {
        Term c = Term::constant_of(constant());
        return c;
    }

    int level() { return static_cast<int>(range(0, g_.rank())); }
    Int modulus() { return range(2, lim_.max_modulus); }

    FormulaPtr atom(const std::vector<std::string>& vars, int relativized_percent, const std::string& must = "") {
        Term l = term(vars, must);
        Term r = coin(30) && vars.size() > 1 ? term(vars) : side();
        Int pick = range(1, 100);
        if (coin(relativized_percent)) {
            int k = level();
            if (pick <= 40) return f_atom(Atom::rel_cmp(k, coin(50) ? Rel::Lt : Rel::Le, l, r));
            if (pick <= 75) return f_atom(Atom::rel_congr(k, modulus(), l, r));
            return f_atom(Atom::rel_eq(k, l, r));
        }
        if (pick <= 40) return f_atom(Atom::cmp(Rel::Lt, l, r));
        if (pick <= 70) return f_atom(Atom::cmp(Rel::Le, l, r));
        if (pick <= 77) return f_atom(Atom::cmp(Rel::Eq, l, r));
        return f_atom(Atom::congr(modulus(), l, r));
    }

    FormulaPtr qf(int depth, const std::vector<std::string>& vars, int rel_pct, const std::string& must = "") {
        if (depth <= 0 || coin(30)) return atom(vars, rel_pct, must);
        Int pick = range(1, 100);
        if (pick <= 15) return f_not(qf(depth - 1, vars, rel_pct, must));
        int n = static_cast<int>(range(2, 3));
        std::vector<FormulaPtr> kids;
        for (int i = 0; i < n; ++i) kids.push_back(qf(depth - 1, vars, rel_pct, i == 0 ? must : ""));
        return pick <= 60 ? f_and(std::move(kids)) : f_or(std::move(kids));
    }

    FormulaPtr interval(const std::string& v, Int lo, Int hi, const Element& prefix) {
        Element a = prefix, b = prefix;
        a.coords.back() = Rational(lo);
        b.coords.back() = Rational(hi);
        return f_and({f_le(Term::constant_of(a), Term::var(g_, v)), f_le(Term::var(g_, v), Term::constant_of(b))});
    }

    // Either one fiber interval or a small box written as a union of fibers.
    FormulaPtr bounded_range(const std::string& v) {
        int n = g_.rank();
        Int w = lim_.window;
        Element prefix = Element::zero(g_);
        if (n >= 2 && coin(35)) {
            std::vector<FormulaPtr> fibers;
            Element p = Element::zero(g_);
            std::vector<Int> idx(static_cast<std::size_t>(n - 1), -1);
            while (true) {
                for (int i = 0; i < n - 1; ++i) p.coords[static_cast<std::size_t>(i)] = Rational(idx[static_cast<std::size_t>(i)]);
                fibers.push_back(interval(v, -1, 1, p));
                int i = n - 2;
                while (i >= 0 && idx[static_cast<std::size_t>(i)] == 1) idx[static_cast<std::size_t>(i--)] = -1;
                if (i < 0) break;
                ++idx[static_cast<std::size_t>(i)];
            }
            return f_or(std::move(fibers));
        }
        for (int i = 0; i < n - 1; ++i) prefix.coords[static_cast<std::size_t>(i)] = Rational(range(-w, w));
        Int lo = range(-2 * w, w);
        Int hi = lo + range(0, 2 * w);
        return interval(v, lo, hi, prefix);
    }

    FormulaPtr bounded(int depth, std::vector<std::string> vars, int& quants) {
        if (quants > 0 && coin(60)) {
            --quants;
            std::string u = "u" + std::to_string(counter_++);
            FormulaPtr range = bounded_range(u);
            vars.push_back(u);
            FormulaPtr body = bounded(depth - 1, vars, quants);
            if (!free_vars(body).count(u) || coin(50)) body = f_and({body, atom(vars, 20, u)});
            if (coin(60)) return f_exists(u, f_and({range, body}));
            return f_forall(u, f_implies(range, body));
        }
        if (depth <= 0) return atom(vars, 20);
        std::vector<FormulaPtr> kids;
        int n = static_cast<int>(range(1, 2));
        for (int i = 0; i < n; ++i) kids.push_back(i == 0 && quants > 0 ? bounded(depth - 1, vars, quants)
                                                                        : qf(depth - 1, vars, 20));
        if (kids.size() == 1) return coin(20) ? f_not(kids[0]) : kids[0];
        return coin(50) ? f_and(std::move(kids)) : f_or(std::move(kids));
    }

    std::vector<std::string> free_names() const {
        static const char* names[] = {"x", "y", "z", "w"};
        std::vector<std::string> v;
        for (int i = 0; i < std::min(lim_.free_vars, 4); ++i) v.emplace_back(names[i]);
        return v;
    }

    FormulaPtr one(Template t) {
        auto vars = free_names();
        int depth = lim_.max_depth;
        switch (t) {
            case Template::Bounded: {
                int q = lim_.max_quantifiers;
                if (depth <= 0) return atom(vars, 20);
                FormulaPtr f = bounded(depth, vars, q);
                return f;
            }
            case Template::EndSegment: {
                std::string y = "y";
                FormulaPtr body = qf(std::max(depth - 1, 0), {y}, 15, y);
                int k = static_cast<int>(range(1, g_.rank()));
                FormulaPtr below = coin(75) ? f_le(Term::var(g_, y), Term::var(g_, vars[0]))
                                            : f_atom(Atom::rel_cmp(k, Rel::Le, Term::var(g_, y), Term::var(g_, vars[0])));
                return f_exists(y, f_and({below, body}));
            }
            case Template::Congruence: {
                std::vector<FormulaPtr> kids;
                int n = static_cast<int>(range(1, 3));
                for (int i = 0; i < n; ++i) {
                    Term l = term(vars);
                    FormulaPtr c = coin(50) ? f_atom(Atom::congr(modulus(), l, side()))
                                            : f_atom(Atom::rel_congr(level(), modulus(), l, side()));
                    kids.push_back(coin(25) ? f_not(c) : c);
                }
                kids.push_back(atom(vars, 0));
                return coin(70) ? f_and(std::move(kids)) : f_or(std::move(kids));
            }
            case Template::Relativized:
                return qf(depth, vars, 100);
            case Template::Arbitrary:
            case Template::Mixed: {
                FormulaPtr f = qf(depth, vars, 25);
                if (depth > 0 && coin(20)) {
                    std::string u = "u" + std::to_string(counter_++);
                    auto inner = vars;
                    inner.push_back(u);
                    FormulaPtr link = atom(inner, 20, u);
                    f = f_and({f, f_exists(u, f_and({link, qf(depth - 1, {u}, 20, u)}))});
                }
                return f;
            }
        }
        return f_true();
    }

    std::vector<FormulaPtr> corpus(std::size_t count, Template t) {
        static const Template cycle[] = {Template::Arbitrary, Template::Bounded, Template::EndSegment,
                                         Template::Congruence, Template::Relativized};
        std::vector<FormulaPtr> out;
        for (std::size_t i = 0; i < count; ++i) {
            Template pick = t == Template::Mixed ? cycle[i % 5] : t;
            if (pick == Template::Bounded && !g_.all_discrete()) pick = Template::Arbitrary;
            out.push_back(one(pick));
        }
        return out;
    }

private:
    const GroupSpec& g_;
    std::mt19937_64 rng_;
    FuzzLimits lim_;
    int counter_ = 1;
};

}  // namespace

std::vector<FormulaPtr> fuzz_corpus(const GroupSpec& g, std::uint64_t seed, std::size_t count,
                                    const FuzzLimits& lim, Template t) {
    if (g.rank() == 0) return std::vector<FormulaPtr>(count, f_true());
    return Gen(g, seed, lim).corpus(count, t);
}

}  // namespace oag
