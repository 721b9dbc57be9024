#include "oag/qe.hpp"

#include <algorithm>
#include <functional>
#include <optional>

#include "oag/errors.hpp"

namespace oag {

using namespace scalar;

namespace {

using AtomMap = std::function<NodeP(const SAtom&, const NodeP&)>;

// Rebuilds an NNF node with every atom replaced.
NodeP map_atoms(const NodeP& n, const AtomMap& fn) {
    switch (n->op) {
        case Node::Op::Atom:
            return fn(n->atom, n);
        case Node::Op::And:
        case Node::Op::Or: {
            std::vector<NodeP> kids;
            kids.reserve(n->kids.size());
            for (const auto& k : n->kids) kids.push_back(map_atoms(k, fn));
            return n->op == Node::Op::And ? mk_and(std::move(kids)) : mk_or(std::move(kids));
        }
        case Node::Op::True:
        case Node::Op::False:
            return n;
        default:
            throw DomainError("expected a formula in negation normal form");
    }
}

void collect_atoms(const NodeP& n, const std::string& v, std::vector<SAtom>& out) {
    if (n->op == Node::Op::Atom) {
        if (n->atom.e.has(v)) out.push_back(n->atom);
        return;
    }
    for (const auto& k : n->kids) collect_atoms(k, v, out);
}

std::size_t dnf_width(const NodeP& n) {
    if (n->op == Node::Op::Or) {
        std::size_t w = 0;
        for (const auto& k : n->kids) w += dnf_width(k);
        return w;
    }
    if (n->op == Node::Op::And) {
        std::size_t w = 1;
        for (const auto& k : n->kids) w = std::min<std::size_t>(w * dnf_width(k), 1u << 20);
        return w;
    }
    return 1;
}

// an equation on v that direct substitution can use
bool pivot_atom(const NodeP& k, const std::string& v, Kind s) {
    if (k->op != Node::Op::Atom || k->atom.type != SAtom::Type::Eq) return false;
    Rational c = k->atom.e.coeff(v);
    if (c.is_zero()) return false;
    return s == Kind::DenseQ || c == Rational(1) || c == Rational(-1);
}

bool has_pivot(const NodeP& n, const std::string& v, Kind s) {
    if (n->op == Node::Op::And)
        return std::any_of(n->kids.begin(), n->kids.end(), [&](const NodeP& k) { return pivot_atom(k, v, s); });
    return pivot_atom(n, v, s);
}

class Eliminator {
public:
    explicit Eliminator(const QeOptions& o) : opts_(o) {}

    NodeP run(const NodeP& n) {
        switch (n->op) {
            case Node::Op::True:
            case Node::Op::False:
            case Node::Op::Atom:
                return n;
            case Node::Op::Not:
                return mk_not(run(n->kids[0]));
            case Node::Op::And:
            case Node::Op::Or: {
                std::vector<NodeP> kids;
                for (const auto& k : n->kids) kids.push_back(run(k));
                return n->op == Node::Op::And ? mk_and(std::move(kids)) : mk_or(std::move(kids));
            }
            case Node::Op::Exists:
            case Node::Op::Forall: {
                // a block of like quantifiers is eliminated outermost variable first
                std::vector<std::pair<std::string, Kind>> block;
                NodeP cur = n;
                while (cur->op == n->op) {
                    block.emplace_back(cur->var, cur->sort);
                    cur = cur->kids[0];
                }
                bool univ = n->op == Node::Op::Forall;
                NodeP body = nnf(run(cur), univ);
                for (const auto& [v, s] : block) body = simplify(exists(v, s, body));
                return univ ? nnf(body, true) : body;
            }
        }
        return n;
    }

private:
    void charge(const NodeP& n) {
        used_ += n->size;
        if (used_ > opts_.node_budget)
            throw ResourceError("quantifier elimination exceeded the node budget of " +
                                std::to_string(opts_.node_budget));
    }

    NodeP exists(const std::string& v, Kind s, const NodeP& f) {
        if (!mentions(f, v)) return f;
        if (f->op == Node::Op::Or) {
            std::vector<NodeP> parts;
            for (const auto& k : f->kids) parts.push_back(exists(v, s, k));
            return mk_or(std::move(parts));
        }
        if (f->op == Node::Op::And) {
            std::vector<NodeP> indep, dep;
            for (const auto& k : f->kids) (mentions(k, v) ? dep : indep).push_back(k);
            if (!indep.empty()) {
                indep.push_back(exists(v, s, mk_and(dep)));
                return mk_and(std::move(indep));
            }
            // direct substitution through an equation
            for (const auto& k : dep) {
                if (!pivot_atom(k, v, s)) continue;
                Rational c = k->atom.e.coeff(v);
                Lin root = (Rational(-1) / c) * k->atom.e.without(v);
                NodeP r = simplify(substitute(f, v, root));
                charge(r);
                return r;
            }
            // lazy distribution over one disjunction; first one whose every
            // branch can be solved by substitution, whatever the width
            std::optional<std::size_t> pick;
            for (std::size_t i = 0; i < dep.size() && !pick; ++i)
                if (dep[i]->op == Node::Op::Or &&
                    std::all_of(dep[i]->kids.begin(), dep[i]->kids.end(),
                                [&](const NodeP& alt) { return has_pivot(alt, v, s); }))
                    pick = i;
            if (pick || dnf_width(f) <= 64) {
                for (std::size_t i = pick.value_or(0); i < dep.size(); ++i) {
                    if (dep[i]->op != Node::Op::Or) continue;
                    std::vector<NodeP> parts;
                    for (const auto& alt : dep[i]->kids) {
                        auto rest = dep;
                        rest[i] = alt;
                        parts.push_back(exists(v, s, mk_and(std::move(rest))));
                    }
                    return mk_or(std::move(parts));
                }
            }
        }
        NodeP r = simplify(s == Kind::DiscreteZ ? cooper(v, f) : dense(v, f));
        charge(r);
        return r;
    }

    // Cooper's method; v ranges over Z.
    NodeP cooper(const std::string& v, const NodeP& f) {
        std::vector<SAtom> atoms;
        collect_atoms(f, v, atoms);
        Int l = 1;
        for (const auto& a : atoms) l = lcm(l, std::abs(a.e.coeff(v).num()));

        // Rescale so that v stands for l*v with unit coefficient in order atoms.
        auto scale = [&](const SAtom& a) {
            Int c = a.e.coeff(v).num();
            SAtom s = a;
            Int f = l / std::abs(c);
            Lin rest = Rational(a.type == SAtom::Type::Eq && c < 0 ? -f : f) * a.e.without(v);
            Int unit = a.type == SAtom::Type::Eq ? 1 : (c < 0 ? -1 : 1);
            s.e = rest + Lin::var(v, Rational(unit));
            if (a.type == SAtom::Type::Div || a.type == SAtom::Type::NDiv) s.modulus = mul_checked(a.modulus, f);
            return s;
        };

        Int delta = l;
        std::vector<Lin> lower, upper;
        std::set<std::string> lower_keys, upper_keys;
        auto add = [](std::vector<Lin>& to, std::set<std::string>& keys, const Lin& x) {
            if (keys.insert(x.str()).second) to.push_back(x);
        };
        for (const auto& a : atoms) {
            SAtom s = scale(a);
            Lin t = s.e.without(v);
            Int unit = s.e.coeff(v).num();
            switch (s.type) {
                case SAtom::Type::Lt:
                    if (unit < 0)
                        add(lower, lower_keys, t);  // v > t
                    else
                        add(upper, upper_keys, -t);  // v < -t
                    break;
                case SAtom::Type::Eq:
                    add(lower, lower_keys, -t - Lin::constant_of(Rational(1)));
                    add(upper, upper_keys, -t + Lin::constant_of(Rational(1)));
                    break;
                default:
                    delta = lcm(delta, s.modulus);
            }
        }
        bool use_lower = lower.size() <= upper.size();

        auto divisible = [&](const Lin& val) { return l == 1 ? mk_true() : mk_div(l, val); };
        auto at = [&](const Lin& val) {
            NodeP body = map_atoms(f, [&](const SAtom& a, const NodeP& n) {
                if (!a.e.has(v)) return n;
                SAtom s = scale(a);
                s.e = s.e.substitute(v, val);
                return mk_atom(std::move(s));
            });
            return mk_and({body, divisible(val)});
        };
        auto at_infinity = [&](const Lin& val) {
            NodeP body = map_atoms(f, [&](const SAtom& a, const NodeP& n) {
                if (!a.e.has(v)) return n;
                SAtom s = scale(a);
                switch (s.type) {
                    case SAtom::Type::Lt: {
                        bool neg_inf_true = s.e.coeff(v).sign() > 0;
                        return (neg_inf_true == use_lower) ? mk_true() : mk_false();
                    }
                    case SAtom::Type::Eq:
                        return mk_false();
                    default:
                        s.e = s.e.substitute(v, val);
                        return mk_atom(std::move(s));
                }
            });
            return mk_and({body, divisible(val)});
        };

        std::vector<NodeP> parts;
        auto push = [&](NodeP p) {
            charge(p);
            if (is_true(p)) return true;
            if (!is_false(p)) parts.push_back(std::move(p));
            return false;
        };
        for (Int j = 1; j <= delta; ++j) {
            Lin jv = Lin::constant_of(Rational(use_lower ? j : -j));
            if (push(at_infinity(jv))) return mk_true();
        }
        for (const auto& b : use_lower ? lower : upper)
            for (Int j = 1; j <= delta; ++j) {
                Lin val = b + Lin::constant_of(Rational(use_lower ? j : -j));
                if (push(at(val))) return mk_true();
            }
        return mk_or(std::move(parts));
    }

    // Test-point elimination for a dense coordinate.
    NodeP dense(const std::string& v, const NodeP& f) {
        std::vector<SAtom> atoms;
        collect_atoms(f, v, atoms);
        std::vector<Lin> points, lower, upper;
        std::set<std::string> pk, lk, uk;
        auto add = [](std::vector<Lin>& to, std::set<std::string>& keys, const Lin& x) {
            if (keys.insert(x.str()).second) to.push_back(x);
        };
        for (const auto& a : atoms) {
            Rational c = a.e.coeff(v);
            Lin root = (Rational(-1) / c) * a.e.without(v);
            if (a.type == SAtom::Type::Eq)
                add(points, pk, root);
            else if (a.type == SAtom::Type::Lt)
                add(c.sign() < 0 ? lower : upper, c.sign() < 0 ? lk : uk, root);
        }
        bool use_lower = lower.size() <= upper.size();
        int dir = use_lower ? 1 : -1;  // approach from the right of lower bounds, left of upper

        auto infinity = map_atoms(f, [&](const SAtom& a, const NodeP& n) {
            if (!a.e.has(v)) return n;
            if (a.type == SAtom::Type::Lt) return ((a.e.coeff(v).sign() > 0) == use_lower) ? mk_true() : mk_false();
            return mk_false();
        });
        auto near = [&](const Lin& r) {
            return map_atoms(f, [&](const SAtom& a, const NodeP& n) {
                if (!a.e.has(v)) return n;
                if (a.type != SAtom::Type::Lt) return mk_false();
                Rational c = a.e.coeff(v);
                Lin at = a.e.substitute(v, r);
                NodeP strict = mk_lt(a.sort, at);
                if (c.sign() * dir < 0) return mk_or({strict, mk_eq(a.sort, at)});
                return strict;
            });
        };

        std::vector<NodeP> parts;
        auto push = [&](NodeP p) {
            charge(p);
            if (is_true(p)) return true;
            if (!is_false(p)) parts.push_back(std::move(p));
            return false;
        };
        if (push(infinity)) return mk_true();
        for (const auto& p : points)
            if (push(substitute(f, v, p))) return mk_true();
        for (const auto& r : use_lower ? lower : upper)
            if (push(near(r))) return mk_true();
        return mk_or(std::move(parts));
    }

    const QeOptions& opts_;
    std::size_t used_ = 0;
};

}  // namespace

NodeP eliminate(const NodeP& f, const QeOptions& opts) {
    Eliminator e(opts);
    NodeP r = e.run(f);
    return is_quantifier_free(r) ? nnf(r) : r;
}

NodeP eliminate(const GroupSpec& g, const FormulaPtr& f, const QeOptions& opts) {
    return eliminate(lower(g, f), opts);
}

bool decide(const GroupSpec& g, const FormulaPtr& sentence, const QeOptions& opts) {
    if (!free_vars(sentence).empty()) throw DomainError("decide expects a sentence; free: " + *free_vars(sentence).begin());
    NodeP r = eliminate(g, sentence, opts);
    return evaluate(r, {});
}

bool equivalent(const GroupSpec& g, const FormulaPtr& a, const FormulaPtr& b, const QeOptions& opts) {
    return decide(g, universal_closure(f_iff(a, b)), opts);
}

bool satisfiable(const GroupSpec& g, const FormulaPtr& f, const QeOptions& opts) {
    return decide(g, existential_closure(f), opts);
}

bool entails(const GroupSpec& g, const FormulaPtr& a, const FormulaPtr& b, const QeOptions& opts) {
    return decide(g, universal_closure(f_implies(a, b)), opts);
}

std::optional<Rational> solve_1d(const NodeP& f, const std::string& var, Kind sort) {
    std::vector<SAtom> atoms;
    collect_atoms(f, var, atoms);
    std::vector<Rational> roots;
    Int m = 1;
    for (const auto& a : atoms) {
        if (a.e.coeffs.size() != 1) throw DomainError("solve_1d: formula has other free variables");
        if (a.type == SAtom::Type::Div || a.type == SAtom::Type::NDiv) {
            m = lcm(m, a.modulus);
            continue;
        }
        roots.push_back(-a.e.constant / a.e.coeff(var));
    }
    std::sort(roots.begin(), roots.end());
    roots.erase(std::unique(roots.begin(), roots.end()), roots.end());
    std::vector<Rational> cands;
    if (sort == Kind::DiscreteZ) {
        if (roots.empty())
            for (Int j = 0; j < m; ++j) cands.emplace_back(j);
        for (const auto& r : roots)
            for (Int d = -m - 1; d <= m + 1; ++d) cands.emplace_back(add_checked(r.floor(), d));
    } else {
        if (roots.empty()) cands.emplace_back(0);
        for (std::size_t i = 0; i < roots.size(); ++i) {
            cands.push_back(roots[i]);
            if (i + 1 < roots.size()) cands.push_back((roots[i] + roots[i + 1]) / Rational(2));
        }
        if (!roots.empty()) {
            cands.push_back(roots.front() - Rational(1));
            cands.push_back(roots.back() + Rational(1));
        }
    }
    std::sort(cands.begin(), cands.end());
    cands.erase(std::unique(cands.begin(), cands.end()), cands.end());
    for (const auto& c : cands)
        if (evaluate(f, {{var, c}})) return c;
    return std::nullopt;
}

std::optional<Element> witness(const GroupSpec& g, const FormulaPtr& f, const QeOptions& opts) {
    FormulaPtr body = f;
    auto fv = free_vars(f);
    if (fv.empty() && f->op == Formula::Op::Exists) {
        body = f->kids[0];
        fv = free_vars(body);
    }
    if (fv.size() != 1) throw DomainError("witness expects exactly one free variable");
    std::string x = *fv.begin();
    NodeP cur = eliminate(g, body, opts);
    Element out = Element::zero(g);
    for (int i = 1; i <= g.rank(); ++i) {
        NodeP proj = cur;
        for (int j = g.rank(); j > i; --j) proj = mk_exists(coord_name(x, j), g.kind(j), proj);
        proj = eliminate(proj, opts);
        auto val = solve_1d(proj, coord_name(x, i), g.kind(i));
        if (!val) return std::nullopt;
        out.coords[static_cast<std::size_t>(i - 1)] = *val;
        cur = substitute(cur, coord_name(x, i), Lin::constant_of(*val));
    }
    if (!evaluate(cur, {})) return std::nullopt;
    return out;
}

}  // namespace oag
