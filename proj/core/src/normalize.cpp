#include "oag/normalize.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>

#include "oag/errors.hpp"

namespace oag {

using scalar::Lin;
using scalar::Node;
using scalar::NodeP;
using scalar::SAtom;

// ---------------------------------------------------------------- CNode queries

int CNode::label_at(const Rational& a) const {
    if (type == Type::Dense) {
        auto it = std::lower_bound(points.begin(), points.end(), a);
        std::size_t k = static_cast<std::size_t>(it - points.begin());
        if (it != points.end() && *it == a) return labels[2 * k + 1];
        return labels[2 * k];
    }
    Int v = a.num();
    if (periodic || v < left_start) return left_pattern[static_cast<std::size_t>(mod_floor(v, left_period))];
    if (v >= right_start) return right_pattern[static_cast<std::size_t>(mod_floor(v, right_period))];
    return middle[static_cast<std::size_t>(v - left_start)];
}

bool CNode::contains(const Element& e) const {
    const CNode* n = this;
    while (n->type != Type::Leaf) n = n->children[static_cast<std::size_t>(n->label_at(e.coords.at(static_cast<std::size_t>(n->level - 1))))].get();
    return n->value;
}

// ---------------------------------------------------------------- building

namespace {

constexpr Int kWindowCap = 200000;

void atoms_on(const NodeP& f, const std::string& v, std::map<std::string, SAtom>& out) {
    if (f->op == Node::Op::Atom) {
        if (f->atom.e.has(v)) out.emplace(f->key, f->atom);
        return;
    }
    for (const auto& k : f->kids) atoms_on(k, v, out);
}

NodeP fix_atoms(const NodeP& f, const std::string& v, const std::map<std::string, bool>& truth) {
    switch (f->op) {
        case Node::Op::Atom:
            if (!f->atom.e.has(v)) return f;
            return truth.at(f->key) ? scalar::mk_true() : scalar::mk_false();
        case Node::Op::Not:
            return scalar::mk_not(fix_atoms(f->kids[0], v, truth));
        case Node::Op::And:
        case Node::Op::Or: {
            std::vector<NodeP> kids;
            for (const auto& k : f->kids) kids.push_back(fix_atoms(k, v, truth));
            return f->op == Node::Op::And ? scalar::mk_and(std::move(kids)) : scalar::mk_or(std::move(kids));
        }
        case Node::Op::True:
        case Node::Op::False:
            return f;
        default:
            throw DomainError("canonical form expects a quantifier-free formula");
    }
}

std::string join_labels(const std::vector<int>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
    return s;
}

Int smallest_period(Int m, const std::function<bool(Int)>& is_period) {
    for (Int p = 1; p <= m; ++p)
        if (m % p == 0 && is_period(p)) return p;
    return m;
}

class Builder {
public:
    Builder(const GroupSpec& g, std::string var) : g_(g), var_(std::move(var)) {}

    CNodeP build(const NodeP& f, int level) {
        if (level > g_.rank()) return leaf(scalar::evaluate(f, {}));
        std::string memo_key = std::to_string(level) + "#" + f->key;
        if (auto it = memo_.find(memo_key); it != memo_.end()) return it->second;
        std::string xi = scalar::coord_name(var_, level);
        std::map<std::string, SAtom> atoms;
        atoms_on(f, xi, atoms);
        std::map<std::vector<bool>, CNodeP> by_truth;
        auto child_at = [&](const Rational& a) {
            std::vector<bool> vec;
            std::map<std::string, bool> truth;
            for (const auto& [k, at] : atoms) {
                NodeP fixed = scalar::mk_atom(SAtom{at.type, at.sort, at.e.substitute(xi, Lin::constant_of(a)), at.modulus});
                bool t = scalar::is_true(fixed);
                vec.push_back(t);
                truth[k] = t;
            }
            auto it = by_truth.find(vec);
            if (it != by_truth.end()) return it->second;
            CNodeP c = build(fix_atoms(f, xi, truth), level + 1);
            by_truth.emplace(vec, c);
            return c;
        };
        std::vector<Rational> roots;
        Int m = 1;
        for (const auto& [k, at] : atoms) {
            if (at.type == SAtom::Type::Div || at.type == SAtom::Type::NDiv)
                m = lcm(m, at.modulus);
            else
                roots.push_back(-at.e.constant / at.e.coeff(xi));
        }
        std::sort(roots.begin(), roots.end());
        roots.erase(std::unique(roots.begin(), roots.end()), roots.end());
        CNodeP node = g_.kind(level) == Kind::DiscreteZ ? discrete(level, roots, m, child_at) : dense(level, roots, child_at);
        memo_.emplace(memo_key, node);
        return node;
    }

private:
    CNodeP leaf(bool v) {
        auto n = std::make_shared<CNode>();
        n->type = CNode::Type::Leaf;
        n->value = v;
        n->level = g_.rank() + 1;
        n->key = v ? "T" : "F";
        return n;
    }

    // Assigns canonical child indices; returns label per input entry.
    static std::vector<int> index_children(const std::vector<CNodeP>& per, std::vector<CNodeP>& children) {
        std::map<std::string, CNodeP> distinct;
        for (const auto& c : per) distinct.emplace(c->key, c);
        std::map<std::string, int> idx;
        for (const auto& [k, c] : distinct) {
            idx[k] = static_cast<int>(children.size());
            children.push_back(c);
        }
        std::vector<int> out;
        out.reserve(per.size());
        for (const auto& c : per) out.push_back(idx[c->key]);
        return out;
    }

    static std::string children_key(const std::vector<CNodeP>& children) {
        std::string s = "[";
        for (std::size_t i = 0; i < children.size(); ++i) s += (i ? ";" : "") + children[i]->key;
        return s + "]";
    }

    CNodeP discrete(int level, const std::vector<Rational>& roots, Int m,
                    const std::function<CNodeP(const Rational&)>& child_at) {
        Int lo, hi;
        if (roots.empty()) {
            lo = 0;
            hi = 2 * m - 1;
        } else {
            Int below = roots.front().ceil() - 1;  // largest integer under every root
            Int above = roots.back().floor() + 1;  // smallest integer over every root
            lo = below - 2 * m + 1;
            hi = above + 2 * m - 1;
        }
        if (hi - lo + 1 > kWindowCap) throw ResourceError("canonical form window too large");
        std::vector<CNodeP> per;
        for (Int a = lo; a <= hi; ++a) per.push_back(child_at(Rational(a)));
        auto n = std::make_shared<CNode>();
        n->type = CNode::Type::Discrete;
        n->level = level;
        std::vector<int> lab = index_children(per, n->children);
        // f extended by the periodicity of both outer regions
        auto f = [&](Int a) -> int {
            if (a < lo) return lab[static_cast<std::size_t>(mod_floor(a - lo, m))];
            if (a > hi) return lab[static_cast<std::size_t>(hi - lo - m + 1 + mod_floor(a - (hi - m + 1), m))];
            return lab[static_cast<std::size_t>(a - lo)];
        };
        Int pl = smallest_period(m, [&](Int p) {
            for (Int a = lo; a < lo + m; ++a)
                if (f(a) != f(a + p)) return false;
            return true;
        });
        Int lstar = hi + m + 1;
        bool whole = true;
        for (Int a = lo + pl; a <= hi + m; ++a)
            if (f(a) != f(a - pl)) {
                lstar = a;
                whole = false;
                break;
            }
        n->left_period = pl;
        n->left_pattern.resize(static_cast<std::size_t>(pl));
        for (Int r = 0; r < pl; ++r) {
            // any a < lstar with a = r mod pl
            Int a = lo + mod_floor(r - lo, pl);
            n->left_pattern[static_cast<std::size_t>(r)] = f(a);
        }
        if (whole) {
            n->periodic = true;
            n->key = "Z" + std::to_string(level) + "{P" + std::to_string(pl) + ":" + join_labels(n->left_pattern) + "}" +
                     children_key(n->children);
            return n;
        }
        Int pr = smallest_period(m, [&](Int p) {
            for (Int a = hi - m + 1; a <= hi; ++a)
                if (f(a) != f(a - p)) return false;
            return true;
        });
        Int rstar = lo;
        for (Int a = hi; a >= lo - m; --a)
            if (f(a) != f(a + pr)) {
                rstar = a + 1;
                break;
            }
        n->left_start = lstar;
        n->right_start = rstar;
        n->right_period = pr;
        n->right_pattern.resize(static_cast<std::size_t>(pr));
        for (Int r = 0; r < pr; ++r) n->right_pattern[static_cast<std::size_t>(r)] = f(hi - pr + 1 + mod_floor(r - (hi - pr + 1), pr));
        for (Int a = lstar; a < rstar; ++a) n->middle.push_back(f(a));
        n->key = "Z" + std::to_string(level) + "{L" + std::to_string(pl) + ":" + join_labels(n->left_pattern) + "@" +
                 std::to_string(lstar) + "|" + join_labels(n->middle) + "|R" + std::to_string(rstar) + ":" +
                 std::to_string(pr) + ":" + join_labels(n->right_pattern) + "}" + children_key(n->children);
        return n;
    }

    CNodeP dense(int level, const std::vector<Rational>& roots, const std::function<CNodeP(const Rational&)>& child_at) {
        std::vector<CNodeP> per;
        std::vector<Rational> pts = roots;
        if (pts.empty()) {
            per.push_back(child_at(Rational(0)));
        } else {
            per.push_back(child_at(pts.front() - Rational(1)));
            for (std::size_t i = 0; i < pts.size(); ++i) {
                per.push_back(child_at(pts[i]));
                per.push_back(child_at(i + 1 < pts.size() ? (pts[i] + pts[i + 1]) / Rational(2) : pts[i] + Rational(1)));
            }
        }
        // drop points whose label agrees with both neighbours
        std::vector<Rational> kept;
        std::vector<CNodeP> kept_per{per[0]};
        for (std::size_t i = 0; i < pts.size(); ++i) {
            const CNodeP& left = kept_per.back();
            const CNodeP& at = per[2 * i + 1];
            const CNodeP& right = per[2 * i + 2];
            if (left->key == at->key && at->key == right->key) continue;
            kept.push_back(pts[i]);
            kept_per.push_back(at);
            kept_per.push_back(right);
        }
        auto n = std::make_shared<CNode>();
        n->type = CNode::Type::Dense;
        n->level = level;
        n->points = kept;
        n->labels = index_children(kept_per, n->children);
        std::string s = "Q" + std::to_string(level) + "{" + std::to_string(n->labels[0]);
        for (std::size_t i = 0; i < kept.size(); ++i)
            s += "|" + kept[i].str() + ":" + std::to_string(n->labels[2 * i + 1]) + "|" + std::to_string(n->labels[2 * i + 2]);
        n->key = s + "}" + children_key(n->children);
        return n;
    }

    const GroupSpec& g_;
    std::string var_;
    std::map<std::string, CNodeP> memo_;
};

}  // namespace

CNodeP canonical_set(const GroupSpec& g, const NodeP& qf, const std::string& var) {
    for (const auto& v : scalar::free_vars(qf))
        if (scalar::split_name(v).first != var) throw ArityError("formula is not unary in " + var + ": " + v);
    Builder b(g, var);
    return b.build(qf, 1);
}

std::string unary_var(const FormulaPtr& phi) {
    auto fv = free_vars(phi);
    if (fv.size() > 1) throw ArityError("expected a unary formula, found " + std::to_string(fv.size()) + " free variables");
    return fv.empty() ? "x" : *fv.begin();
}

CNodeP canonical_set(const GroupSpec& g, const FormulaPtr& phi, const QeOptions& opts) {
    std::string v = unary_var(phi);
    return canonical_set(g, eliminate(g, phi, opts), v);
}

// ---------------------------------------------------------------- nice sets

bool DivSegment::is_whole() const {
    return (direction == Direction::End && bound == Bound::MinusInf) ||
           (direction == Direction::Initial && bound == Bound::PlusInf);
}

bool DivSegment::is_empty() const {
    return (direction == Direction::End && bound == Bound::PlusInf) ||
           (direction == Direction::Initial && bound == Bound::MinusInf);
}

namespace {

constexpr std::size_t kTupleCap = 1000000;

// Residue pattern of a set that is periodic in every remaining discrete
// coordinate and constant in the dense ones.
struct Pattern {
    Int modulus = 1;
    int zc = 0;  // discrete coordinates covered
    std::set<std::vector<Int>> tuples;
};

std::size_t full_count(Int p, int zc) {
    std::size_t n = 1;
    for (int i = 0; i < zc; ++i) {
        n *= static_cast<std::size_t>(p);
        if (n > kTupleCap) throw ResourceError("congruence pattern too large");
    }
    return n;
}

std::set<std::vector<Int>> lift(const Pattern& pat, Int p) {
    full_count(p, pat.zc);
    std::set<std::vector<Int>> out;
    Int mult = p / pat.modulus;
    for (const auto& t : pat.tuples) {
        std::vector<std::vector<Int>> acc{{}};
        for (Int r : t) {
            std::vector<std::vector<Int>> next;
            for (const auto& a : acc)
                for (Int k = 0; k < mult; ++k) {
                    auto b = a;
                    b.push_back(r + k * pat.modulus);
                    next.push_back(std::move(b));
                }
            acc = std::move(next);
        }
        out.insert(acc.begin(), acc.end());
    }
    return out;
}

class Decomposer {
public:
    explicit Decomposer(const GroupSpec& g) : g_(g) {}

    std::vector<NiceSet> run(const CNodeP& root) {
        out_.clear();
        if (root->type == CNode::Type::Leaf) {
            if (root->value) out_.push_back(NiceSet{fiber_lower({}), fiber_upper({}), {}});
            return out_;
        }
        walk(*root, {});
        return out_;
    }

private:
    static bool is_false(const CNodeP& c) { return c->type == CNode::Type::Leaf && !c->value; }

    std::optional<Pattern> pattern_of(const CNodeP& c) {
        if (auto it = memo_.find(c->key); it != memo_.end()) return it->second;
        std::optional<Pattern> res;
        if (c->type == CNode::Type::Leaf) {
            res = Pattern{};
            if (c->value) res->tuples.insert(std::vector<Int>{});
        } else if (c->type == CNode::Type::Dense) {
            if (c->points.empty()) res = pattern_of(c->children[static_cast<std::size_t>(c->labels[0])]);
        } else if (c->periodic) {
            std::vector<Pattern> kids;
            bool ok = true;
            for (const auto& k : c->children) {
                auto p = pattern_of(k);
                if (!p) {
                    ok = false;
                    break;
                }
                kids.push_back(*p);
            }
            if (ok) {
                Pattern pat;
                pat.modulus = c->left_period;
                for (const auto& k : kids) pat.modulus = lcm(pat.modulus, k.modulus);
                pat.zc = 1 + kids.front().zc;
                full_count(pat.modulus, pat.zc);
                std::vector<std::set<std::vector<Int>>> lifted;
                for (const auto& k : kids) lifted.push_back(lift(k, pat.modulus));
                for (Int r = 0; r < pat.modulus; ++r)
                    for (const auto& t : lifted[static_cast<std::size_t>(c->left_pattern[static_cast<std::size_t>(r % c->left_period)])]) {
                        std::vector<Int> u{r};
                        u.insert(u.end(), t.begin(), t.end());
                        pat.tuples.insert(std::move(u));
                    }
                res = std::move(pat);
            }
        }
        memo_.emplace(c->key, res);
        return res;
    }

    Element padded(const std::vector<Rational>& prefix) const {
        std::vector<Rational> v = prefix;
        v.resize(static_cast<std::size_t>(g_.rank()), Rational(0));
        return Element(std::move(v));
    }

    DivSegment fiber_lower(const std::vector<Rational>& prefix) const {
        if (prefix.empty()) return DivSegment{Direction::End, 1, 0, Bound::MinusInf, Element::zero(g_), false};
        return DivSegment{Direction::End, 1, static_cast<int>(prefix.size()), Bound::Finite, padded(prefix), false};
    }

    DivSegment fiber_upper(const std::vector<Rational>& prefix) const {
        if (prefix.empty()) return DivSegment{Direction::Initial, 1, 0, Bound::PlusInf, Element::zero(g_), false};
        return DivSegment{Direction::Initial, 1, static_cast<int>(prefix.size()), Bound::Finite, padded(prefix), false};
    }

    DivSegment at(Direction d, std::vector<Rational> prefix, const Rational& v, bool strict) const {
        prefix.push_back(v);
        return DivSegment{d, 1, static_cast<int>(prefix.size()), Bound::Finite, padded(prefix), strict};
    }

    // residues: allowed values of the current coordinate mod `period`, when discrete.
    void emit(const DivSegment& upper, const DivSegment& lower, const std::vector<Rational>& prefix,
              const std::vector<Int>& residues, Int period, const Pattern& child) {
        const int level = static_cast<int>(prefix.size()) + 1;
        const bool discrete = g_.kind(level) == Kind::DiscreteZ;
        Int p = discrete ? lcm(period, child.modulus) : child.modulus;
        int zc = discrete ? child.zc + 1 : child.zc;
        std::set<std::vector<Int>> tuples;
        auto lifted = lift(child, p);
        if (discrete) {
            std::set<Int> allowed(residues.begin(), residues.end());
            for (Int r = 0; r < p; ++r) {
                if (!allowed.count(r % period)) continue;
                for (const auto& t : lifted) {
                    std::vector<Int> u{r};
                    u.insert(u.end(), t.begin(), t.end());
                    tuples.insert(std::move(u));
                }
            }
        } else {
            tuples = std::move(lifted);
        }
        std::size_t full = full_count(p, zc);
        if (tuples.empty()) return;
        if (tuples.size() == full) {
            out_.push_back(NiceSet{upper, lower, {}});
            return;
        }
        auto literal = [&](bool positive, const std::vector<Int>& t) {
            std::vector<Rational> b = prefix;
            std::size_t j = 0;
            for (int i = level; i <= g_.rank(); ++i)
                b.push_back(g_.kind(i) == Kind::DiscreteZ ? Rational(t[j++]) : Rational(0));
            return CongruenceLiteral{positive, 1, g_.rank(), p, Element(std::move(b)), 0};
        };
        if (tuples.size() <= full - tuples.size()) {
            for (const auto& t : tuples) out_.push_back(NiceSet{upper, lower, {literal(true, t)}});
            return;
        }
        NiceSet s{upper, lower, {}};
        std::vector<Int> t(static_cast<std::size_t>(zc), 0);
        for (std::size_t k = 0; k < full; ++k) {
            std::size_t rem = k;
            for (int j = zc - 1; j >= 0; --j) {
                t[static_cast<std::size_t>(j)] = static_cast<Int>(rem % static_cast<std::size_t>(p));
                rem /= static_cast<std::size_t>(p);
            }
            if (!tuples.count(t)) s.congr.push_back(literal(false, t));
        }
        out_.push_back(std::move(s));
    }

    const Pattern& need_pattern(const CNodeP& c) {
        auto p = pattern_of(c);
        if (!p) throw DomainError("set is not a finite union of nice sets");
        return *memo_.at(c->key);
    }

    static std::vector<Int> residues_of(const std::vector<int>& pattern, int label) {
        std::vector<Int> r;
        for (std::size_t i = 0; i < pattern.size(); ++i)
            if (pattern[i] == label) r.push_back(static_cast<Int>(i));
        return r;
    }

    void walk(const CNode& node, const std::vector<Rational>& prefix) {
        if (node.type == CNode::Type::Discrete)
            walk_discrete(node, prefix);
        else
            walk_dense(node, prefix);
    }

    void walk_discrete(const CNode& node, const std::vector<Rational>& prefix) {
        const auto nchild = static_cast<int>(node.children.size());
        if (node.periodic) {
            for (int c = 0; c < nchild; ++c) {
                const CNodeP& ch = node.children[static_cast<std::size_t>(c)];
                if (is_false(ch)) continue;
                emit(fiber_lower(prefix), fiber_upper(prefix), prefix, residues_of(node.left_pattern, c),
                     node.left_period, need_pattern(ch));
            }
            return;
        }
        const Int lstart = node.left_start;
        for (int c = 0; c < nchild; ++c) {
            const CNodeP& ch = node.children[static_cast<std::size_t>(c)];
            auto res = residues_of(node.left_pattern, c);
            if (is_false(ch) || res.empty()) continue;
            Int top = lstart - 1;
            while (node.left_pattern[static_cast<std::size_t>(mod_floor(top, node.left_period))] != c) --top;
            emit(fiber_lower(prefix), at(Direction::Initial, prefix, Rational(top), false), prefix, res,
                 node.left_period, need_pattern(ch));
        }
        for (std::size_t i = 0; i < node.middle.size();) {
            std::size_t j = i;
            while (j + 1 < node.middle.size() && node.middle[j + 1] == node.middle[i]) ++j;
            const CNodeP& ch = node.children[static_cast<std::size_t>(node.middle[i])];
            Int a = lstart + static_cast<Int>(i), b = lstart + static_cast<Int>(j);
            if (!is_false(ch)) {
                if (auto pat = pattern_of(ch)) {
                    emit(at(Direction::End, prefix, Rational(a), false), at(Direction::Initial, prefix, Rational(b), false),
                         prefix, {0}, 1, *pat);
                } else {
                    for (Int v = a; v <= b; ++v) {
                        auto next = prefix;
                        next.push_back(Rational(v));
                        walk(*ch, next);
                    }
                }
            }
            i = j + 1;
        }
        const Int rstart = std::max(node.left_start, node.right_start);
        for (int c = 0; c < nchild; ++c) {
            const CNodeP& ch = node.children[static_cast<std::size_t>(c)];
            auto res = residues_of(node.right_pattern, c);
            if (is_false(ch) || res.empty()) continue;
            Int bottom = rstart;
            while (node.right_pattern[static_cast<std::size_t>(mod_floor(bottom, node.right_period))] != c) ++bottom;
            emit(at(Direction::End, prefix, Rational(bottom), false), fiber_upper(prefix), prefix, res,
                 node.right_period, need_pattern(ch));
        }
    }

    void walk_dense(const CNode& node, const std::vector<Rational>& prefix) {
        const std::size_t last = node.labels.size() - 1;
        for (std::size_t s = 0; s <= last;) {
            std::size_t t = s;
            while (t + 1 <= last && node.labels[t + 1] == node.labels[s]) ++t;
            const CNodeP& ch = node.children[static_cast<std::size_t>(node.labels[s])];
            if (!is_false(ch)) {
                if (auto pat = pattern_of(ch)) {
                    DivSegment up = s == 0       ? fiber_lower(prefix)
                                    : s % 2 == 1 ? at(Direction::End, prefix, node.points[(s - 1) / 2], false)
                                                 : at(Direction::End, prefix, node.points[s / 2 - 1], true);
                    DivSegment lo = t == last    ? fiber_upper(prefix)
                                    : t % 2 == 1 ? at(Direction::Initial, prefix, node.points[(t - 1) / 2], false)
                                                 : at(Direction::Initial, prefix, node.points[t / 2], true);
                    emit(up, lo, prefix, {}, 1, *pat);
                } else {
                    if (s != t || s % 2 == 0) throw DomainError("set is not a finite union of nice sets");
                    auto next = prefix;
                    next.push_back(node.points[(s - 1) / 2]);
                    walk(*ch, next);
                }
            }
            s = t + 1;
        }
    }

    const GroupSpec& g_;
    std::map<std::string, std::optional<Pattern>> memo_;
    std::vector<NiceSet> out_;
};

}  // namespace

std::vector<NiceSet> nice_decompose(const GroupSpec& g, const CNodeP& set) { return Decomposer(g).run(set); }

std::vector<NiceSet> nice_decompose(const GroupSpec& g, const FormulaPtr& phi, const QeOptions& opts) {
    return nice_decompose(g, canonical_set(g, phi, opts));
}

// ---------------------------------------------------------------- printing

std::string describe(const DivSegment& s) {
    if (s.is_whole()) return "G";
    if (s.is_empty()) return "{}";
    std::string lhs = (s.n == 1 ? "" : std::to_string(s.n)) + "x";
    const char* op = s.direction == Direction::End ? (s.strict ? ">" : ">=") : (s.strict ? "<" : "<=");
    return lhs + " " + op + "@" + std::to_string(s.level) + " " + s.beta.str();
}

std::string describe(const NiceSet& s) {
    std::string out = describe(s.upper) + " & " + describe(s.lower);
    for (const auto& l : s.congr)
        out += std::string(" & ") + (l.positive ? "" : "!") + "x =@" + std::to_string(l.level) + " " + l.beta.str() +
               " mod " + std::to_string(l.modulus);
    return out;
}

FormulaPtr to_formula(const GroupSpec& g, const DivSegment& s, const std::string& var) {
    if (s.is_whole()) return f_true();
    if (s.is_empty()) return f_false();
    Term x = s.n * Term::var(g, var);
    Term b = Term::constant_of(s.beta);
    Rel r = s.strict ? Rel::Lt : Rel::Le;
    if (s.direction == Direction::End) return f_atom(Atom::rel_cmp(s.level, r, b, x));
    return f_atom(Atom::rel_cmp(s.level, r, x, b));
}

FormulaPtr to_formula(const GroupSpec& g, const CongruenceLiteral& l, const std::string& var) {
    Term lhs = l.z * Term::var(g, var);
    Element rhs = l.beta;
    if (l.offset != 0) {
        // offset counts copies of the least positive element of the last discrete coordinate
        int last = 0;
        for (int i = 1; i <= g.rank(); ++i)
            if (g.kind(i) == Kind::DiscreteZ) last = i;
        if (last == 0) throw DomainError("offset needs a discrete coordinate");
        rhs = rhs + l.offset * Element::unit(g, last);
    }
    FormulaPtr a = l.level == g.rank() ? f_atom(Atom::congr(l.modulus, lhs, Term::constant_of(rhs)))
                                       : f_atom(Atom::rel_congr(l.level, l.modulus, lhs, Term::constant_of(rhs)));
    return l.positive ? a : f_not(a);
}

FormulaPtr to_formula(const GroupSpec& g, const NiceSet& s, const std::string& var) {
    std::vector<FormulaPtr> parts;
    for (const auto& seg : {s.upper, s.lower})
        if (!seg.is_whole()) parts.push_back(to_formula(g, seg, var));
    for (const auto& l : s.congr) parts.push_back(to_formula(g, l, var));
    return f_and(std::move(parts));
}

FormulaPtr to_formula(const GroupSpec& g, const std::vector<NiceSet>& sets, const std::string& var) {
    std::vector<FormulaPtr> parts;
    for (const auto& s : sets) parts.push_back(to_formula(g, s, var));
    return f_or(std::move(parts));
}

// ---------------------------------------------------------------- segments

namespace {

std::string fresh_for(const FormulaPtr& phi, const std::string& base) {
    auto used = all_vars(phi);
    return used.count(base) ? fresh_name(base, used) : base;
}

// forall x, y: phi(x) and x < y -> phi(y)   (or y < x for initial segments)
bool closed_upward(const GroupSpec& g, const FormulaPtr& phi, bool up, const QeOptions& opts) {
    std::string x = unary_var(phi);
    std::string y = fresh_for(phi, "y");
    Term tx = Term::var(g, x), ty = Term::var(g, y);
    FormulaPtr order = up ? f_lt(tx, ty) : f_lt(ty, tx);
    FormulaPtr body = f_implies(f_and({phi, order}), substitute(phi, x, ty));
    return decide(g, f_forall(x, f_forall(y, body)), opts);
}

FormulaPtr minimum_body(const GroupSpec& g, const FormulaPtr& phi) {
    std::string x = unary_var(phi);
    std::string y = fresh_for(phi, "y");
    Term tx = Term::var(g, x), ty = Term::var(g, y);
    return f_and({phi, f_forall(y, f_implies(substitute(phi, x, ty), f_le(tx, ty)))});
}

}  // namespace

bool is_end_segment(const GroupSpec& g, const FormulaPtr& phi, const QeOptions& opts) {
    return closed_upward(g, phi, true, opts);
}

bool is_initial_segment(const GroupSpec& g, const FormulaPtr& phi, const QeOptions& opts) {
    return closed_upward(g, phi, false, opts);
}

bool has_minimum(const GroupSpec& g, const FormulaPtr& phi, const QeOptions& opts) {
    FormulaPtr body = minimum_body(g, phi);
    return decide(g, f_exists(unary_var(phi), body), opts);
}

std::optional<Element> minimum(const GroupSpec& g, const FormulaPtr& phi, const QeOptions& opts) {
    if (!has_minimum(g, phi, opts)) return std::nullopt;
    return witness(g, minimum_body(g, phi), opts);
}

FormulaPtr upward_closure(const FormulaPtr& phi) {
    std::string x = unary_var(phi);
    std::string y = fresh_for(phi, "y");
    // group spec is only needed for constants; variables carry no arity
    Term tx, ty;
    tx.coeffs[x] = 1;
    ty.coeffs[y] = 1;
    return f_exists(y, f_and({f_le(ty, tx), substitute(phi, x, ty)}));
}

FormulaPtr end_hull(const GroupSpec& g, const FormulaPtr& phi, const QeOptions& opts) {
    if (!satisfiable(g, phi, opts)) throw DomainError("end hull of the empty set");
    if (has_minimum(g, phi, opts)) throw DomainError("set has a least element");
    return upward_closure(phi);
}

ConvexSubgroup stabilizer(const GroupSpec& g, const FormulaPtr& phi, const QeOptions& opts) {
    std::string x = unary_var(phi);
    std::string d = fresh_for(phi, "d");
    Term tx = Term::var(g, x), td = Term::var(g, d);
    FormulaPtr shifted = substitute(phi, x, tx + td);
    for (int k = 0; k < g.rank(); ++k) {
        FormulaPtr in_sub = f_atom(Atom::rel_eq(k, td, Term::constant_of(Element::zero(g))));
        if (decide(g, f_forall(d, f_forall(x, f_implies(f_and({in_sub, phi}), shifted))), opts)) return {k};
    }
    return {g.rank()};
}

DivSegment to_div_segment(const GroupSpec& g, const FormulaPtr& phi, const QeOptions& opts) {
    std::string x = unary_var(phi);
    if (!is_end_segment(g, phi, opts)) {
        if (!is_initial_segment(g, phi, opts)) throw DomainError("not an end segment or an initial segment");
        DivSegment e = to_div_segment(g, f_not(phi), opts);
        DivSegment out{Direction::Initial, e.n, e.level, Bound::Finite, e.beta, !e.strict};
        if (e.is_whole()) out.bound = Bound::MinusInf;
        if (e.is_empty()) out.bound = Bound::PlusInf;
        return out;
    }
    DivSegment out{Direction::End, 1, 0, Bound::Finite, Element::zero(g), false};
    if (!satisfiable(g, phi, opts)) {
        out.bound = Bound::PlusInf;
        return out;
    }
    if (decide(g, f_forall(x, phi), opts)) {
        out.bound = Bound::MinusInf;
        return out;
    }
    auto sets = nice_decompose(g, phi, opts);
    const DivSegment& first = sets.front().upper;
    out.level = stabilizer(g, phi, opts).level;
    out.beta = first.beta;
    for (int i = out.level; i < g.rank(); ++i) out.beta.coords[static_cast<std::size_t>(i)] = Rational(0);
    out.strict = first.strict;
    return out;
}

}  // namespace oag
