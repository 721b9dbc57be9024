#include "oag/scalar.hpp"

#include <algorithm>
#include <optional>

#include "oag/errors.hpp"

namespace oag::scalar {

// ---------------------------------------------------------------- Lin

Lin Lin::var(const std::string& name, Rational c) {
    Lin l;
    if (!c.is_zero()) l.coeffs[name] = c;
    return l;
}

Lin Lin::constant_of(Rational c) {
    Lin l;
    l.constant = c;
    return l;
}

Rational Lin::coeff(const std::string& name) const {
    auto it = coeffs.find(name);
    return it == coeffs.end() ? Rational(0) : it->second;
}

Lin Lin::without(const std::string& name) const {
    Lin l = *this;
    l.coeffs.erase(name);
    return l;
}

Lin Lin::substitute(const std::string& name, const Lin& value) const {
    auto it = coeffs.find(name);
    if (it == coeffs.end()) return *this;
    return without(name) + it->second * value;
}

Rational Lin::eval(const Assignment& a) const {
    Rational r = constant;
    for (const auto& [v, c] : coeffs) {
        auto it = a.find(v);
        if (it == a.end()) throw DomainError("unbound variable " + v);
        r += c * it->second;
    }
    return r;
}

std::string Lin::str() const {
    std::vector<std::string> parts;
    for (const auto& [v, c] : coeffs) parts.push_back(c == Rational(1) ? v : "(* " + c.str() + " " + v + ")");
    if (!constant.is_zero() || parts.empty()) parts.push_back(constant.str());
    if (parts.size() == 1) return parts[0];
    std::string s = "(+";
    for (const auto& p : parts) s += " " + p;
    return s + ")";
}

Lin Lin::operator-() const { return Rational(-1) * *this; }

Lin operator+(const Lin& a, const Lin& b) {
    Lin r = a;
    for (const auto& [v, c] : b.coeffs) {
        Rational s = r.coeff(v) + c;
        if (s.is_zero())
            r.coeffs.erase(v);
        else
            r.coeffs[v] = s;
    }
    r.constant += b.constant;
    return r;
}

Lin operator-(const Lin& a, const Lin& b) { return a + (-b); }

Lin operator*(const Rational& s, const Lin& a) {
    Lin r;
    if (s.is_zero()) return r;
    for (const auto& [v, c] : a.coeffs) r.coeffs[v] = s * c;
    r.constant = s * a.constant;
    return r;
}

// ---------------------------------------------------------------- atoms

namespace {

std::string lhs_str(const Lin& e) {
    Lin v = e;
    v.constant = Rational(0);
    return v.str();
}

std::string atom_key(const SAtom& a) {
    std::string l = lhs_str(a.e), r = (-a.e.constant).str();
    if ((a.type == SAtom::Type::Div || a.type == SAtom::Type::NDiv) && a.e.constant.is_integer())
        r = std::to_string(mod_floor(-a.e.constant.num(), a.modulus));
    switch (a.type) {
        case SAtom::Type::Lt:
            return "(< " + l + " " + r + ")";
        case SAtom::Type::Eq:
            return "(= " + l + " " + r + ")";
        case SAtom::Type::Div:
            return "(congr " + std::to_string(a.modulus) + " " + l + " " + r + ")";
        case SAtom::Type::NDiv:
            return "(not (congr " + std::to_string(a.modulus) + " " + l + " " + r + "))";
    }
    return "";
}

bool ground_truth(const SAtom& a) {
    const Rational& c = a.e.constant;
    switch (a.type) {
        case SAtom::Type::Lt:
            return c.sign() < 0;
        case SAtom::Type::Eq:
            return c.is_zero();
        case SAtom::Type::Div:
        case SAtom::Type::NDiv: {
            bool d = c.is_integer() && mod_floor(c.num(), a.modulus) == 0;
            return a.type == SAtom::Type::Div ? d : !d;
        }
    }
    return false;
}

// Multiplies through so that every coefficient and the constant are integers.
Lin clear_denominators(const Lin& e) {
    Int d = e.constant.den();
    for (const auto& [v, c] : e.coeffs) d = lcm(d, c.den());
    return d == 1 ? e : Rational(d) * e;
}

Int coeff_gcd(const Lin& e) {
    Int g = 0;
    for (const auto& [v, c] : e.coeffs) g = gcd(g, c.num());
    return g;
}

// Returns false if the atom folded to a constant; `value` then holds it.
bool normalize(SAtom& a, bool& value) {
    using T = SAtom::Type;
    if (a.sort == Kind::DenseQ) {
        if (a.type == T::Div || a.type == T::NDiv) {
            value = a.type == T::Div;  // Q is divisible
            return false;
        }
        if (a.e.is_constant()) {
            value = ground_truth(a);
            return false;
        }
        Rational lead = a.e.coeffs.begin()->second;
        Rational s = a.type == T::Lt ? Rational(1) / (lead.sign() < 0 ? -lead : lead) : Rational(1) / lead;
        a.e = s * a.e;
        return true;
    }
    if (a.type == T::Div || a.type == T::NDiv) {
        if (clear_denominators(a.e) != a.e) throw DomainError("congruence over non-integral expression");
        Int m = a.modulus;
        Lin r;
        for (const auto& [v, c] : a.e.coeffs) {
            Int k = mod_floor(c.num(), m);
            if (k != 0) r.coeffs[v] = Rational(k);
        }
        r.constant = Rational(mod_floor(a.e.constant.num(), m));
        Int g = gcd(m, gcd(coeff_gcd(r), r.constant.num()));
        if (g > 1) {
            m /= g;
            r = Rational(1, g) * r;
        }
        a.e = r;
        a.modulus = m;
        if (m == 1 || r.is_constant()) {
            a.modulus = m;
            value = m == 1 ? a.type == T::Div : ground_truth(a);
            return false;
        }
        return true;
    }
    a.e = clear_denominators(a.e);
    if (a.e.is_constant()) {
        value = ground_truth(a);
        return false;
    }
    Int g = coeff_gcd(a.e);
    Int d = a.e.constant.num();
    if (a.type == T::Eq) {
        if (mod_floor(d, g) != 0) {
            value = false;
            return false;
        }
        Rational s(1, g);
        if (a.e.coeffs.begin()->second.sign() < 0) s = -s;
        a.e = s * a.e;
        return true;
    }
    Lin r = Rational(1, g) * a.e.without("");
    r.constant = Rational(floor_div(d, g));
    a.e = r;
    return true;
}

NodeP make(Node n) { return std::make_shared<const Node>(std::move(n)); }

}  // namespace

NodeP mk_true() {
    static const NodeP t = [] {
        Node n;
        n.op = Node::Op::True;
        n.key = "true";
        return make(n);
    }();
    return t;
}

NodeP mk_false() {
    static const NodeP f = [] {
        Node n;
        n.op = Node::Op::False;
        n.key = "false";
        return make(n);
    }();
    return f;
}

NodeP mk_atom(SAtom a) {
    bool value = false;
    if (!normalize(a, value)) return value ? mk_true() : mk_false();
    Node n;
    n.op = Node::Op::Atom;
    n.key = atom_key(a);
    n.atom = std::move(a);
    return make(std::move(n));
}

NodeP mk_lt(Kind s, Lin e) { return mk_atom(SAtom{SAtom::Type::Lt, s, std::move(e), 0}); }
NodeP mk_eq(Kind s, Lin e) { return mk_atom(SAtom{SAtom::Type::Eq, s, std::move(e), 0}); }
NodeP mk_div(Int m, Lin e) { return mk_atom(SAtom{SAtom::Type::Div, Kind::DiscreteZ, std::move(e), m}); }

bool is_true(const NodeP& n) { return n->op == Node::Op::True; }
bool is_false(const NodeP& n) { return n->op == Node::Op::False; }

NodeP mk_not(NodeP a) {
    if (is_true(a)) return mk_false();
    if (is_false(a)) return mk_true();
    if (a->op == Node::Op::Not) return a->kids[0];
    Node n;
    n.op = Node::Op::Not;
    n.key = "(not " + a->key + ")";
    n.size = a->size + 1;
    n.kids = {std::move(a)};
    return make(std::move(n));
}

namespace {
// Combines order atoms over the same linear form into one interval, and
// congruences over the same form and modulus. Sets `folded` when the whole
// junction collapses to a constant.
struct FormBounds {
    Kind sort = Kind::DiscreteZ;
    Lin form;
    std::vector<std::pair<Rational, bool>> lower, upper;  // value, strict
    std::vector<Rational> points;
    std::vector<NodeP> originals;
};

NodeP upper_atom(Kind s, const Lin& form, const Rational& v, bool strict, std::vector<NodeP>& out) {
    Lin e = form - Lin::constant_of(v);
    if (s == Kind::DiscreteZ && !strict) e = e - Lin::constant_of(Rational(1));
    out.push_back(mk_lt(s, e));
    if (s == Kind::DenseQ && !strict) out.push_back(mk_eq(s, form - Lin::constant_of(v)));
    return nullptr;
}

NodeP lower_atom(Kind s, const Lin& form, const Rational& v, bool strict, std::vector<NodeP>& out) {
    Lin e = -form + Lin::constant_of(v);
    if (s == Kind::DiscreteZ && !strict) e = e - Lin::constant_of(Rational(1));
    out.push_back(mk_lt(s, e));
    if (s == Kind::DenseQ && !strict) out.push_back(mk_eq(s, form - Lin::constant_of(v)));
    return nullptr;
}

// Emits the merged constraints of one form. Returns 0 normally, 1 if the
// junction is constant true, -1 if constant false.
int merge_form(FormBounds& b, bool is_and, std::vector<NodeP>& out) {
    bool z = b.sort == Kind::DiscreteZ;
    // on Z make every bound non-strict
    if (z) {
        for (auto& [v, st] : b.lower)
            if (st) v = v + Rational(1), st = false;
        for (auto& [v, st] : b.upper)
            if (st) v = v - Rational(1), st = false;
    }
    auto tighter_lo = [](const std::pair<Rational, bool>& a, const std::pair<Rational, bool>& c) {
        return a.first > c.first || (a.first == c.first && a.second && !c.second);
    };
    auto tighter_hi = [](const std::pair<Rational, bool>& a, const std::pair<Rational, bool>& c) {
        return a.first < c.first || (a.first == c.first && a.second && !c.second);
    };
    std::optional<std::pair<Rational, bool>> lo, hi;
    for (const auto& l : b.lower)
        if (!lo || (is_and ? tighter_lo(l, *lo) : tighter_lo(*lo, l))) lo = l;
    for (const auto& u : b.upper)
        if (!hi || (is_and ? tighter_hi(u, *hi) : tighter_hi(*hi, u))) hi = u;
    std::sort(b.points.begin(), b.points.end());
    b.points.erase(std::unique(b.points.begin(), b.points.end()), b.points.end());
    auto above = [&](const Rational& v) { return !lo || v > lo->first || (v == lo->first && !lo->second); };
    auto below = [&](const Rational& v) { return !hi || v < hi->first || (v == hi->first && !hi->second); };

    if (is_and) {
        if (b.points.size() > 1) return -1;
        if (b.points.size() == 1) {
            const Rational& v = b.points[0];
            if (!above(v) || !below(v)) return -1;
            out.push_back(mk_eq(b.sort, b.form - Lin::constant_of(v)));
            return 0;
        }
        if (lo && hi) {
            if (lo->first > hi->first) return -1;
            if (lo->first == hi->first) {
                if (lo->second || hi->second) return -1;
                out.push_back(mk_eq(b.sort, b.form - Lin::constant_of(lo->first)));
                return 0;
            }
        }
        std::vector<NodeP> parts;
        if (lo) lower_atom(b.sort, b.form, lo->first, lo->second, parts);
        if (hi) upper_atom(b.sort, b.form, hi->first, hi->second, parts);
        if (!z) {
            // rebuild so that each non-strict dense bound is its own disjunction
            parts.clear();
            if (lo) {
                std::vector<NodeP> l;
                lower_atom(b.sort, b.form, lo->first, lo->second, l);
                parts.push_back(l.size() == 1 ? l[0] : mk_or(std::move(l)));
            }
            if (hi) {
                std::vector<NodeP> u;
                upper_atom(b.sort, b.form, hi->first, hi->second, u);
                parts.push_back(u.size() == 1 ? u[0] : mk_or(std::move(u)));
            }
        }
        out.insert(out.end(), parts.begin(), parts.end());
        return 0;
    }

    // disjunction: absorb points into covering or adjacent bounds
    auto in_hi = [&](const Rational& v) { return hi && (v < hi->first || (v == hi->first && !hi->second)); };
    auto in_lo = [&](const Rational& v) { return lo && (v > lo->first || (v == lo->first && !lo->second)); };
    std::vector<Rational> keep;
    for (const auto& v : b.points) {
        if (in_hi(v) || in_lo(v)) continue;
        if (hi && z && v == hi->first + Rational(1))
            hi->first = v;
        else if (hi && !z && v == hi->first)
            hi->second = false;
        else
            keep.push_back(v);
    }
    std::vector<Rational> keep2;
    for (auto it = keep.rbegin(); it != keep.rend(); ++it) {
        const Rational& v = *it;
        if (lo && z && v == lo->first - Rational(1))
            lo->first = v;
        else if (lo && !z && v == lo->first)
            lo->second = false;
        else
            keep2.push_back(v);
    }
    keep.assign(keep2.rbegin(), keep2.rend());
    if (lo && hi) {
        if (z && lo->first <= hi->first + Rational(1)) return 1;
        if (!z && (lo->first < hi->first || (lo->first == hi->first && !(lo->second && hi->second)))) return 1;
    }
    if (lo) lower_atom(b.sort, b.form, lo->first, lo->second, out);
    if (hi) upper_atom(b.sort, b.form, hi->first, hi->second, out);
    for (const auto& v : keep) out.push_back(mk_eq(b.sort, b.form - Lin::constant_of(v)));
    return 0;
}

struct FormDiv {
    std::vector<Rational> pos, neg;  // constants of Div / NDiv atoms
    std::vector<NodeP> originals;
};

int merge_bounds(std::vector<NodeP>& flat, bool is_and) {
    std::map<std::string, FormBounds> forms;
    std::map<std::string, FormDiv> divs;
    std::vector<NodeP> others;
    for (auto& k : flat) {
        if (k->op != Node::Op::Atom) {
            others.push_back(k);
            continue;
        }
        const SAtom& a = k->atom;
        Lin var = a.e;
        var.constant = Rational(0);
        if (a.type == SAtom::Type::Div || a.type == SAtom::Type::NDiv) {
            auto& d = divs[std::to_string(a.modulus) + "|" + var.str()];
            (a.type == SAtom::Type::Div ? d.pos : d.neg).push_back(a.e.constant);
            d.originals.push_back(k);
            continue;
        }
        bool flip = var.coeffs.begin()->second.sign() < 0;
        Lin form = flip ? -var : var;
        auto& b = forms[std::string(a.sort == Kind::DiscreteZ ? "Z" : "Q") + form.str()];
        b.sort = a.sort;
        b.form = form;
        b.originals.push_back(k);
        const Rational& c = a.e.constant;
        if (a.type == SAtom::Type::Eq)
            b.points.push_back(flip ? c : -c);
        else if (flip)
            b.lower.emplace_back(c, true);  // -form + c < 0
        else
            b.upper.emplace_back(-c, true);  // form + c < 0
    }
    std::vector<NodeP> out = std::move(others);
    for (auto& [key, b] : forms) {
        if (b.originals.size() == 1) {
            out.push_back(b.originals[0]);
            continue;
        }
        int r = merge_form(b, is_and, out);
        if (r != 0) return r;
    }
    for (auto& [key, d] : divs) {
        std::sort(d.pos.begin(), d.pos.end());
        d.pos.erase(std::unique(d.pos.begin(), d.pos.end()), d.pos.end());
        std::sort(d.neg.begin(), d.neg.end());
        d.neg.erase(std::unique(d.neg.begin(), d.neg.end()), d.neg.end());
        bool clash = false;
        for (const auto& p : d.pos)
            if (std::binary_search(d.neg.begin(), d.neg.end(), p)) clash = true;
        if (clash) return is_and ? -1 : 1;
        if (is_and && d.pos.size() > 1) return -1;
        if (!is_and && d.neg.size() > 1) return 1;
        if (is_and && d.pos.size() == 1) {
            for (const auto& k : d.originals)
                if (k->atom.type == SAtom::Type::Div) out.push_back(k);
            continue;
        }
        if (!is_and && d.neg.size() == 1) {
            for (const auto& k : d.originals)
                if (k->atom.type == SAtom::Type::NDiv) out.push_back(k);
            continue;
        }
        out.insert(out.end(), d.originals.begin(), d.originals.end());
    }
    flat = std::move(out);
    return 0;
}

NodeP junction(Node::Op op, std::vector<NodeP> kids) {
    bool is_and = op == Node::Op::And;
    std::vector<NodeP> flat;
    for (auto& k : kids) {
        if (k->op == op) {
            flat.insert(flat.end(), k->kids.begin(), k->kids.end());
        } else if (is_true(k)) {
            if (!is_and) return mk_true();
        } else if (is_false(k)) {
            if (is_and) return mk_false();
        } else {
            flat.push_back(std::move(k));
        }
    }
    if (int r = merge_bounds(flat, is_and); r != 0) return r > 0 ? mk_true() : mk_false();
    // merging may have produced nested junctions or constants
    std::vector<NodeP> again;
    for (auto& k : flat) {
        if (k->op == op) {
            again.insert(again.end(), k->kids.begin(), k->kids.end());
        } else if (is_true(k)) {
            if (!is_and) return mk_true();
        } else if (is_false(k)) {
            if (is_and) return mk_false();
        } else {
            again.push_back(std::move(k));
        }
    }
    flat = std::move(again);
    std::sort(flat.begin(), flat.end(), [](const NodeP& a, const NodeP& b) { return a->key < b->key; });
    flat.erase(std::unique(flat.begin(), flat.end(), [](const NodeP& a, const NodeP& b) { return a->key == b->key; }),
               flat.end());
    // x together with (not x)
    for (const auto& k : flat)
        if (k->op == Node::Op::Not &&
            std::binary_search(flat.begin(), flat.end(), k->kids[0],
                               [](const NodeP& a, const NodeP& b) { return a->key < b->key; }))
            return is_and ? mk_false() : mk_true();
    // absorption: in an Or, a kid whose conjuncts include all of another kid's
    // is redundant; dually for And
    if (flat.size() > 1 && flat.size() <= 256) {
        Node::Op inner = is_and ? Node::Op::Or : Node::Op::And;
        std::vector<std::vector<std::string>> parts(flat.size());
        for (size_t i = 0; i < flat.size(); ++i) {
            if (flat[i]->op == inner)
                for (const auto& c : flat[i]->kids) parts[i].push_back(c->key);
            else
                parts[i].push_back(flat[i]->key);
            std::sort(parts[i].begin(), parts[i].end());
        }
        std::vector<bool> drop(flat.size(), false);
        for (size_t i = 0; i < flat.size(); ++i) {
            if (flat[i]->op != inner) continue;
            for (size_t j = 0; j < flat.size() && !drop[i]; ++j) {
                if (i == j || drop[j] || parts[j].size() >= parts[i].size()) continue;
                if (std::includes(parts[i].begin(), parts[i].end(), parts[j].begin(), parts[j].end())) drop[i] = true;
            }
        }
        std::vector<NodeP> kept;
        for (size_t i = 0; i < flat.size(); ++i)
            if (!drop[i]) kept.push_back(flat[i]);
        flat = std::move(kept);
    }
    if (flat.empty()) return is_and ? mk_true() : mk_false();
    if (flat.size() == 1) return flat[0];
    Node n;
    n.op = op;
    n.key = is_and ? "(and" : "(or";
    n.size = 1;
    for (const auto& k : flat) {
        n.key += " " + k->key;
        n.size += k->size;
    }
    n.key += ")";
    n.kids = std::move(flat);
    return make(std::move(n));
}

NodeP quant(Node::Op op, const std::string& v, Kind s, NodeP body) {
    if (!mentions(body, v)) return body;
    Node n;
    n.op = op;
    n.var = v;
    n.sort = s;
    n.key = std::string(op == Node::Op::Exists ? "(exists (" : "(forall (") + v + ") " + body->key + ")";
    n.size = body->size + 1;
    n.kids = {std::move(body)};
    return make(std::move(n));
}
}  // namespace

NodeP mk_and(std::vector<NodeP> kids) { return junction(Node::Op::And, std::move(kids)); }
NodeP mk_or(std::vector<NodeP> kids) { return junction(Node::Op::Or, std::move(kids)); }
NodeP mk_exists(const std::string& v, Kind s, NodeP body) { return quant(Node::Op::Exists, v, s, std::move(body)); }
NodeP mk_forall(const std::string& v, Kind s, NodeP body) { return quant(Node::Op::Forall, v, s, std::move(body)); }

bool is_quantifier_free(const NodeP& n) {
    if (n->op == Node::Op::Exists || n->op == Node::Op::Forall) return false;
    return std::all_of(n->kids.begin(), n->kids.end(), [](const NodeP& k) { return is_quantifier_free(k); });
}

std::string print(const NodeP& n) { return n->key; }

namespace {
void collect(const NodeP& n, std::set<std::string>& bound, std::set<std::string>& out) {
    if (n->op == Node::Op::Atom) {
        for (const auto& [v, c] : n->atom.e.coeffs)
            if (!bound.count(v)) out.insert(v);
        return;
    }
    if (n->op == Node::Op::Exists || n->op == Node::Op::Forall) {
        bool fresh = bound.insert(n->var).second;
        collect(n->kids[0], bound, out);
        if (fresh) bound.erase(n->var);
        return;
    }
    for (const auto& k : n->kids) collect(k, bound, out);
}
}  // namespace

std::set<std::string> free_vars(const NodeP& n) {
    std::set<std::string> bound, out;
    collect(n, bound, out);
    return out;
}

bool mentions(const NodeP& n, const std::string& var) {
    if (n->op == Node::Op::Atom) return n->atom.e.has(var);
    if ((n->op == Node::Op::Exists || n->op == Node::Op::Forall) && n->var == var) return false;
    return std::any_of(n->kids.begin(), n->kids.end(), [&](const NodeP& k) { return mentions(k, var); });
}

// ---------------------------------------------------------------- transforms

NodeP nnf(const NodeP& n, bool negate) {
    using Op = Node::Op;
    using T = SAtom::Type;
    switch (n->op) {
        case Op::True:
            return negate ? mk_false() : mk_true();
        case Op::False:
            return negate ? mk_true() : mk_false();
        case Op::Atom: {
            if (!negate) return n;
            const SAtom& a = n->atom;
            switch (a.type) {
                case T::Lt:
                    if (a.sort == Kind::DiscreteZ) return mk_lt(a.sort, -a.e - Lin::constant_of(Rational(1)));
                    return mk_or({mk_lt(a.sort, -a.e), mk_eq(a.sort, a.e)});
                case T::Eq:
                    return mk_or({mk_lt(a.sort, a.e), mk_lt(a.sort, -a.e)});
                case T::Div:
                    return mk_atom(SAtom{T::NDiv, a.sort, a.e, a.modulus});
                case T::NDiv:
                    return mk_atom(SAtom{T::Div, a.sort, a.e, a.modulus});
            }
            return n;
        }
        case Op::Not:
            return nnf(n->kids[0], !negate);
        case Op::And:
        case Op::Or: {
            std::vector<NodeP> kids;
            kids.reserve(n->kids.size());
            for (const auto& k : n->kids) kids.push_back(nnf(k, negate));
            bool conj = (n->op == Op::And) != negate;
            return conj ? mk_and(std::move(kids)) : mk_or(std::move(kids));
        }
        default:
            throw DomainError("nnf expects a quantifier-free formula");
    }
}

NodeP substitute(const NodeP& n, const std::string& var, const Lin& value) {
    using Op = Node::Op;
    switch (n->op) {
        case Op::True:
        case Op::False:
            return n;
        case Op::Atom: {
            if (!n->atom.e.has(var)) return n;
            SAtom a = n->atom;
            a.e = a.e.substitute(var, value);
            return mk_atom(std::move(a));
        }
        case Op::Not:
            return mk_not(substitute(n->kids[0], var, value));
        case Op::And:
        case Op::Or: {
            if (!mentions(n, var)) return n;
            std::vector<NodeP> kids;
            kids.reserve(n->kids.size());
            for (const auto& k : n->kids) kids.push_back(substitute(k, var, value));
            return n->op == Op::And ? mk_and(std::move(kids)) : mk_or(std::move(kids));
        }
        default:
            throw DomainError("scalar substitution expects a quantifier-free formula");
    }
}

bool evaluate(const NodeP& n, const Assignment& a) {
    using Op = Node::Op;
    switch (n->op) {
        case Op::True:
            return true;
        case Op::False:
            return false;
        case Op::Atom: {
            SAtom g = n->atom;
            g.e = Lin::constant_of(g.e.eval(a));
            return ground_truth(g);
        }
        case Op::Not:
            return !evaluate(n->kids[0], a);
        case Op::And:
            return std::all_of(n->kids.begin(), n->kids.end(), [&](const NodeP& k) { return evaluate(k, a); });
        case Op::Or:
            return std::any_of(n->kids.begin(), n->kids.end(), [&](const NodeP& k) { return evaluate(k, a); });
        default:
            throw DomainError("evaluate expects a quantifier-free formula");
    }
}

// ---------------------------------------------------------------- lowering

std::pair<std::string, int> split_name(const std::string& scalar) {
    auto dot = scalar.rfind('.');
    if (dot == std::string::npos) throw DomainError("not a coordinate variable: " + scalar);
    return {scalar.substr(0, dot), std::stoi(scalar.substr(dot + 1))};
}

std::string coord_name(const std::string& var, int i) { return var + "." + std::to_string(i); }

Kind sort_of(const GroupSpec& g, const std::string& scalar) { return g.kind(split_name(scalar).second); }

namespace {

struct Lowerer {
    const GroupSpec& g;

    Lin coord(const Term& t, int i) const {
        Lin l;
        for (const auto& [v, c] : t.coeffs) l.coeffs[coord_name(v, i)] = Rational(c);
        if (t.constant.arity() > 0) l.constant = t.constant.coords.at(static_cast<std::size_t>(i - 1));
        return l;
    }

    // d <_lex 0 (or <=) on coordinates from..k, built innermost first
    NodeP lex(const Term& d, int from, int k, bool strict) const {
        if (from > k) return strict ? mk_false() : mk_true();
        NodeP cur = mk_lt(g.kind(k), coord(d, k));
        if (!strict) cur = mk_or({cur, mk_eq(g.kind(k), coord(d, k))});
        for (int i = k - 1; i >= from; --i)
            cur = mk_or({mk_lt(g.kind(i), coord(d, i)), mk_and({mk_eq(g.kind(i), coord(d, i)), cur})});
        return cur;
    }

    NodeP all_eq(const Term& d, int k) const {
        std::vector<NodeP> parts;
        for (int i = 1; i <= k; ++i) parts.push_back(mk_eq(g.kind(i), coord(d, i)));
        return mk_and(std::move(parts));
    }

    NodeP congr(const Term& d, int k, Int m) const {
        std::vector<NodeP> parts;
        for (int i = 1; i <= k; ++i)
            if (g.kind(i) == Kind::DiscreteZ) parts.push_back(mk_div(m, coord(d, i)));
        return mk_and(std::move(parts));
    }

    NodeP cmp(Rel r, const Term& d, int k) const {
        switch (r) {
            case Rel::Lt:
                return lex(d, 1, k, true);
            case Rel::Le:
                return lex(d, 1, k, false);
            case Rel::Eq:
                return all_eq(d, k);
        }
        return mk_false();
    }

    NodeP atom(const Atom& a) const {
        Term d = a.lhs - a.rhs;
        int n = g.rank();
        switch (a.kind) {
            case Atom::Kind::Cmp:
                return cmp(a.rel, d, n);
            case Atom::Kind::Congr:
                return congr(d, n, a.modulus);
            case Atom::Kind::RelCmp:
                return cmp(a.rel, d, a.level);
            case Atom::Kind::RelCongr:
                return congr(d, a.level, a.modulus);
            case Atom::Kind::RelEq:
                return all_eq(d, a.level);
        }
        return mk_false();
    }

    // A full-rank comparison of a non-constant term against a constant, as a
    // non-strict bound on the term with positive leading coefficient.
    struct Bound {
        Term t;
        Element c;
        bool upper = false;
    };

    std::optional<Bound> bound_of(const FormulaPtr& f) const {
        if (f->op != Formula::Op::Atom || f->atom.kind != Atom::Kind::Cmp || f->atom.rel == Rel::Eq) return std::nullopt;
        int n = g.rank();
        bool strict = f->atom.rel == Rel::Lt;
        if (strict && g.kind(n) != Kind::DiscreteZ) return std::nullopt;
        Term d = f->atom.lhs - f->atom.rhs;
        if (d.is_constant()) return std::nullopt;
        Element c = d.constant.arity() == 0 ? Element::zero(g) : d.constant;
        d.constant = Element::zero(g);
        Bound b;
        if (d.coeffs.begin()->second > 0) {  // d <= -c
            b.t = d;
            b.c = -c;
            b.upper = true;
            if (strict) b.c = b.c - Element::unit(g, n);
        } else {  // -d >= c
            b.t = -d;
            b.c = c;
            if (strict) b.c = b.c + Element::unit(g, n);
        }
        return b;
    }

    // lo <= t <= hi: the shared leading coordinates become equations
    NodeP box(const Term& t, const Element& lo, const Element& hi) const {
        int n = g.rank(), p = 0;
        while (p < n && lo.coords[static_cast<std::size_t>(p)] == hi.coords[static_cast<std::size_t>(p)]) ++p;
        if (p < n && lo.coords[static_cast<std::size_t>(p)] > hi.coords[static_cast<std::size_t>(p)]) return mk_false();
        std::vector<NodeP> parts;
        Term to_lo = t - Term::constant_of(lo), to_hi = t - Term::constant_of(hi);
        for (int i = 1; i <= p; ++i) parts.push_back(mk_eq(g.kind(i), coord(to_lo, i)));
        parts.push_back(lex(-to_lo, p + 1, n, false));
        parts.push_back(lex(to_hi, p + 1, n, false));
        return mk_and(std::move(parts));
    }

    NodeP conjunction(const std::vector<FormulaPtr>& kids) const {
        std::vector<std::optional<Bound>> bounds;
        for (const auto& k : kids) bounds.push_back(bound_of(k));
        std::vector<bool> used(kids.size(), false);
        std::vector<NodeP> out;
        for (std::size_t i = 0; i < kids.size(); ++i) {
            if (!bounds[i] || used[i]) continue;
            for (std::size_t j = i + 1; j < kids.size(); ++j) {
                if (!bounds[j] || used[j] || bounds[j]->upper == bounds[i]->upper || !(bounds[j]->t == bounds[i]->t))
                    continue;
                const Bound& lo = bounds[i]->upper ? *bounds[j] : *bounds[i];
                const Bound& hi = bounds[i]->upper ? *bounds[i] : *bounds[j];
                out.push_back(box(lo.t, lo.c, hi.c));
                used[i] = used[j] = true;
                break;
            }
        }
        for (std::size_t i = 0; i < kids.size(); ++i)
            if (!used[i]) out.push_back(run(kids[i]));
        return mk_and(std::move(out));
    }

    NodeP run(const FormulaPtr& f) const {
        using Op = Formula::Op;
        switch (f->op) {
            case Op::True:
                return mk_true();
            case Op::False:
                return mk_false();
            case Op::Atom:
                return atom(f->atom);
            case Op::Not:
                return mk_not(run(f->kids[0]));
            case Op::And:
                return conjunction(f->kids);
            case Op::Or: {
                std::vector<NodeP> kids;
                for (const auto& k : f->kids) kids.push_back(run(k));
                return f->op == Op::And ? mk_and(std::move(kids)) : mk_or(std::move(kids));
            }
            case Op::Implies:
                return mk_or({mk_not(run(f->kids[0])), run(f->kids[1])});
            case Op::Iff: {
                auto a = run(f->kids[0]), b = run(f->kids[1]);
                return mk_or({mk_and({a, b}), mk_and({mk_not(a), mk_not(b)})});
            }
            case Op::Exists:
            case Op::Forall: {
                NodeP body = run(f->kids[0]);
                for (int i = g.rank(); i >= 1; --i)
                    body = f->op == Op::Exists ? mk_exists(coord_name(f->var, i), g.kind(i), body)
                                               : mk_forall(coord_name(f->var, i), g.kind(i), body);
                return body;
            }
        }
        return mk_false();
    }
};

}  // namespace

NodeP lower(const GroupSpec& g, const FormulaPtr& f) { return Lowerer{g}.run(f); }

Assignment scalarize(const std::map<std::string, Element>& a) {
    Assignment out;
    for (const auto& [v, e] : a)
        for (int i = 1; i <= e.arity(); ++i) out[coord_name(v, i)] = e.coords[static_cast<std::size_t>(i - 1)];
    return out;
}

namespace {
// Facts gathered from enclosing conjunctions: an interval per linear form
// (sign normalised, constant dropped) plus congruence atoms.
struct Interval {
    std::optional<std::pair<Rational, bool>> lo, hi;  // value, strict
};

struct Facts {
    std::map<std::string, Interval> order;
    std::map<std::string, std::vector<std::pair<bool, Rational>>> divs;  // positive?, constant
};

std::string order_key(const SAtom& a, bool& flip) {
    Lin var = a.e;
    var.constant = Rational(0);
    flip = var.coeffs.begin()->second.sign() < 0;
    return std::string(a.sort == Kind::DiscreteZ ? "Z" : "Q") + (flip ? -var : var).str();
}

std::string div_key(const SAtom& a) {
    Lin var = a.e;
    var.constant = Rational(0);
    return std::to_string(a.modulus) + "|" + var.str();
}

// Interval of the (normalised) form described by an order atom; on Z the
// form takes integer values so bounds become non-strict.
Interval atom_interval(const SAtom& a, bool flip) {
    const Rational& c = a.e.constant;
    Interval iv;
    if (a.type == SAtom::Type::Eq) {
        Rational p = flip ? c : -c;
        iv.lo = std::make_pair(p, false);
        iv.hi = std::make_pair(p, false);
        return iv;
    }
    if (flip)
        iv.lo = std::make_pair(c, true);
    else
        iv.hi = std::make_pair(-c, true);
    if (a.sort == Kind::DiscreteZ) {
        if (iv.lo) iv.lo = std::make_pair(Rational(iv.lo->first.floor() + 1), false);
        if (iv.hi) iv.hi = std::make_pair(Rational(iv.hi->first.ceil() - 1), false);
    }
    return iv;
}

// a is at least as tight as b, as an upper (upper=true) or lower bound
bool tighter(const std::pair<Rational, bool>& a, const std::pair<Rational, bool>& b, bool upper) {
    if (a.first != b.first) return upper ? a.first < b.first : a.first > b.first;
    return a.second || !b.second;
}

bool separated(const std::pair<Rational, bool>& lo, const std::pair<Rational, bool>& hi) {
    return lo.first > hi.first || (lo.first == hi.first && (lo.second || hi.second));
}

void add_fact(Facts& f, const SAtom& a) {
    if (a.type == SAtom::Type::Div || a.type == SAtom::Type::NDiv) {
        f.divs[div_key(a)].emplace_back(a.type == SAtom::Type::Div, a.e.constant);
        return;
    }
    bool flip = false;
    std::string k = order_key(a, flip);
    Interval add = atom_interval(a, flip);
    Interval& cur = f.order[k];
    if (add.lo && (!cur.lo || tighter(*add.lo, *cur.lo, false))) cur.lo = add.lo;
    if (add.hi && (!cur.hi || tighter(*add.hi, *cur.hi, true))) cur.hi = add.hi;
}

// 1: implied by the facts, -1: refuted, 0: unknown
int decide(const Facts& f, const SAtom& a) {
    if (a.type == SAtom::Type::Div || a.type == SAtom::Type::NDiv) {
        bool pos = a.type == SAtom::Type::Div;
        if (auto it = f.divs.find(div_key(a)); it != f.divs.end())
            for (const auto& [fpos, c] : it->second) {
                Rational diff = a.e.constant - c;
                bool same = diff.is_integer() && mod_floor(diff.floor(), a.modulus) == 0;
                if (same) return fpos == pos ? 1 : -1;
                if (fpos && diff.is_integer()) return pos ? -1 : 1;
            }
        bool flip = false;
        std::string k = order_key(a, flip);
        auto it = f.order.find(k);
        if (it == f.order.end() || !it->second.lo || !it->second.hi) return 0;
        const Interval& iv = it->second;
        if (iv.lo->first != iv.hi->first || iv.lo->second || iv.hi->second) return 0;
        Rational v = (flip ? -iv.lo->first : iv.lo->first) + a.e.constant;
        if (!v.is_integer()) return 0;
        bool divides = mod_floor(v.floor(), a.modulus) == 0;
        return divides == pos ? 1 : -1;
    }
    bool flip = false;
    auto it = f.order.find(order_key(a, flip));
    if (it == f.order.end()) return 0;
    const Interval& iv = it->second;
    Interval at = atom_interval(a, flip);
    if ((at.hi && iv.lo && separated(*iv.lo, *at.hi)) || (at.lo && iv.hi && separated(*at.lo, *iv.hi))) return -1;
    bool inside = (!at.hi || (iv.hi && tighter(*iv.hi, *at.hi, true))) && (!at.lo || (iv.lo && tighter(*iv.lo, *at.lo, false)));
    return inside ? 1 : 0;
}

NodeP simplify_under(const NodeP& n, const Facts& f) {
    switch (n->op) {
        case Node::Op::Atom: {
            int d = decide(f, n->atom);
            return d > 0 ? mk_true() : d < 0 ? mk_false() : n;
        }
        case Node::Op::Not:
            return mk_not(simplify_under(n->kids[0], f));
        case Node::Op::And:
        case Node::Op::Or: {
            bool is_and = n->op == Node::Op::And;
            Facts g = f;
            std::vector<NodeP> out;
            for (const auto& k : n->kids) {
                if (k->op != Node::Op::Atom) continue;
                NodeP r = simplify_under(k, f);
                if (is_and && is_false(r)) return r;
                if (!is_and && is_true(r)) return r;
                if (r->op == Node::Op::Atom) {
                    if (is_and) {
                        add_fact(g, r->atom);
                    } else {
                        NodeP neg = nnf(r, true);
                        if (neg->op == Node::Op::Atom) add_fact(g, neg->atom);
                    }
                }
                out.push_back(std::move(r));
            }
            for (const auto& k : n->kids)
                if (k->op != Node::Op::Atom) out.push_back(simplify_under(k, g));
            return is_and ? mk_and(std::move(out)) : mk_or(std::move(out));
        }
        default:
            return n;
    }
}
}  // namespace

NodeP simplify(const NodeP& n) { return simplify_under(n, Facts{}); }

}  // namespace oag::scalar

