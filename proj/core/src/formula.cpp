#include "oag/formula.hpp"

#include <cctype>
#include <functional>

#include "oag/errors.hpp"

namespace oag {

// ---------------------------------------------------------------- terms

Term Term::var(const GroupSpec& g, const std::string& name) {
    Term t;
    t.coeffs[name] = 1;
    t.constant = Element::zero(g);
    return t;
}

Term Term::constant_of(Element e) {
    Term t;
    t.constant = std::move(e);
    return t;
}

Term Term::operator-() const { return Int{-1} * *this; }

Term operator+(const Term& a, const Term& b) {
    Term r = a;
    for (const auto& [v, c] : b.coeffs) {
        Int s = add_checked(r.coeffs[v], c);
        if (s == 0)
            r.coeffs.erase(v);
        else
            r.coeffs[v] = s;
    }
    // An empty constant stands for zero of whatever arity the other side has.
    if (b.constant.arity() == 0)
        r.constant = a.constant;
    else if (a.constant.arity() == 0)
        r.constant = b.constant;
    else
        r.constant = a.constant + b.constant;
    return r;
}

Term operator-(const Term& a, const Term& b) { return a + (-b); }

Term operator*(Int s, const Term& t) {
    Term r;
    if (s != 0)
        for (const auto& [v, c] : t.coeffs) r.coeffs[v] = mul_checked(s, c);
    r.constant = s * t.constant;
    return r;
}

// ---------------------------------------------------------------- atoms

Atom Atom::cmp(Rel r, Term a, Term b) {
    Atom at;
    at.kind = Kind::Cmp;
    at.rel = r;
    at.lhs = std::move(a);
    at.rhs = std::move(b);
    return at;
}

Atom Atom::congr(Int m, Term a, Term b) {
    Atom at;
    at.kind = Kind::Congr;
    at.modulus = m;
    at.lhs = std::move(a);
    at.rhs = std::move(b);
    return at;
}

Atom Atom::rel_cmp(int k, Rel r, Term a, Term b) {
    Atom at = cmp(r, std::move(a), std::move(b));
    at.kind = Kind::RelCmp;
    at.level = k;
    return at;
}

Atom Atom::rel_congr(int k, Int m, Term a, Term b) {
    Atom at = congr(m, std::move(a), std::move(b));
    at.kind = Kind::RelCongr;
    at.level = k;
    return at;
}

Atom Atom::rel_eq(int k, Term a, Term b) {
    Atom at = cmp(Rel::Eq, std::move(a), std::move(b));
    at.kind = Kind::RelEq;
    at.level = k;
    return at;
}

// ---------------------------------------------------------------- builders

namespace {
FormulaPtr make(Formula f) { return std::make_shared<const Formula>(std::move(f)); }

FormulaPtr flat(Formula::Op op, std::vector<FormulaPtr> kids) {
    std::vector<FormulaPtr> out;
    for (auto& k : kids) {
        if (k->op == op)
            out.insert(out.end(), k->kids.begin(), k->kids.end());
        else
            out.push_back(std::move(k));
    }
    if (out.empty()) return op == Formula::Op::And ? f_true() : f_false();
    if (out.size() == 1) return out.front();
    Formula f;
    f.op = op;
    f.kids = std::move(out);
    return make(std::move(f));
}
}  // namespace

FormulaPtr f_true() {
    static const FormulaPtr t = make(Formula{Formula::Op::True, {}, {}, {}});
    return t;
}

FormulaPtr f_false() {
    static const FormulaPtr f = make(Formula{Formula::Op::False, {}, {}, {}});
    return f;
}

FormulaPtr f_atom(Atom a) {
    Formula f;
    f.op = Formula::Op::Atom;
    f.atom = std::move(a);
    return make(std::move(f));
}

FormulaPtr f_not(FormulaPtr a) {
    Formula f;
    f.op = Formula::Op::Not;
    f.kids = {std::move(a)};
    return make(std::move(f));
}

FormulaPtr f_and(std::vector<FormulaPtr> kids) { return flat(Formula::Op::And, std::move(kids)); }
FormulaPtr f_or(std::vector<FormulaPtr> kids) { return flat(Formula::Op::Or, std::move(kids)); }

FormulaPtr f_implies(FormulaPtr a, FormulaPtr b) {
    Formula f;
    f.op = Formula::Op::Implies;
    f.kids = {std::move(a), std::move(b)};
    return make(std::move(f));
}

FormulaPtr f_iff(FormulaPtr a, FormulaPtr b) {
    Formula f;
    f.op = Formula::Op::Iff;
    f.kids = {std::move(a), std::move(b)};
    return make(std::move(f));
}

FormulaPtr f_exists(std::string v, FormulaPtr body) {
    Formula f;
    f.op = Formula::Op::Exists;
    f.var = std::move(v);
    f.kids = {std::move(body)};
    return make(std::move(f));
}

FormulaPtr f_forall(std::string v, FormulaPtr body) {
    Formula f;
    f.op = Formula::Op::Forall;
    f.var = std::move(v);
    f.kids = {std::move(body)};
    return make(std::move(f));
}

FormulaPtr f_lt(Term a, Term b) { return f_atom(Atom::cmp(Rel::Lt, std::move(a), std::move(b))); }
FormulaPtr f_le(Term a, Term b) { return f_atom(Atom::cmp(Rel::Le, std::move(a), std::move(b))); }
FormulaPtr f_eq(Term a, Term b) { return f_atom(Atom::cmp(Rel::Eq, std::move(a), std::move(b))); }

// ---------------------------------------------------------------- parser

namespace {

struct Sexp {
    bool is_list = false;
    std::string atom;
    std::vector<Sexp> items;
    int line = 1;
    int col = 1;
};

class Reader {
public:
    explicit Reader(const std::string& text) : text_(text) {}

    Sexp read_top() {
        skip_ws();
        if (pos_ >= text_.size()) throw ParseError("empty input", line_, col_);
        Sexp s = read();
        skip_ws();
        if (pos_ < text_.size()) throw ParseError("trailing input", line_, col_);
        return s;
    }

private:
    void advance() {
        if (text_[pos_] == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        ++pos_;
    }

    void skip_ws() {
        while (pos_ < text_.size()) {
            char c = text_[pos_];
            if (c == ';') {
                while (pos_ < text_.size() && text_[pos_] != '\n') advance();
            } else if (std::isspace(static_cast<unsigned char>(c))) {
                advance();
            } else {
                break;
            }
        }
    }

    Sexp read() {
        skip_ws();
        if (pos_ >= text_.size()) throw ParseError("unexpected end of input", line_, col_);
        Sexp s;
        s.line = line_;
        s.col = col_;
        char c = text_[pos_];
        if (c == ')') throw ParseError("unexpected ')'", line_, col_);
        if (c == '(') {
            advance();
            s.is_list = true;
            while (true) {
                skip_ws();
                if (pos_ >= text_.size()) throw ParseError("unclosed '('", s.line, s.col);
                if (text_[pos_] == ')') {
                    advance();
                    break;
                }
                s.items.push_back(read());
            }
            return s;
        }
        while (pos_ < text_.size()) {
            char d = text_[pos_];
            if (d == '(' || d == ')' || d == ';' || std::isspace(static_cast<unsigned char>(d))) break;
            s.atom += d;
            advance();
        }
        return s;
    }

    const std::string& text_;
    std::size_t pos_ = 0;
    int line_ = 1;
    int col_ = 1;
};

bool is_identifier(const std::string& s) {
    if (s.empty()) return false;
    if (!(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
    for (char c : s)
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'')) return false;
    return true;
}

const std::set<std::string>& keywords() {
    static const std::set<std::string> k = {"not", "and", "or", "implies", "iff", "exists", "forall",
                                            "c", "true", "false", "congr", "insub"};
    return k;
}

class Parser {
public:
    explicit Parser(const GroupSpec& g) : g_(g) {}

    [[noreturn]] void fail(const Sexp& s, const std::string& msg) { throw ParseError(msg, s.line, s.col); }

    Int parse_int(const Sexp& s) {
        if (s.is_list) fail(s, "expected integer");
        try {
            Rational r = Rational::parse(s.atom);
            if (!r.is_integer() || s.atom.find('/') != std::string::npos) fail(s, "expected integer");
            return r.num();
        } catch (const DomainError&) {
            fail(s, "expected integer, got '" + s.atom + "'");
        }
    }

    Term term(const Sexp& s) {
        if (!s.is_list) {
            if (!is_identifier(s.atom) || keywords().count(s.atom))
                fail(s, "expected term, got '" + s.atom + "'");
            return Term::var(g_, s.atom);
        }
        if (s.items.empty() || s.items[0].is_list) fail(s, "expected term operator");
        const std::string& op = s.items[0].atom;
        if (op == "c") {
            std::size_t n = s.items.size() - 1;
            if (static_cast<int>(n) != g_.rank())
                throw ArityError("constant at " + std::to_string(s.line) + ":" + std::to_string(s.col) +
                                 " has " + std::to_string(n) + " entries, group " + g_.str() + " has rank " +
                                 std::to_string(g_.rank()));
            Element e;
            for (std::size_t i = 1; i < s.items.size(); ++i) {
                const Sexp& q = s.items[i];
                if (q.is_list) fail(q, "expected number");
                Rational r;
                try {
                    r = Rational::parse(q.atom);
                } catch (const DomainError&) {
                    fail(q, "expected number, got '" + q.atom + "'");
                }
                if (g_.kind(static_cast<int>(i)) == Kind::DiscreteZ && !r.is_integer())
                    fail(q, "rational entry in discrete coordinate " + std::to_string(i));
                e.coords.push_back(r);
            }
            return Term::constant_of(std::move(e));
        }
        if (op == "+") {
            if (s.items.size() < 3) fail(s, "'+' needs at least two arguments");
            Term t = term(s.items[1]);
            for (std::size_t i = 2; i < s.items.size(); ++i) t = t + term(s.items[i]);
            return t;
        }
        if (op == "-") {
            if (s.items.size() == 2) return -term(s.items[1]);
            if (s.items.size() != 3) fail(s, "'-' takes two arguments");
            return term(s.items[1]) - term(s.items[2]);
        }
        if (op == "*") {
            if (s.items.size() != 3) fail(s, "'*' takes an integer and a term");
            return parse_int(s.items[1]) * term(s.items[2]);
        }
        fail(s, "unknown term operator '" + op + "'");
    }

    int level(const Sexp& s) {
        Int k = parse_int(s);
        if (k < 0 || k > g_.rank())
            throw DomainError("level " + std::to_string(k) + " out of range 0.." + std::to_string(g_.rank()) +
                              " at " + std::to_string(s.line) + ":" + std::to_string(s.col));
        return static_cast<int>(k);
    }

    Int modulus(const Sexp& s) {
        Int m = parse_int(s);
        if (m < 2)
            throw DomainError("modulus " + std::to_string(m) + " < 2 at " + std::to_string(s.line) + ":" +
                              std::to_string(s.col));
        return m;
    }

    void arity(const Sexp& s, std::size_t n) {
        if (s.items.size() != n)
            fail(s, "'" + s.items[0].atom + "' expects " + std::to_string(n - 1) + " arguments");
    }

    FormulaPtr formula(const Sexp& s) {
        if (!s.is_list) {
            if (s.atom == "true") return f_true();
            if (s.atom == "false") return f_false();
            fail(s, "expected formula, got '" + s.atom + "'");
        }
        if (s.items.empty() || s.items[0].is_list) fail(s, "expected formula operator");
        const std::string& op = s.items[0].atom;
        const auto& it = s.items;
        if (op == "not") {
            arity(s, 2);
            return f_not(formula(it[1]));
        }
        if (op == "and" || op == "or") {
            if (it.size() < 2) fail(s, "'" + op + "' needs arguments");
            std::vector<FormulaPtr> kids;
            for (std::size_t i = 1; i < it.size(); ++i) kids.push_back(formula(it[i]));
            return op == "and" ? f_and(std::move(kids)) : f_or(std::move(kids));
        }
        if (op == "implies") {
            arity(s, 3);
            return f_implies(formula(it[1]), formula(it[2]));
        }
        if (op == "iff") {
            arity(s, 3);
            return f_iff(formula(it[1]), formula(it[2]));
        }
        if (op == "exists" || op == "forall") {
            arity(s, 3);
            const Sexp& vs = it[1];
            if (!vs.is_list || vs.items.size() != 1 || vs.items[0].is_list || !is_identifier(vs.items[0].atom) ||
                keywords().count(vs.items[0].atom))
                fail(vs, "expected (variable)");
            auto body = formula(it[2]);
            return op == "exists" ? f_exists(vs.items[0].atom, body) : f_forall(vs.items[0].atom, body);
        }
        if (op == "<" || op == "<=" || op == "=") {
            arity(s, 3);
            Rel r = op == "<" ? Rel::Lt : (op == "<=" ? Rel::Le : Rel::Eq);
            return f_atom(Atom::cmp(r, term(it[1]), term(it[2])));
        }
        if (op == "congr") {
            arity(s, 4);
            return f_atom(Atom::congr(modulus(it[1]), term(it[2]), term(it[3])));
        }
        if (op == "lt@" || op == "le@") {
            arity(s, 4);
            return f_atom(Atom::rel_cmp(level(it[1]), op == "lt@" ? Rel::Lt : Rel::Le, term(it[2]), term(it[3])));
        }
        if (op == "eq@") {
            arity(s, 4);
            return f_atom(Atom::rel_eq(level(it[1]), term(it[2]), term(it[3])));
        }
        if (op == "congr@") {
            arity(s, 5);
            int k = level(it[1]);
            return f_atom(Atom::rel_congr(k, modulus(it[2]), term(it[3]), term(it[4])));
        }
        if (op == "insub") {
            arity(s, 3);
            int k = level(it[1]);
            return f_atom(Atom::rel_eq(k, term(it[2]), Term::constant_of(Element::zero(g_))));
        }
        fail(s, "unknown operator '" + op + "'");
    }

private:
    const GroupSpec& g_;
};

// Renames binders that shadow an enclosing binder or a free variable.
FormulaPtr alpha_normalize(const FormulaPtr& f, std::set<std::string>& used, std::set<std::string>& scope,
                           const std::set<std::string>& free) {
    using Op = Formula::Op;
    switch (f->op) {
        case Op::True:
        case Op::False:
        case Op::Atom:
            return f;
        case Op::Exists:
        case Op::Forall: {
            std::string v = f->var;
            FormulaPtr body = f->kids[0];
            if (scope.count(v) || free.count(v)) {
                std::string nv = fresh_name(v, used);
                used.insert(nv);
                body = substitute(body, v, Term::var(GroupSpec{}, nv));
                v = nv;
            }
            scope.insert(v);
            auto nb = alpha_normalize(body, used, scope, free);
            scope.erase(v);
            return f->op == Op::Exists ? f_exists(v, nb) : f_forall(v, nb);
        }
        default: {
            Formula g = *f;
            for (auto& k : g.kids) k = alpha_normalize(k, used, scope, free);
            return std::make_shared<const Formula>(std::move(g));
        }
    }
}

}  // namespace

FormulaPtr parse(const GroupSpec& g, const std::string& text) {
    Reader r(text);
    Sexp s = r.read_top();
    FormulaPtr f = Parser(g).formula(s);
    auto used = all_vars(f);
    std::set<std::string> scope;
    return alpha_normalize(f, used, scope, free_vars(f));
}

Term parse_term(const GroupSpec& g, const std::string& text) {
    Reader r(text);
    return Parser(g).term(r.read_top());
}

// ---------------------------------------------------------------- printer

std::string print(const Term& t) {
    std::vector<std::string> parts;
    for (const auto& [v, c] : t.coeffs) parts.push_back(c == 1 ? v : "(* " + std::to_string(c) + " " + v + ")");
    if (!t.constant.is_zero() || parts.empty()) {
        std::string c = "(c";
        for (const auto& q : t.constant.coords) c += " " + q.str();
        parts.push_back(c + ")");
    }
    if (parts.size() == 1) return parts[0];
    std::string out = "(+";
    for (const auto& p : parts) out += " " + p;
    return out + ")";
}

namespace {
const char* rel_name(Rel r) { return r == Rel::Lt ? "<" : (r == Rel::Le ? "<=" : "="); }

std::string print_atom(const Atom& a) {
    std::string l = print(a.lhs), r = print(a.rhs);
    switch (a.kind) {
        case Atom::Kind::Cmp:
            return std::string("(") + rel_name(a.rel) + " " + l + " " + r + ")";
        case Atom::Kind::Congr:
            return "(congr " + std::to_string(a.modulus) + " " + l + " " + r + ")";
        case Atom::Kind::RelCmp:
            return std::string("(") + (a.rel == Rel::Lt ? "lt@ " : "le@ ") + std::to_string(a.level) + " " + l + " " +
                   r + ")";
        case Atom::Kind::RelCongr:
            return "(congr@ " + std::to_string(a.level) + " " + std::to_string(a.modulus) + " " + l + " " + r + ")";
        case Atom::Kind::RelEq:
            return "(eq@ " + std::to_string(a.level) + " " + l + " " + r + ")";
    }
    return "";
}
}  // namespace

std::string print(const FormulaPtr& f) {
    using Op = Formula::Op;
    switch (f->op) {
        case Op::True:
            return "true";
        case Op::False:
            return "false";
        case Op::Atom:
            return print_atom(f->atom);
        case Op::Not:
            return "(not " + print(f->kids[0]) + ")";
        case Op::Exists:
            return "(exists (" + f->var + ") " + print(f->kids[0]) + ")";
        case Op::Forall:
            return "(forall (" + f->var + ") " + print(f->kids[0]) + ")";
        default: {
            std::string out = "(";
            out += f->op == Op::And ? "and" : f->op == Op::Or ? "or" : f->op == Op::Implies ? "implies" : "iff";
            for (const auto& k : f->kids) out += " " + print(k);
            return out + ")";
        }
    }
}

// ---------------------------------------------------------------- utilities

namespace {
void collect_free(const FormulaPtr& f, std::set<std::string>& bound, std::set<std::string>& out) {
    using Op = Formula::Op;
    if (f->op == Op::Atom) {
        for (const auto* t : {&f->atom.lhs, &f->atom.rhs})
            for (const auto& [v, c] : t->coeffs)
                if (!bound.count(v)) out.insert(v);
        return;
    }
    if (f->op == Op::Exists || f->op == Op::Forall) {
        bool fresh = bound.insert(f->var).second;
        collect_free(f->kids[0], bound, out);
        if (fresh) bound.erase(f->var);
        return;
    }
    for (const auto& k : f->kids) collect_free(k, bound, out);
}

void collect_all(const FormulaPtr& f, std::set<std::string>& out) {
    if (f->op == Formula::Op::Atom) {
        for (const auto* t : {&f->atom.lhs, &f->atom.rhs})
            for (const auto& [v, c] : t->coeffs) out.insert(v);
        return;
    }
    if (f->op == Formula::Op::Exists || f->op == Formula::Op::Forall) out.insert(f->var);
    for (const auto& k : f->kids) collect_all(k, out);
}

Term subst_term(const Term& t, const std::string& var, const Term& repl) {
    auto it = t.coeffs.find(var);
    if (it == t.coeffs.end()) return t;
    Term rest = t;
    Int c = it->second;
    rest.coeffs.erase(var);
    return rest + c * repl;
}
}  // namespace

std::set<std::string> free_vars(const FormulaPtr& f) {
    std::set<std::string> bound, out;
    collect_free(f, bound, out);
    return out;
}

std::set<std::string> all_vars(const FormulaPtr& f) {
    std::set<std::string> out;
    collect_all(f, out);
    return out;
}

std::string fresh_name(const std::string& base, const std::set<std::string>& used) {
    for (int i = 1;; ++i) {
        std::string cand = base + "_" + std::to_string(i);
        if (!used.count(cand)) return cand;
    }
}

FormulaPtr substitute(const FormulaPtr& f, const std::string& var, const Term& t) {
    using Op = Formula::Op;
    switch (f->op) {
        case Op::True:
        case Op::False:
            return f;
        case Op::Atom: {
            if (!f->atom.lhs.coeffs.count(var) && !f->atom.rhs.coeffs.count(var)) return f;
            Atom a = f->atom;
            const Term& tt = t;
            a.lhs = subst_term(a.lhs, var, tt);
            a.rhs = subst_term(a.rhs, var, tt);
            return f_atom(std::move(a));
        }
        case Op::Exists:
        case Op::Forall: {
            if (f->var == var) return f;
            if (!free_vars(f).count(var)) return f;
            std::string v = f->var;
            FormulaPtr body = f->kids[0];
            if (t.coeffs.count(v)) {
                auto used = all_vars(f);
                for (const auto& [n, c] : t.coeffs) used.insert(n);
                used.insert(var);
                std::string nv = fresh_name(v, used);
                Term nvt;
                nvt.coeffs[nv] = 1;
                body = substitute(body, v, nvt);
                v = nv;
            }
            body = substitute(body, var, t);
            return f->op == Op::Exists ? f_exists(v, body) : f_forall(v, body);
        }
        default: {
            Formula g = *f;
            for (auto& k : g.kids) k = substitute(k, var, t);
            return std::make_shared<const Formula>(std::move(g));
        }
    }
}

bool is_quantifier_free(const FormulaPtr& f) {
    if (f->op == Formula::Op::Exists || f->op == Formula::Op::Forall) return false;
    for (const auto& k : f->kids)
        if (!is_quantifier_free(k)) return false;
    return true;
}

FormulaPtr universal_closure(const FormulaPtr& f) {
    auto fv = free_vars(f);
    FormulaPtr out = f;
    for (auto it = fv.rbegin(); it != fv.rend(); ++it) out = f_forall(*it, out);
    return out;
}

FormulaPtr existential_closure(const FormulaPtr& f) {
    auto fv = free_vars(f);
    FormulaPtr out = f;
    for (auto it = fv.rbegin(); it != fv.rend(); ++it) out = f_exists(*it, out);
    return out;
}

}  // namespace oag
