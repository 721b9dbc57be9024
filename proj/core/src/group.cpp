#include "oag/group.hpp"

#include "oag/errors.hpp"

namespace oag {

GroupSpec GroupSpec::parse(const std::string& text) {
    std::string t;
    for (char c : text)
        if (c != ' ' && c != '\t') t += c;
    if (t.empty() || t == "0") return GroupSpec{};
    std::vector<Kind> kinds;
    std::size_t pos = 0;
    while (true) {
        auto star = t.find('*', pos);
        std::string tok = t.substr(pos, star == std::string::npos ? std::string::npos : star - pos);
        if (tok == "Z")
            kinds.push_back(Kind::DiscreteZ);
        else if (tok == "Q")
            kinds.push_back(Kind::DenseQ);
        else
            throw DomainError("bad group spec '" + text + "': expected Z or Q, got '" + tok + "'");
        if (star == std::string::npos) break;
        pos = star + 1;
    }
    return GroupSpec(std::move(kinds));
}

std::string GroupSpec::str() const {
    if (kinds_.empty()) return "0";
    std::string out;
    for (std::size_t i = 0; i < kinds_.size(); ++i) {
        if (i) out += '*';
        out += kinds_[i] == Kind::DiscreteZ ? 'Z' : 'Q';
    }
    return out;
}

int GroupSpec::discrete_count(int k) const {
    int c = 0;
    for (int i = 1; i <= k; ++i)
        if (kind(i) == Kind::DiscreteZ) ++c;
    return c;
}

Element Element::zero(const GroupSpec& g) {
    return Element(std::vector<Rational>(static_cast<std::size_t>(g.rank()), Rational(0)));
}

Element Element::unit(const GroupSpec& g, int i) {
    Element e = zero(g);
    e.coords.at(static_cast<std::size_t>(i - 1)) = Rational(1);
    return e;
}

bool Element::is_zero() const {
    for (const auto& c : coords)
        if (!c.is_zero()) return false;
    return true;
}

namespace {
std::string tuple_str(const std::vector<Rational>& v) {
    std::string out = "(";
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ',';
        out += v[i].str();
    }
    return out + ")";
}

void same_arity(const Element& a, const Element& b) {
    if (a.arity() != b.arity())
        throw ArityError("element arity mismatch: " + a.str() + " vs " + b.str());
}
}  // namespace

std::string Element::str() const { return tuple_str(coords); }

Element Element::operator-() const {
    Element r = *this;
    for (auto& c : r.coords) c = -c;
    return r;
}

Element operator+(const Element& a, const Element& b) {
    same_arity(a, b);
    Element r = a;
    for (std::size_t i = 0; i < r.coords.size(); ++i) r.coords[i] += b.coords[i];
    return r;
}

Element operator-(const Element& a, const Element& b) {
    same_arity(a, b);
    Element r = a;
    for (std::size_t i = 0; i < r.coords.size(); ++i) r.coords[i] -= b.coords[i];
    return r;
}

Element operator*(Int s, const Element& a) {
    Element r = a;
    for (auto& c : r.coords) c *= Rational(s);
    return r;
}

std::strong_ordering operator<=>(const Element& a, const Element& b) {
    same_arity(a, b);
    for (std::size_t i = 0; i < a.coords.size(); ++i) {
        auto c = a.coords[i] <=> b.coords[i];
        if (c != 0) return c;
    }
    return std::strong_ordering::equal;
}

void check_element(const GroupSpec& g, const Element& a) {
    if (a.arity() != g.rank())
        throw ArityError("element " + a.str() + " has arity " + std::to_string(a.arity()) +
                         ", group " + g.str() + " has rank " + std::to_string(g.rank()));
    for (int i = 1; i <= g.rank(); ++i)
        if (g.kind(i) == Kind::DiscreteZ && !a.coords[static_cast<std::size_t>(i - 1)].is_integer())
            throw DomainError("non-integer entry in discrete coordinate " + std::to_string(i) +
                              " of " + a.str());
}

std::string QuotientElement::str() const { return tuple_str(coords); }

std::strong_ordering operator<=>(const QuotientElement& a, const QuotientElement& b) {
    if (auto c = a.level <=> b.level; c != 0) return c;
    for (std::size_t i = 0; i < a.coords.size() && i < b.coords.size(); ++i)
        if (auto c = a.coords[i] <=> b.coords[i]; c != 0) return c;
    return a.coords.size() <=> b.coords.size();
}

std::string FiniteQuotientElement::str() const {
    std::string out = "[";
    for (std::size_t i = 0; i < residues.size(); ++i) {
        if (i) out += ',';
        out += std::to_string(residues[i]);
    }
    return out + "] mod " + std::to_string(modulus) + " @" + std::to_string(level);
}

Ordering compare(const GroupSpec& g, const Element& a, const Element& b) {
    check_element(g, a);
    check_element(g, b);
    auto c = a <=> b;
    if (c < 0) return Ordering::LT;
    if (c > 0) return Ordering::GT;
    return Ordering::EQ;
}

namespace {
int leading_position(const GroupSpec& g, const Element& gamma) {
    check_element(g, gamma);
    for (int i = 1; i <= g.rank(); ++i)
        if (!gamma.coords[static_cast<std::size_t>(i - 1)].is_zero()) return i;
    throw DomainError("convex jump of the zero element is undefined");
}

void check_modulus(Int n) {
    if (n < 2) throw DomainError("modulus must be >= 2, got " + std::to_string(n));
}
}  // namespace

std::pair<ConvexSubgroup, ConvexSubgroup> conv_jump(const GroupSpec& g, const Element& gamma) {
    int j = leading_position(g, gamma);
    return {ConvexSubgroup{j}, ConvexSubgroup{j - 1}};
}

bool is_n_regular_block(const GroupSpec& g, int from, int to, Int n) {
    check_modulus(n);
    if (from < 1 || from > to || to > g.rank())
        throw DomainError("bad block indices (" + std::to_string(from) + "," + std::to_string(to) +
                          ") for group " + g.str());
    // A discrete coordinate above the bottom of the block leaves a fiber
    // interval over an odd leading value without n-divisible points.
    for (int i = from; i < to; ++i)
        if (g.kind(i) == Kind::DiscreteZ) return false;
    return true;
}

std::vector<ConvexSubgroup> compute_rj(const GroupSpec& g, Int n) {
    check_modulus(n);
    std::vector<ConvexSubgroup> jumps;
    int bottom = g.rank();
    // Walk up the tower, taking the coarsest n-regular quotient each time.
    while (bottom > 0) {
        jumps.push_back(ConvexSubgroup{bottom});
        int top = bottom - 1;
        while (top > 0 && is_n_regular_block(g, top, bottom, n)) --top;
        // top is now the level of the next subgroup: block (top+1 .. bottom) is regular.
        if (!is_n_regular_block(g, top + 1, bottom, n))
            throw DomainError("internal: regular block search failed");
        bottom = top;
    }
    return jumps;
}

ConvexSubgroup schmitt_An(const GroupSpec& g, const Element& gamma, Int n) {
    check_modulus(n);
    int j = leading_position(g, gamma);
    int t = j;
    while (t < g.rank() && is_n_regular_block(g, j, t + 1, n)) ++t;
    return ConvexSubgroup{t};
}

ConvexSubgroup schmitt_Bn(const GroupSpec& g, const Element& gamma, Int n) {
    int t = schmitt_An(g, gamma, n).level;
    int s = t;
    while (s > 0 && is_n_regular_block(g, s, t, n)) --s;
    return ConvexSubgroup{s};
}

QuotientElement project(const GroupSpec& g, int level, const Element& a) {
    check_element(g, a);
    if (level < 0 || level > g.rank())
        throw DomainError("level " + std::to_string(level) + " out of range for " + g.str());
    return QuotientElement{level, std::vector<Rational>(a.coords.begin(), a.coords.begin() + level)};
}

FiniteQuotientElement project_fin(const GroupSpec& g, int level, Int modulus, const Element& a) {
    check_element(g, a);
    check_modulus(modulus);
    if (level < 0 || level > g.rank())
        throw DomainError("level " + std::to_string(level) + " out of range for " + g.str());
    FiniteQuotientElement q{level, modulus, {}};
    for (int i = 1; i <= level; ++i)
        if (g.kind(i) == Kind::DiscreteZ)
            q.residues.push_back(mod_floor(a.coords[static_cast<std::size_t>(i - 1)].num(), modulus));
    return q;
}

Element lift(const GroupSpec& g, const QuotientElement& q) {
    Element e = Element::zero(g);
    for (int i = 0; i < q.level; ++i) e.coords[static_cast<std::size_t>(i)] = q.coords[static_cast<std::size_t>(i)];
    return e;
}

Element lift(const GroupSpec& g, const FiniteQuotientElement& q) {
    Element e = Element::zero(g);
    std::size_t r = 0;
    for (int i = 1; i <= q.level; ++i)
        if (g.kind(i) == Kind::DiscreteZ) e.coords[static_cast<std::size_t>(i - 1)] = Rational(q.residues.at(r++));
    return e;
}

bool is_prime(Int p) {
    if (p < 2) return false;
    for (Int d = 2; d * d <= p; ++d)
        if (p % d == 0) return false;
    return true;
}

std::optional<Int> compute_chi(const GroupSpec& g, Int p) {
    if (!is_prime(p)) throw DomainError(std::to_string(p) + " is not prime");
    Int index = 1;
    for (int i = 0; i < g.discrete_count(); ++i) index = mul_checked(index, p);
    return index;
}

std::vector<Element> representatives_mod(const GroupSpec& g, int level, Int modulus) {
    check_modulus(modulus);
    if (level < 0 || level > g.rank())
        throw DomainError("level " + std::to_string(level) + " out of range for " + g.str());
    std::vector<int> slots;
    for (int i = 1; i <= level; ++i)
        if (g.kind(i) == Kind::DiscreteZ) slots.push_back(i);
    std::vector<Element> out;
    std::vector<Int> digits(slots.size(), 0);
    while (true) {
        Element e = Element::zero(g);
        for (std::size_t s = 0; s < slots.size(); ++s)
            e.coords[static_cast<std::size_t>(slots[s] - 1)] = Rational(digits[s]);
        out.push_back(std::move(e));
        // odometer, last slot fastest so the output is lexicographically sorted
        std::size_t s = slots.size();
        while (s > 0 && ++digits[s - 1] == modulus) digits[--s] = 0;
        if (s == 0) break;
    }
    return out;
}

}  // namespace oag
