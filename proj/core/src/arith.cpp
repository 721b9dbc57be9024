#include "oag/arith.hpp"

#include <cstdlib>
#include <limits>

#include "oag/errors.hpp"

namespace oag {

namespace {
[[noreturn]] void overflow() { throw ResourceError("integer overflow in exact arithmetic"); }
}  // namespace

Int add_checked(Int a, Int b) {
    Int r;
    if (__builtin_add_overflow(a, b, &r)) overflow();
    return r;
}

Int sub_checked(Int a, Int b) {
    Int r;
    if (__builtin_sub_overflow(a, b, &r)) overflow();
    return r;
}

Int mul_checked(Int a, Int b) {
    Int r;
    if (__builtin_mul_overflow(a, b, &r)) overflow();
    return r;
}

Int neg_checked(Int a) {
    if (a == std::numeric_limits<Int>::min()) overflow();
    return -a;
}

Int gcd(Int a, Int b) {
    a = a < 0 ? neg_checked(a) : a;
    b = b < 0 ? neg_checked(b) : b;
    while (b != 0) {
        Int t = a % b;
        a = b;
        b = t;
    }
    return a;
}

Int lcm(Int a, Int b) {
    if (a == 0 || b == 0) return 0;
    Int g = gcd(a, b);
    Int r = mul_checked(a / g, b);
    return r < 0 ? neg_checked(r) : r;
}

Int floor_div(Int a, Int b) {
    Int q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
}

Int mod_floor(Int a, Int b) {
    Int r = a % b;
    if (r < 0) r += (b < 0 ? -b : b);
    return r;
}

Rational::Rational(Int n, Int d) {
    if (d == 0) throw DomainError("rational with zero denominator");
    if (d < 0) {
        n = neg_checked(n);
        d = neg_checked(d);
    }
    Int g = gcd(n, d);
    if (g > 1) {
        n /= g;
        d /= g;
    }
    num_ = n;
    den_ = d;
}

Int Rational::floor() const { return floor_div(num_, den_); }

Int Rational::ceil() const { return neg_checked(floor_div(neg_checked(num_), den_)); }

Rational Rational::operator-() const { return Rational(neg_checked(num_), den_); }

Rational operator+(const Rational& a, const Rational& b) {
    if (a.den_ == 1 && b.den_ == 1) return Rational(add_checked(a.num_, b.num_));
    Int g = gcd(a.den_, b.den_);
    Int l = mul_checked(a.den_ / g, b.den_);
    Int n = add_checked(mul_checked(a.num_, l / a.den_), mul_checked(b.num_, l / b.den_));
    return Rational(n, l);
}

Rational operator-(const Rational& a, const Rational& b) { return a + (-b); }

Rational operator*(const Rational& a, const Rational& b) {
    if (a.den_ == 1 && b.den_ == 1) return Rational(mul_checked(a.num_, b.num_));
    Int g1 = gcd(a.num_, b.den_);
    Int g2 = gcd(b.num_, a.den_);
    if (g1 == 0) g1 = 1;
    if (g2 == 0) g2 = 1;
    return Rational(mul_checked(a.num_ / g1, b.num_ / g2), mul_checked(a.den_ / g2, b.den_ / g1));
}

Rational operator/(const Rational& a, const Rational& b) {
    if (b.num_ == 0) throw DomainError("division by zero");
    return a * Rational(b.den_, b.num_);
}

std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
    if (a.den_ == b.den_) return a.num_ <=> b.num_;
    __int128 l = static_cast<__int128>(a.num_) * b.den_;
    __int128 r = static_cast<__int128>(b.num_) * a.den_;
    return l <=> r;
}

std::string Rational::str() const {
    if (den_ == 1) return std::to_string(num_);
    return std::to_string(num_) + "/" + std::to_string(den_);
}

Rational Rational::parse(const std::string& text) {
    auto to_int = [&](const std::string& s) -> Int {
        if (s.empty()) throw DomainError("malformed number '" + text + "'");
        std::size_t i = (s[0] == '-' || s[0] == '+') ? 1 : 0;
        if (i == s.size()) throw DomainError("malformed number '" + text + "'");
        for (std::size_t j = i; j < s.size(); ++j)
            if (s[j] < '0' || s[j] > '9') throw DomainError("malformed number '" + text + "'");
        errno = 0;
        long long v = std::strtoll(s.c_str(), nullptr, 10);
        if (errno == ERANGE) overflow();
        return static_cast<Int>(v);
    };
    auto slash = text.find('/');
    if (slash == std::string::npos) return Rational(to_int(text));
    return Rational(to_int(text.substr(0, slash)), to_int(text.substr(slash + 1)));
}

}  // namespace oag
