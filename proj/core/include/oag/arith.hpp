#pragma once

#include <compare>
#include <cstdint>
#include <string>

namespace oag {

using Int = std::int64_t;

// Checked 64-bit arithmetic. Overflow raises ResourceError.
Int add_checked(Int a, Int b);
Int sub_checked(Int a, Int b);
Int mul_checked(Int a, Int b);
Int neg_checked(Int a);

Int gcd(Int a, Int b);
Int lcm(Int a, Int b);
/// Floor division and non-negative remainder for b > 0.
Int floor_div(Int a, Int b);
Int mod_floor(Int a, Int b);

/// Exact rational in lowest terms with positive denominator.
class Rational {
public:
    Rational() = default;
    Rational(Int n) : num_(n), den_(1) {}  // NOLINT(implicit)
    Rational(Int n, Int d);

    Int num() const noexcept { return num_; }
    Int den() const noexcept { return den_; }
    bool is_integer() const noexcept { return den_ == 1; }
    bool is_zero() const noexcept { return num_ == 0; }
    int sign() const noexcept { return num_ > 0 ? 1 : (num_ < 0 ? -1 : 0); }

    Int floor() const;
    Int ceil() const;

    Rational operator-() const;
    friend Rational operator+(const Rational& a, const Rational& b);
    friend Rational operator-(const Rational& a, const Rational& b);
    friend Rational operator*(const Rational& a, const Rational& b);
    friend Rational operator/(const Rational& a, const Rational& b);
    Rational& operator+=(const Rational& o) { return *this = *this + o; }
    Rational& operator-=(const Rational& o) { return *this = *this - o; }
    Rational& operator*=(const Rational& o) { return *this = *this * o; }

    friend bool operator==(const Rational& a, const Rational& b) = default;
    friend std::strong_ordering operator<=>(const Rational& a, const Rational& b);

    /// "3", "-7/2".
    std::string str() const;
    /// Accepts "3", "-7/2", "+4".
    static Rational parse(const std::string& text);

private:
    Int num_ = 0;
    Int den_ = 1;
};

}  // namespace oag
