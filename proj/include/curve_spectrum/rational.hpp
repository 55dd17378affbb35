#pragma once

#include <compare>
#include <cstdint>
#include <ostream>
#include <string>

#include "curve_spectrum/ddreal.hpp"
#include "curve_spectrum/error.hpp"

namespace curve_spectrum {

using i128 = __int128;
using u128 = unsigned __int128;

inline std::string to_string(i128 v) {
    if (v == 0) return "0";
    const bool neg = v < 0;
    u128 u = neg ? u128(0) - u128(v) : u128(v);
    std::string s;
    while (u) {
        s.push_back(char('0' + int(u % 10)));
        u /= 10;
    }
    if (neg) s.push_back('-');
    return {s.rbegin(), s.rend()};
}

namespace detail {

inline i128 checked_add(i128 a, i128 b) {
    i128 r;
    if (__builtin_add_overflow(a, b, &r)) fail(error_kind::overflow, "128-bit addition");
    return r;
}

inline i128 checked_sub(i128 a, i128 b) {
    i128 r;
    if (__builtin_sub_overflow(a, b, &r)) fail(error_kind::overflow, "128-bit subtraction");
    return r;
}

inline i128 checked_mul(i128 a, i128 b) {
    i128 r;
    if (__builtin_mul_overflow(a, b, &r)) fail(error_kind::overflow, "128-bit multiplication");
    return r;
}

inline i128 gcd128(i128 a, i128 b) {
    if (a < 0) a = -a;
    if (b < 0) b = -b;
    while (b) {
        i128 t = a % b;
        a = b;
        b = t;
    }
    return a;
}

}  // namespace detail

/// Exact rational with 128-bit numerator and denominator. Always reduced,
/// denominator positive. Every arithmetic step is overflow-checked.
class rational {
public:
    constexpr rational() = default;
    rational(i128 num) : num_(num), den_(1) {}  // NOLINT: implicit from integers is intended
    rational(i128 num, i128 den) : num_(num), den_(den) {
        require(den != 0, error_kind::precondition, "zero denominator");
        normalize();
    }

    i128 num() const { return num_; }
    i128 den() const { return den_; }

    double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }

    std::string str() const { return den_ == 1 ? to_string(num_) : to_string(num_) + "/" + to_string(den_); }

    friend rational operator+(const rational& a, const rational& b) {
        const i128 g = detail::gcd128(a.den_, b.den_);
        const i128 da = a.den_ / g;
        const i128 db = b.den_ / g;
        return {detail::checked_add(detail::checked_mul(a.num_, db), detail::checked_mul(b.num_, da)),
                detail::checked_mul(a.den_, db)};
    }
    friend rational operator-(const rational& a) {
        rational r;
        r.num_ = detail::checked_sub(0, a.num_);
        r.den_ = a.den_;
        return r;
    }
    friend rational operator-(const rational& a, const rational& b) { return a + (-b); }
    friend rational operator*(const rational& a, const rational& b) {
        const i128 g1 = detail::gcd128(a.num_, b.den_);
        const i128 g2 = detail::gcd128(b.num_, a.den_);
        const i128 n1 = g1 ? a.num_ / g1 : a.num_;
        const i128 d2 = g1 ? b.den_ / g1 : b.den_;
        const i128 n2 = g2 ? b.num_ / g2 : b.num_;
        const i128 d1 = g2 ? a.den_ / g2 : a.den_;
        return {detail::checked_mul(n1, n2), detail::checked_mul(d1, d2)};
    }
    friend rational operator/(const rational& a, const rational& b) {
        require(b.num_ != 0, error_kind::precondition, "division by zero rational");
        return a * rational(b.den_, b.num_);
    }
    rational& operator+=(const rational& o) { return *this = *this + o; }
    rational& operator-=(const rational& o) { return *this = *this - o; }
    rational& operator*=(const rational& o) { return *this = *this * o; }
    rational& operator/=(const rational& o) { return *this = *this / o; }

    friend bool operator==(const rational& a, const rational& b) { return a.num_ == b.num_ && a.den_ == b.den_; }
    friend std::strong_ordering operator<=>(const rational& a, const rational& b) {
        const i128 l = detail::checked_mul(a.num_, b.den_);
        const i128 r = detail::checked_mul(b.num_, a.den_);
        if (l < r) return std::strong_ordering::less;
        if (l > r) return std::strong_ordering::greater;
        return std::strong_ordering::equal;
    }

    friend std::ostream& operator<<(std::ostream& os, const rational& r) { return os << r.str(); }

private:
    void normalize() {
        if (den_ < 0) {
            num_ = detail::checked_sub(0, num_);
            den_ = detail::checked_sub(0, den_);
        }
        const i128 g = detail::gcd128(num_, den_);
        if (g > 1) {
            num_ /= g;
            den_ /= g;
        }
    }

    i128 num_ = 0;
    i128 den_ = 1;
};

namespace detail {

inline dd_real i128_to_dd(i128 v) {
    const double hi = static_cast<double>(v);
    const double lo = static_cast<double>(v - static_cast<i128>(hi));
    return dd_real::two_sum(hi, lo);
}

}  // namespace detail

inline dd_real to_dd(const rational& r) { return detail::i128_to_dd(r.num()) / detail::i128_to_dd(r.den()); }

}  // namespace curve_spectrum
