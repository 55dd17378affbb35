#pragma once

#include <cmath>

namespace curve_spectrum {

/// Double-double real: an unevaluated sum hi + lo carrying roughly 106 bits
/// of mantissa. Only the operations the constants and sums need are provided.
struct dd_real {
    double hi = 0.0;
    double lo = 0.0;

    constexpr dd_real() = default;
    constexpr dd_real(double h) : hi(h) {}  // NOLINT: implicit widening is intended
    constexpr dd_real(double h, double l) : hi(h), lo(l) {}

    double to_double() const { return hi + lo; }

    static dd_real two_sum(double a, double b) {
        const double s = a + b;
        const double bb = s - a;
        const double e = (a - (s - bb)) + (b - bb);
        return {s, e};
    }
    static dd_real quick_two_sum(double a, double b) {
        const double s = a + b;
        return {s, b - (s - a)};
    }
    static dd_real two_prod(double a, double b) {
        const double p = a * b;
        return {p, std::fma(a, b, -p)};
    }

    friend dd_real operator+(const dd_real& a, const dd_real& b) {
        dd_real s = two_sum(a.hi, b.hi);
        dd_real t = two_sum(a.lo, b.lo);
        s.lo += t.hi;
        s = quick_two_sum(s.hi, s.lo);
        s.lo += t.lo;
        return quick_two_sum(s.hi, s.lo);
    }
    friend dd_real operator-(const dd_real& a) { return {-a.hi, -a.lo}; }
    friend dd_real operator-(const dd_real& a, const dd_real& b) { return a + (-b); }
    friend dd_real operator*(const dd_real& a, const dd_real& b) {
        dd_real p = two_prod(a.hi, b.hi);
        p.lo += a.hi * b.lo + a.lo * b.hi;
        return quick_two_sum(p.hi, p.lo);
    }
    friend dd_real operator/(const dd_real& a, const dd_real& b) {
        const double q1 = a.hi / b.hi;
        dd_real r = a - b * dd_real(q1);
        const double q2 = r.hi / b.hi;
        r = r - b * dd_real(q2);
        const double q3 = r.hi / b.hi;
        return quick_two_sum(q1, q2) + dd_real(q3);
    }
    dd_real& operator+=(const dd_real& o) { return *this = *this + o; }
    dd_real& operator-=(const dd_real& o) { return *this = *this - o; }
    dd_real& operator*=(const dd_real& o) { return *this = *this * o; }
    dd_real& operator/=(const dd_real& o) { return *this = *this / o; }

    friend bool operator<(const dd_real& a, const dd_real& b) { return a.hi < b.hi || (a.hi == b.hi && a.lo < b.lo); }
};

inline dd_real abs(const dd_real& x) { return x.hi < 0 ? -x : x; }

/// Exact-ish conversion of a ratio of 64-bit integers.
inline dd_real dd_ratio(long long num, long long den) { return dd_real(double(num)) / dd_real(double(den)); }

}  // namespace curve_spectrum
