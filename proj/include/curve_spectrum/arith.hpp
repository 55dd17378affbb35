#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "curve_spectrum/error.hpp"
#include "curve_spectrum/rational.hpp"

/// Exact integer, modular and multiplicative-function primitives.
namespace curve_spectrum::arith {

using u64 = std::uint64_t;
using i64 = std::int64_t;

inline u64 isqrt(u64 n) {
    u64 r = std::min<u64>(static_cast<u64>(std::sqrt(static_cast<long double>(n))), 0xffffffffull);
    while (r > 0 && r * r > n) --r;
    while (r < 0xffffffffull && (r + 1) * (r + 1) <= n) ++r;
    return r;
}

/// Floor division for signed operands with positive divisor.
inline i64 floor_div(i64 a, i64 b) {
    i64 q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
}

/// Least nonnegative residue of a modulo m (m > 0).
inline i64 mod(i64 a, i64 m) {
    i64 r = a % m;
    return r < 0 ? r + m : r;
}

inline i64 mod(i128 a, i64 m) {
    i128 r = a % m;
    return static_cast<i64>(r < 0 ? r + m : r);
}

inline u64 mulmod(u64 a, u64 b, u64 m) { return static_cast<u64>(static_cast<u128>(a) * b % m); }

inline u64 powmod(u64 base, u64 exp, u64 m) {
    u64 result = 1 % m;
    base %= m;
    while (exp) {
        if (exp & 1) result = mulmod(result, base, m);
        base = mulmod(base, base, m);
        exp >>= 1;
    }
    return result;
}

inline u64 ipow(u64 base, unsigned exp) {
    u64 r = 1;
    while (exp--) r *= base;
    return r;
}

/// Deterministic Miller-Rabin; the first twelve prime bases are exact below 2^64.
inline bool is_prime(u64 n) {
    if (n < 2) return false;
    static constexpr u64 small[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};
    for (u64 p : small) {
        if (n % p == 0) return n == p;
    }
    u64 d = n - 1;
    int s = 0;
    while ((d & 1) == 0) {
        d >>= 1;
        ++s;
    }
    for (u64 a : small) {
        u64 x = powmod(a, d, n);
        if (x == 1 || x == n - 1) continue;
        bool composite = true;
        for (int r = 1; r < s; ++r) {
            x = mulmod(x, x, n);
            if (x == n - 1) {
                composite = false;
                break;
            }
        }
        if (composite) return false;
    }
    return true;
}

struct prime_power {
    u64 prime;
    unsigned exponent;
    friend bool operator==(const prime_power&, const prime_power&) = default;
};

/// Canonical factorization: strictly increasing primes, exponents >= 1.
struct factorization {
    std::vector<prime_power> factors;

    u64 value() const {
        u64 v = 1;
        for (const auto& pp : factors) v *= ipow(pp.prime, pp.exponent);
        return v;
    }
    /// Exponent of `p`, zero when absent.
    unsigned valuation(u64 p) const {
        for (const auto& pp : factors) {
            if (pp.prime == p) return pp.exponent;
        }
        return 0;
    }
    std::size_t omega() const { return factors.size(); }
    u64 tau() const {
        u64 t = 1;
        for (const auto& pp : factors) t *= pp.exponent + 1;
        return t;
    }
    bool empty() const { return factors.empty(); }
    friend bool operator==(const factorization&, const factorization&) = default;
};

namespace detail {

inline u64 pollard_brent(u64 n) {
    if (n % 2 == 0) return 2;
    for (u64 c = 1;; ++c) {
        u64 y = 2, x = 2, g = 1, q = 1, ys = 2;
        const u64 m = 128;
        u64 r = 1;
        auto f = [&](u64 v) { return (mulmod(v, v, n) + c) % n; };
        do {
            x = y;
            for (u64 i = 0; i < r; ++i) y = f(y);
            u64 k = 0;
            do {
                ys = y;
                for (u64 i = 0; i < std::min(m, r - k); ++i) {
                    y = f(y);
                    q = mulmod(q, x > y ? x - y : y - x, n);
                }
                g = std::gcd(q, n);
                k += m;
            } while (k < r && g == 1);
            r <<= 1;
        } while (g == 1);
        if (g == n) {
            do {
                ys = f(ys);
                g = std::gcd(x > ys ? x - ys : ys - x, n);
            } while (g == 1);
        }
        if (g != n) return g;
    }
}

inline void split_large(u64 n, std::vector<u64>& out) {
    if (n == 1) return;
    if (is_prime(n)) {
        out.push_back(n);
        return;
    }
    const u64 d = pollard_brent(n);
    split_large(d, out);
    split_large(n / d, out);
}

}  // namespace detail

/// Trial division up to 10^6, then Pollard-rho (Brent) on the cofactor.
inline factorization factorize(u64 n) {
    require(n >= 1, error_kind::precondition, "factorize requires n >= 1");
    factorization fac;
    auto take = [&](u64 p) {
        unsigned e = 0;
        while (n % p == 0) {
            n /= p;
            ++e;
        }
        if (e) fac.factors.push_back({p, e});
    };
    take(2);
    take(3);
    constexpr u64 trial_limit = 1'000'000;
    for (u64 p = 5; p <= trial_limit && p * p <= n; p += 6) {
        take(p);
        take(p + 2);
    }
    if (n > 1) {
        std::vector<u64> rest;
        detail::split_large(n, rest);
        std::sort(rest.begin(), rest.end());
        for (u64 p : rest) {
            if (!fac.factors.empty() && fac.factors.back().prime == p) {
                ++fac.factors.back().exponent;
            } else {
                fac.factors.push_back({p, 1});
            }
        }
    }
    return fac;
}

inline unsigned valuation(u64 n, u64 p) {
    if (n == 0) return ~0u;
    unsigned e = 0;
    while (n % p == 0) {
        n /= p;
        ++e;
    }
    return e;
}

/// n with every factor of p removed.
inline u64 free_part(u64 n, u64 p) {
    while (n != 0 && n % p == 0) n /= p;
    return n;
}

inline u64 euler_phi(const factorization& fac) {
    u64 phi = 1;
    for (const auto& pp : fac.factors) phi *= (pp.prime - 1) * ipow(pp.prime, pp.exponent - 1);
    return phi;
}

inline u64 euler_phi(u64 n) { return euler_phi(factorize(n)); }

/// kappa_m(n): product of l over l^a || n with a odd and l not dividing m.
inline u64 kappa(u64 m, u64 n) {
    require(m >= 1 && n >= 1, error_kind::precondition, "kappa requires m, n >= 1");
    u64 k = 1;
    for (const auto& pp : factorize(n).factors) {
        if ((pp.exponent & 1) && m % pp.prime != 0) k *= pp.prime;
    }
    return k;
}

/// Kronecker symbol (d/n) by quadratic reciprocity; no factorization needed.
inline int kronecker(i64 d, u64 n) {
    require(!(d == 0 && n == 0), error_kind::precondition, "kronecker(0, 0) is undefined");
    if (n == 0) return (d == 1 || d == -1) ? 1 : 0;
    if (d % 2 == 0 && n % 2 == 0) return 0;
    int sign = 1;
    const int two_adic = __builtin_ctzll(n);
    n >>= two_adic;
    if (two_adic & 1) {
        const i64 r = mod(d, 8);
        if (r == 3 || r == 5) sign = -sign;
    }
    // n is odd now; reduce to a Jacobi symbol.
    if (n == 1) return sign;
    u64 a = static_cast<u64>(mod(d, static_cast<i64>(n)));
    u64 m = n;
    while (a != 0) {
        const int t = __builtin_ctzll(a);
        a >>= t;
        if ((t & 1) && (m % 8 == 3 || m % 8 == 5)) sign = -sign;
        if (a % 4 == 3 && m % 4 == 3) sign = -sign;
        std::swap(a, m);
        a %= m;
    }
    return m == 1 ? sign : 0;
}

inline int legendre(i64 a, u64 p) { return kronecker(a, p); }

/// Immutable ascending list of the primes in [lo, hi].
class prime_table {
public:
    prime_table(u64 lo, u64 hi, std::vector<u64> primes) : lo_(lo), hi_(hi), primes_(std::move(primes)) {}

    u64 lo() const { return lo_; }
    u64 hi() const { return hi_; }
    std::span<const u64> primes() const { return primes_; }
    std::size_t size() const { return primes_.size(); }
    bool empty() const { return primes_.empty(); }
    auto begin() const { return primes_.begin(); }
    auto end() const { return primes_.end(); }
    u64 operator[](std::size_t i) const { return primes_[i]; }
    bool contains(u64 p) const { return std::binary_search(primes_.begin(), primes_.end(), p); }

private:
    u64 lo_;
    u64 hi_;
    std::vector<u64> primes_;
};

struct sieve_options {
    u64 segment_size = u64(1) << 20;
    bool segmented = true;
};

namespace detail {

inline std::vector<u64> simple_sieve(u64 limit) {
    std::vector<u64> out;
    if (limit < 2) return out;
    std::vector<char> composite(limit + 1, 0);
    for (u64 i = 2; i <= limit; ++i) {
        if (composite[i]) continue;
        out.push_back(i);
        for (u64 j = i * i; j <= limit; j += i) composite[j] = 1;
    }
    return out;
}

}  // namespace detail

/// Segmented Eratosthenes over [lo, hi]; base primes up to sqrt(hi).
inline prime_table primes_in(u64 lo, u64 hi, const sieve_options& opt = {}) {
    require(lo <= hi, error_kind::precondition, "primes_in requires lo <= hi");
    require(opt.segment_size > 0, error_kind::precondition, "segment size must be positive");
    require(hi < (u64(1) << 62), error_kind::range_too_large, "upper bound exceeds 2^62");
    if (!opt.segmented && hi - lo + 1 > opt.segment_size)
        fail(error_kind::range_too_large,
             "range of " + std::to_string(hi - lo + 1) + " exceeds segment bound " + std::to_string(opt.segment_size));

    const std::vector<u64> base = detail::simple_sieve(isqrt(hi));
    std::vector<u64> primes;
    std::vector<char> composite;
    for (u64 start = lo;; start += opt.segment_size) {
        const u64 end = std::min(hi, start + opt.segment_size - 1);
        composite.assign(end - start + 1, 0);
        for (u64 p : base) {
            if (p * p > end) break;
            u64 first = std::max(p * p, (start + p - 1) / p * p);
            for (u64 j = first; j <= end; j += p) composite[j - start] = 1;
        }
        for (u64 v = start; v <= end; ++v) {
            if (v >= 2 && !composite[v - start]) primes.push_back(v);
        }
        if (end == hi) break;
    }
    return {lo, hi, std::move(primes)};
}

/// Smallest-prime-factor table for fast repeated factorization of small integers.
class spf_table {
public:
    explicit spf_table(u64 limit) : spf_(limit + 1, 0) {
        for (u64 i = 2; i <= limit; ++i) {
            if (spf_[i]) continue;
            for (u64 j = i; j <= limit; j += i) {
                if (!spf_[j]) spf_[j] = static_cast<std::uint32_t>(i);
            }
        }
    }

    u64 limit() const { return spf_.size() - 1; }

    factorization factorize(u64 n) const {
        if (n > limit()) return arith::factorize(n);
        factorization fac;
        while (n > 1) {
            const u64 p = spf_[n];
            unsigned e = 0;
            while (n % p == 0) {
                n /= p;
                ++e;
            }
            fac.factors.push_back({p, e});
        }
        return fac;
    }

private:
    std::vector<std::uint32_t> spf_;
};

}  // namespace curve_spectrum::arith
