#pragma once

#include <cstdint>
#include <future>
#include <thread>
#include <vector>

#include "curve_spectrum/arith.hpp"
#include "curve_spectrum/error.hpp"
#include "curve_spectrum/rational.hpp"

/// Short Weierstrass curves y^2 = x^3 + ax + b over Q and F_p, Hasse windows,
/// M_E(N) and family averages over boxes of coefficients.
namespace curve_spectrum::curves {

using arith::i64;
using arith::u64;

struct curve {
    i64 a = 0;
    i64 b = 0;
    friend bool operator==(const curve&, const curve&) = default;
};

/// -16(4a^3 + 27b^2), overflow-checked in 128 bits.
inline i128 discriminant(const curve& c) {
    using detail::checked_add;
    using detail::checked_mul;
    const i128 a = c.a, b = c.b;
    const i128 a3 = checked_mul(checked_mul(a, a), a);
    const i128 inner = checked_add(checked_mul(4, a3), checked_mul(27, checked_mul(b, b)));
    return checked_mul(-16, inner);
}

inline bool is_nonsingular(const curve& c) { return discriminant(c) != 0; }

/// Quadratic character table mod an odd prime, shared by every curve counted at that prime.
class residue_symbols {
public:
    explicit residue_symbols(u64 p) : p_(p), chi_(p, -1) {
        require(p >= 3 && arith::is_prime(p), error_kind::precondition, "residue table needs an odd prime");
        chi_[0] = 0;
        for (u64 x = 1; x <= p / 2; ++x) chi_[x * x % p] = 1;
    }

    u64 prime() const { return p_; }
    int operator[](u64 x) const { return chi_[x]; }

private:
    u64 p_;
    std::vector<signed char> chi_;
};

/// Singularity of the pair (s, t) modulo p: 4s^3 + 27t^2 == 0 (mod p).
inline bool singular_mod(i64 s, i64 t, u64 p) {
    const i64 m = static_cast<i64>(p);
    const i128 v = i128(4) * s % m * s % m * s + i128(27) * t % m * t;
    return arith::mod(v, m) == 0;
}

/// Point count of y^2 = x^3 + sx + t given reduced residues and the character table. No checks.
inline i64 count_points_raw(u64 s, u64 t, const residue_symbols& chi) {
    const u64 p = chi.prime();
    i64 sum = 0;
    for (u64 x = 0; x < p; ++x) {
        const u64 v = (x * x % p * x + s * x + t) % p;
        sum += chi[v];
    }
    return static_cast<i64>(p) + 1 + sum;
}

struct count_options {
    /// Permit p = 3 (point counts there are still exact; the reduction is good when 3 does not divide a).
    bool allow_p3 = false;
};

/// #E_p(F_p) for a good prime p > 3 (or p = 3 when allowed).
inline i64 count_points(const curve& c, u64 p, const count_options& opt = {}) {
    require(arith::is_prime(p), error_kind::precondition, "count_points requires a prime");
    if (p < 3 || (p == 3 && !opt.allow_p3)) fail(error_kind::small_prime, "p = " + std::to_string(p));
    if (arith::mod(discriminant(c), static_cast<i64>(p)) == 0)
        fail(error_kind::bad_reduction, "p = " + std::to_string(p) + " divides the discriminant");
    const residue_symbols chi(p);
    const i64 m = static_cast<i64>(p);
    return count_points_raw(static_cast<u64>(arith::mod(c.a, m)), static_cast<u64>(arith::mod(c.b, m)), chi);
}

/// Trace of Frobenius p + 1 - #E_p(F_p).
inline i64 trace(const curve& c, u64 p, const count_options& opt = {}) {
    return static_cast<i64>(p) + 1 - count_points(c, p, opt);
}

/// #{u in F_p^* : u^4 s = s and u^6 t = t}.
inline int aut_size(i64 s, i64 t, u64 p) {
    require(p > 3 && arith::is_prime(p), error_kind::precondition, "aut_size requires a prime p > 3");
    require(!singular_mod(s, t, p), error_kind::singular_pair, "(s, t) is singular mod p");
    const u64 ss = static_cast<u64>(arith::mod(s, static_cast<i64>(p)));
    const u64 tt = static_cast<u64>(arith::mod(t, static_cast<i64>(p)));
    int count = 0;
    for (u64 u = 1; u < p; ++u) {
        const u64 u2 = u * u % p;
        const u64 u4 = u2 * u2 % p;
        const u64 u6 = u4 * u2 % p;
        if (u4 * ss % p == ss && u6 * tt % p == tt) ++count;
    }
    return count;
}

/// D_N(p) = (p + 1 - N)^2 - 4p; negative exactly on the Hasse window of N.
inline i128 window_discriminant(u64 N, u64 p) {
    const i128 d = i128(p) + 1 - i128(N);
    return d * d - 4 * i128(p);
}

/// The open interval ((sqrt N - 1)^2, (sqrt N + 1)^2) and the primes inside it.
/// Membership is the exact integer test (p + 1 - N)^2 < 4p.
class hasse_window {
public:
    explicit hasse_window(u64 N) : N_(N) {
        require(N >= 1, error_kind::precondition, "hasse_window requires N >= 1");
        const u64 r = arith::isqrt(N);
        const u64 lo = N + 1 > 2 * r + 2 ? N + 1 - 2 * r - 2 : 0;
        const u64 hi = N + 1 + 2 * r + 2;
        std::vector<u64> inside;
        for (u64 p : arith::primes_in(lo, hi)) {
            if (contains(p)) inside.push_back(p);
        }
        primes_ = std::move(inside);
        lo_ = lo;
        hi_ = hi;
    }

    u64 n() const { return N_; }
    bool contains(u64 p) const { return window_discriminant(N_, p) < 0; }
    double lower() const { return (std::sqrt(double(N_)) - 1) * (std::sqrt(double(N_)) - 1); }
    double upper() const { return (std::sqrt(double(N_)) + 1) * (std::sqrt(double(N_)) + 1); }
    arith::prime_table primes() const { return {lo_, hi_, primes_}; }
    const std::vector<u64>& prime_list() const { return primes_; }

private:
    u64 N_;
    u64 lo_ = 0;
    u64 hi_ = 0;
    std::vector<u64> primes_;
};

/// Primes of good reduction for a short Weierstrass model: p >= 3 and p does not divide the discriminant.
/// p = 2 always divides 16 | disc, so it never qualifies.
inline bool good_prime(const curve& c, u64 p) {
    return p >= 3 && arith::mod(discriminant(c), static_cast<i64>(p)) != 0;
}

/// M_E(N): number of good primes with exactly N points.
inline u64 m_e(const curve& c, u64 N) {
    require(is_nonsingular(c), error_kind::precondition, "m_e requires a nonsingular curve");
    u64 count = 0;
    const hasse_window window(N);
    for (u64 p : window.prime_list()) {
        if (good_prime(c, p) && count_points(c, p, {.allow_p3 = true}) == static_cast<i64>(N)) ++count;
    }
    return count;
}

struct dual_count {
    u64 by_window_sum = 0;   ///< sum of m_e(c, N) for N <= X
    u64 by_prime_count = 0;  ///< #{good p : #E_p <= X}
    bool agree() const { return by_window_sum == by_prime_count; }
};

/// Both enumerations of sum_{N <= X} M_E(N).
inline dual_count cumulative_m_e_dual(const curve& c, u64 X) {
    require(is_nonsingular(c), error_kind::precondition, "cumulative_m_e requires a nonsingular curve");
    dual_count out;
    for (u64 N = 1; N <= X; ++N) out.by_window_sum += m_e(c, N);
    // #E_p >= (sqrt p - 1)^2, so only p < (sqrt X + 1)^2 can contribute.
    const u64 bound = X + 2 * arith::isqrt(X) + 3;
    for (u64 p : arith::primes_in(0, bound)) {
        if (good_prime(c, p) && count_points(c, p, {.allow_p3 = true}) <= static_cast<i64>(X)) ++out.by_prime_count;
    }
    return out;
}

/// sum_{N <= X} M_E(N); throws if the two enumerations ever disagree.
inline u64 cumulative_m_e(const curve& c, u64 X) {
    const dual_count d = cumulative_m_e_dual(c, X);
    if (!d.agree()) fail(error_kind::precondition, "dual enumerations of cumulative M_E disagree");
    return d.by_prime_count;
}

/// Coefficient box |a| <= A, |b| <= B.
struct family_box {
    i64 A = 0;
    i64 B = 0;
};

/// #{a in [-A, A] : a = s (mod p)} for 0 <= s < p.
inline i64 box_residue_count(i64 A, i64 s, i64 p) {
    return arith::floor_div(A - s, p) + arith::floor_div(A + s, p) + 1;
}

/// Exact count of nonsingular (a, b) in the box. Singular pairs are (-3k^2, 2k^3).
inline i128 family_size(const family_box& box) {
    require(box.A >= 0 && box.B >= 0, error_kind::precondition, "box bounds must be nonnegative");
    i128 singular = 0;
    for (i64 k = 0; 3 * k * k <= box.A && 2 * k * k * k <= box.B; ++k) singular += (k == 0) ? 1 : 2;
    return i128(2 * box.A + 1) * (2 * box.B + 1) - singular;
}

struct family_options {
    /// Count p = 3 as a good prime when 3 does not divide the discriminant.
    bool include_p3 = true;
    /// Worker threads; 0 picks hardware concurrency.
    unsigned threads = 0;
};

/// Number of curves in the box whose reduction at p has exactly N points.
/// Works on residue pairs: O(p^3) per prime instead of O(AB p).
inline i128 weighted_count_at_prime(u64 N, u64 p, const family_box& box) {
    const residue_symbols chi(p);
    const i64 m = static_cast<i64>(p);
    std::vector<i64> wa(p), wb(p);
    for (i64 s = 0; s < m; ++s) {
        wa[s] = box_residue_count(box.A, s, m);
        wb[s] = box_residue_count(box.B, s, m);
    }
    std::vector<u64> cubic(p);
    i128 total = 0;
    for (u64 s = 0; s < p; ++s) {
        if (wa[s] == 0) continue;
        for (u64 x = 0; x < p; ++x) cubic[x] = (x * x % p * x + s * x) % p;
        for (u64 t = 0; t < p; ++t) {
            if (wb[t] == 0 || singular_mod(static_cast<i64>(s), static_cast<i64>(t), p)) continue;
            i64 sum = 0;
            for (u64 x = 0; x < p; ++x) {
                u64 v = cubic[x] + t;
                if (v >= p) v -= p;
                sum += chi[v];
            }
            if (static_cast<i64>(p) + 1 + sum == static_cast<i64>(N)) total += i128(wa[s]) * wb[t];
        }
    }
    return total;
}

/// Exact family average (1/#C(A,B)) sum_{E in C(A,B)} M_E(N).
inline rational family_average(u64 N, const family_box& box, const family_options& opt = {}) {
    require(N >= 3, error_kind::precondition, "family_average requires N >= 3");
    require(box.A >= 1 && box.B >= 1, error_kind::precondition, "family box must have A, B >= 1");
    std::vector<u64> primes;
    const hasse_window window(N);
    for (u64 p : window.prime_list()) {
        if (p > 3 || (p == 3 && opt.include_p3)) primes.push_back(p);
    }
    if (primes.empty()) return rational(0);

    unsigned workers = opt.threads ? opt.threads : std::max(1u, std::thread::hardware_concurrency());
    workers = std::min<unsigned>(workers, static_cast<unsigned>(primes.size()));
    std::vector<i128> partial(primes.size(), 0);
    if (workers <= 1) {
        for (std::size_t i = 0; i < primes.size(); ++i) partial[i] = weighted_count_at_prime(N, primes[i], box);
    } else {
        std::vector<std::future<void>> jobs;
        for (unsigned w = 0; w < workers; ++w) {
            jobs.push_back(std::async(std::launch::async, [&, w] {
                for (std::size_t i = w; i < primes.size(); i += workers)
                    partial[i] = weighted_count_at_prime(N, primes[i], box);
            }));
        }
        for (auto& j : jobs) j.get();
    }
    i128 total = 0;
    for (i128 v : partial) total = detail::checked_add(total, v);
    return rational(total, family_size(box));
}

}  // namespace curve_spectrum::curves
