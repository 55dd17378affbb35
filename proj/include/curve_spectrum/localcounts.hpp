#pragma once

#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "curve_spectrum/arith.hpp"
#include "curve_spectrum/error.hpp"
#include "curve_spectrum/rational.hpp"

/// The discriminant polynomial D_N(z) = z^2 - 2(N+1)z + (N-1)^2, its root counts,
/// the solution sets C_N(a, n, f) and the multiplicative function c_{N,f}(n).
namespace curve_spectrum::localcounts {

using arith::i64;
using arith::u64;

inline i128 d_eval(i64 N, i128 z) {
    using detail::checked_add;
    using detail::checked_mul;
    const i128 lin = checked_mul(checked_mul(2, i128(N) + 1), z);
    const i128 c = checked_mul(i128(N) - 1, i128(N) - 1);
    return checked_add(detail::checked_sub(checked_mul(z, z), lin), c);
}

/// D_N(p) / f^2.
inline i128 d_reduced(i64 N, i64 f, i64 p) {
    require(f >= 1, error_kind::precondition, "f must be positive");
    const i128 D = d_eval(N, p);
    const i128 f2 = i128(f) * f;
    if (D % f2 != 0) fail(error_kind::nondivisible, "f^2 does not divide D_N(p)");
    return D / f2;
}

namespace detail {

/// #{Z mod l^e : Z^2 = c (mod l^e)} by lifting roots level by level. Nonsingular roots
/// (l odd, l not dividing Z) lift uniquely by Hensel; singular ones are sub-scanned.
inline u64 count_square_roots_prime_power(i64 c, u64 l, unsigned e) {
    const u64 mod_full = arith::ipow(l, e);
    const u64 target = static_cast<u64>(arith::mod(c, static_cast<i64>(mod_full)));
    std::vector<u64> roots;
    for (u64 z = 0; z < l; ++z) {
        if ((z * z) % l == target % l) roots.push_back(z);
    }
    u64 m = l;
    for (unsigned k = 1; k < e; ++k) {
        const u64 next = m * l;
        const u64 tk = target % next;
        std::vector<u64> lifted;
        for (u64 r : roots) {
            if (l != 2 && r % l != 0) {
                // g(r + jm) = g(r) + 2rjm (mod m l); solve for j.
                const u64 gr = static_cast<u64>((u128(r) * r + next - tk) % next);
                const u64 q = gr / m;  // g(r) = q m (mod next)
                const u64 inv = arith::powmod((2 * r) % l, l - 2, l);
                const u64 j = (l - q % l) % l * inv % l;
                lifted.push_back(r + j * m);
            } else {
                for (u64 j = 0; j < l; ++j) {
                    const u64 z = r + j * m;
                    if (static_cast<u64>(u128(z) * z % next) == tk) lifted.push_back(z);
                }
            }
        }
        roots = std::move(lifted);
        m = next;
        if (roots.empty()) break;
    }
    return roots.size();
}

}  // namespace detail

/// #{a in Z/fZ : D_N(a) = 0 (mod f)} via CRT over prime powers of f.
/// D_N(a) = (a - N - 1)^2 - 4N, so each local factor counts square roots of 4N.
inline u64 count_roots_mod(i64 N, u64 f, const arith::spf_table* spf = nullptr) {
    require(f >= 1, error_kind::precondition, "f must be positive");
    const arith::factorization fac = spf ? spf->factorize(f) : arith::factorize(f);
    u64 total = 1;
    for (const auto& pp : fac.factors) {
        total *= detail::count_square_roots_prime_power(4 * N, pp.prime, pp.exponent);
        if (total == 0) break;
    }
    return total;
}

/// Exhaustive #C_N(a, n, f): invertible z mod 4nf^2 with D_N(z) = af^2 (mod 4nf^2).
inline u64 c_set_brute(i64 N, i64 a, i64 n, i64 f) {
    require(n >= 1 && f >= 1, error_kind::precondition, "n and f must be positive");
    const i64 modulus = 4 * n * f * f;
    const i64 rhs = arith::mod(i128(a) * f * f, modulus);
    u64 count = 0;
    for (i64 z = 1; z < modulus; ++z) {
        if (std::gcd(z, modulus) != 1) continue;
        if (arith::mod(d_eval(N, z), modulus) == rhs) ++count;
    }
    return count;
}

enum class local_case {
    odd_unit_split,        ///< l does not divide 4N + af^2 nor (N-1)^2 - af^2: 1 + legendre
    odd_unit_collision,    ///< l does not divide 4N + af^2 but divides (N-1)^2 - af^2: 1
    odd_shallow_square,    ///< 1 <= s < e, s even, unit part a square: 2 (N+1/l)^2 l^(s/2)
    odd_deep,              ///< s >= e: (N+1/l)^2 l^floor(e/2)
    odd_none,              ///< remaining branch: 0
    two_base,              ///< nu_2(4nf^2) = 2: 2
    two_deep_five,         ///< nu_2(4nf^2) >= 3, a = 5 (mod 8): 4
    two_none,              ///< nu_2(4nf^2) >= 3, a = 1 (mod 8): 0
};

inline const char* to_string(local_case c) {
    switch (c) {
        case local_case::odd_unit_split: return "odd_unit_split";
        case local_case::odd_unit_collision: return "odd_unit_collision";
        case local_case::odd_shallow_square: return "odd_shallow_square";
        case local_case::odd_deep: return "odd_deep";
        case local_case::odd_none: return "odd_none";
        case local_case::two_base: return "two_base";
        case local_case::two_deep_five: return "two_deep_five";
        case local_case::two_none: return "two_none";
    }
    return "unknown";
}

struct local_count {
    u64 ell = 0;
    unsigned e = 0;  ///< nu_l(4nf^2)
    u64 count = 0;
    local_case branch = local_case::odd_none;
};

inline void require_odd_hypotheses(i64 N, i64 a, i64 n, i64 f) {
    require(n >= 1 && f >= 1 && N >= 1, error_kind::precondition, "N, n, f must be positive");
    if (N % 2 == 0 || f % 2 == 0) fail(error_kind::unsupported_parity, "closed forms require N and f odd");
    require(arith::mod(a, 4) == 1, error_kind::precondition, "closed forms require a = 1 (mod 4)");
}

namespace detail {

/// Case analysis without hypothesis validation; callers guarantee N, f odd, a = 1 (4), l prime.
inline local_count c_local_closed_unchecked(i64 N, u64 ell, i64 a, i64 n, i64 f) {
    const unsigned e = arith::valuation(static_cast<u64>(n), ell) + 2 * arith::valuation(static_cast<u64>(f), ell) +
                       (ell == 2 ? 2 : 0);
    if (e == 0) fail(error_kind::not_dividing, "l does not divide 4nf^2");

    if (ell == 2) {
        if (e == 2) return {ell, e, 2, local_case::two_base};
        if (arith::mod(a, 8) == 5) return {ell, e, 4, local_case::two_deep_five};
        return {ell, e, 0, local_case::two_none};
    }

    const i64 l = static_cast<i64>(ell);
    const i128 af2 = i128(a) * f * f;
    const i128 M = 4 * i128(N) + af2;
    if (M % l != 0) {
        const i128 collide = i128(N - 1) * (N - 1) - af2;
        if (collide % l == 0) return {ell, e, 1, local_case::odd_unit_collision};
        const int leg = arith::legendre(arith::mod(M, l), ell);
        return {ell, e, static_cast<u64>(1 + leg), local_case::odd_unit_split};
    }
    const int np1 = arith::legendre(arith::mod(i128(N) + 1, l), ell);
    const u64 np1_sq = static_cast<u64>(np1 * np1);
    // s = nu_l(M), capped at e (M = 0 counts as infinitely divisible).
    unsigned s = 0;
    i128 unit = M;
    while (s < e && unit != 0 && unit % l == 0) {
        unit /= l;
        ++s;
    }
    if (unit == 0 || s >= e) return {ell, e, np1_sq * arith::ipow(ell, e / 2), local_case::odd_deep};
    if (s % 2 == 0 && arith::legendre(arith::mod(unit, l), ell) == 1)
        return {ell, e, 2 * np1_sq * arith::ipow(ell, s / 2), local_case::odd_shallow_square};
    return {ell, e, 0, local_case::odd_none};
}

}  // namespace detail

/// #C_N^(l)(a, n, f) from the closed-form case analysis (N, f odd; a = 1 mod 4).
inline local_count c_local_closed(i64 N, u64 ell, i64 a, i64 n, i64 f) {
    require_odd_hypotheses(N, a, n, f);
    require(arith::is_prime(ell), error_kind::precondition, "l must be prime");
    return detail::c_local_closed_unchecked(N, ell, a, n, f);
}

/// Specialization #C_N^(l)(1, 1, f) for an odd prime l dividing f.
inline u64 c_one_one_f(i64 N, u64 ell, i64 f) {
    require(N % 2 != 0 && f % 2 != 0, error_kind::unsupported_parity, "requires N and f odd");
    require(ell != 2 && f % static_cast<i64>(ell) == 0, error_kind::not_dividing, "l must be an odd prime dividing f");
    const unsigned vN = arith::valuation(static_cast<u64>(N), ell);
    const unsigned vf = arith::valuation(static_cast<u64>(f), ell);
    const i64 l = static_cast<i64>(ell);
    if (vN == 0) {
        const i128 v = i128(N) * (N - 1) * (N - 1);
        return static_cast<u64>(1 + arith::legendre(arith::mod(v, l), ell));
    }
    if (2 * vf <= vN) return arith::ipow(ell, vf);
    const i64 Nl = static_cast<i64>(arith::free_part(static_cast<u64>(N), ell));
    if (vN % 2 == 0 && arith::legendre(arith::mod(Nl, l), ell) == 1) return 2 * arith::ipow(ell, vN / 2);
    return 0;
}

/// Product of the local closed forms over l | 4nf^2.
inline u64 c_total(i64 N, i64 a, i64 n, i64 f) {
    require_odd_hypotheses(N, a, n, f);
    const arith::factorization fac = arith::factorize(static_cast<u64>(4 * n * f * f));
    u64 total = 1;
    for (const auto& pp : fac.factors) {
        total *= detail::c_local_closed_unchecked(N, pp.prime, a, n, f).count;
        if (total == 0) break;
    }
    return total;
}

/// S_2(n, a): 1 if n odd; 2 if n even and a = 5 (mod 8); 0 otherwise.
inline int s2(i64 n, i64 a) {
    require(a % 2 != 0, error_kind::precondition, "S_2 requires a odd");
    if (n % 2 != 0) return 1;
    return arith::mod(a, 8) == 5 ? 2 : 0;
}

/// c_{N,f}(n) by summing over a in (Z/4nZ)^*, a = 1 (mod 4).
inline i64 c_nf_brute(i64 N, i64 f, i64 n) {
    require(n >= 1, error_kind::precondition, "n must be positive");
    if (N % 2 == 0 || f % 2 == 0) fail(error_kind::unsupported_parity, "requires N and f odd");
    const i64 odd_part = static_cast<i64>(arith::free_part(static_cast<u64>(n), 2));
    const arith::factorization odd_fac = arith::factorize(static_cast<u64>(odd_part));
    i64 sum = 0;
    for (i64 a = 1; a < 4 * n; a += 4) {
        if (std::gcd(a, 4 * n) != 1) continue;
        i64 term = arith::kronecker(a, static_cast<u64>(n)) * s2(n, a);
        for (const auto& pp : odd_fac.factors) {
            if (term == 0) break;
            term *= static_cast<i64>(c_local_closed(N, pp.prime, a, n, f).count);
        }
        sum += term;
    }
    return sum;
}

/// Which closed form to use in the sub-case l | (f, N) with nu_l(N) = 2 nu_l(f).
/// `verified` agrees with the brute-force sum; `printed` carries an extra (-N_l/l) term
/// and is kept only for comparison.
enum class formula_variant { verified, printed };

/// c_{N,f}(l^alpha) from the closed prime-power values.
inline i64 c_nf_prime_power(i64 N, i64 f, u64 ell, unsigned alpha,
                            formula_variant variant = formula_variant::verified) {
    if (alpha == 0) return 1;
    const i64 l = static_cast<i64>(ell);
    if (ell == 2) return (alpha % 2 ? -1 : 1) * static_cast<i64>(arith::ipow(2, alpha));
    const i64 scale = static_cast<i64>(arith::ipow(ell, alpha - 1));
    const bool even = alpha % 2 == 0;
    const bool divides_f = f % l == 0;
    const bool divides_N = N % l == 0;
    auto leg = [&](i128 v) { return arith::legendre(arith::mod(v, l), ell); };
    if (!divides_f && !divides_N) {
        const int chi_n = leg(N);
        const int chi_nm1 = leg(i128(N) - 1);
        return scale * (even ? l - 1 - chi_n - chi_nm1 * chi_nm1 : -1 - chi_nm1 * chi_nm1);
    }
    if (!divides_f) return scale * (l - 2);
    const i64 c1 = static_cast<i64>(c_one_one_f(N, ell, f));
    if (!divides_N) return scale * c1 * (even ? l - 1 : 0);
    const unsigned vN = arith::valuation(static_cast<u64>(N), ell);
    const unsigned vf = arith::valuation(static_cast<u64>(f), ell);
    if (2 * vf < vN) return scale * c1 * (l - 1);
    if (vN < 2 * vf) return scale * c1 * (even ? l - 1 : 0);
    const i64 Nl = static_cast<i64>(arith::free_part(static_cast<u64>(N), ell));
    const int chi_nl = leg(Nl);
    const int chi_mnl = variant == formula_variant::printed ? leg(-i128(Nl)) : 0;
    return scale * c1 * (even ? l - 1 - chi_nl + chi_mnl : chi_mnl - 1);
}

/// c_{N,f}(n) as the product of closed prime-power values.
inline i64 c_nf_closed(i64 N, i64 f, i64 n, formula_variant variant = formula_variant::verified) {
    require(n >= 1, error_kind::precondition, "n must be positive");
    if (N % 2 == 0 || f % 2 == 0) fail(error_kind::unsupported_parity, "requires N and f odd");
    i64 prod = 1;
    for (const auto& pp : arith::factorize(static_cast<u64>(n)).factors) {
        prod *= c_nf_prime_power(N, f, pp.prime, pp.exponent, variant);
        if (prod == 0) break;
    }
    return prod;
}

}  // namespace curve_spectrum::localcounts
