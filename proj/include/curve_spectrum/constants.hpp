#pragma once

#include <cmath>
#include <future>
#include <map>
#include <optional>
#include <thread>
#include <tuple>
#include <vector>

#include "curve_spectrum/arith.hpp"
#include "curve_spectrum/ddreal.hpp"
#include "curve_spectrum/error.hpp"
#include "curve_spectrum/localcounts.hpp"
#include "curve_spectrum/rational.hpp"

/// The Euler product K(N), its local factors, and the truncated double sum K_0(N).
namespace curve_spectrum::constants {

using arith::i64;
using arith::u64;
using localcounts::formula_variant;

enum class factor_branch { coprime, odd_valuation, even_valuation };

inline const char* to_string(factor_branch b) {
    switch (b) {
        case factor_branch::coprime: return "coprime";
        case factor_branch::odd_valuation: return "odd_valuation";
        case factor_branch::even_valuation: return "even_valuation";
    }
    return "unknown";
}

struct product_factor {
    u64 ell = 0;
    rational exact;
    dd_real value;
    factor_branch branch = factor_branch::coprime;
};

struct truncation_spec {
    u64 U = 10'000;  ///< n-cutoff
    u64 V = 200;     ///< f-cutoff
    u64 L = 10'000;  ///< Euler product cutoff
};

/// Exponent used in the N^eps/sqrt(U) truncation envelope.
inline constexpr double envelope_epsilon = 0.1;

namespace detail {

inline int leg(i128 v, u64 ell) { return arith::legendre(arith::mod(v, static_cast<i64>(ell)), ell); }

inline void require_odd_n(i64 N) {
    require(N >= 1, error_kind::precondition, "N must be positive");
    if (N % 2 == 0) fail(error_kind::unsupported_parity, "K(N) is defined for odd N");
}

}  // namespace detail

/// The two spellings of the coprime-branch denominator: (l-1)^2(l+1) and (l-1)(l^2-1).
inline std::pair<i128, i128> coprime_denominators(u64 ell) {
    const i128 l = ell;
    return {(l - 1) * (l - 1) * (l + 1), (l - 1) * (l * l - 1)};
}

/// The l-factor of K(N), for odd N and odd prime l.
/// With the verified variant the even-valuation factor coincides with the odd one.
inline product_factor k_factor(i64 N, u64 ell, formula_variant variant = formula_variant::verified) {
    detail::require_odd_n(N);
    require(arith::is_prime(ell), error_kind::precondition, "l must be prime");
    if (ell == 2) fail(error_kind::precondition, "l = 2 has no local factor here; K(N) carries it as the constant 2/3");
    const i128 l = ell;
    const unsigned v = arith::valuation(static_cast<u64>(N), ell);
    product_factor pf;
    pf.ell = ell;
    if (v == 0) {
        const auto [den, den_alt] = coprime_denominators(ell);
        if (den != den_alt) fail(error_kind::precondition, "denominator spellings disagree");
        const int c = detail::leg(i128(N) - 1, ell);
        pf.exact = rational(1) - rational(i128(c * c) * l + 1, den);
        pf.branch = factor_branch::coprime;
    } else if (v % 2 == 1) {
        pf.exact = rational(1) - rational(1, i128(arith::ipow(ell, v)) * (l - 1));
        pf.branch = factor_branch::odd_valuation;
    } else if (variant == formula_variant::verified) {
        pf.exact = rational(1) - rational(1, i128(arith::ipow(ell, v)) * (l - 1));
        pf.branch = factor_branch::even_valuation;
    } else {
        const i64 Nl = static_cast<i64>(arith::free_part(static_cast<u64>(N), ell));
        pf.exact = rational(1) - rational(l - detail::leg(-i128(Nl), ell), i128(arith::ipow(ell, v + 1)) * (l - 1));
        pf.branch = factor_branch::even_valuation;
    }
    pf.value = to_dd(pf.exact);
    return pf;
}

/// The l = 2 factor of the coprime product for odd N: 1 - ((N-1/2)^2 2 + 1)/3 = 2/3.
inline rational k_factor_two(i64 N) {
    detail::require_odd_n(N);
    const int c = arith::kronecker(N - 1, 2);
    return rational(1) - rational(i128(c * c) * 2 + 1, 3);
}

struct enveloped {
    double value = 0;
    double envelope = 0;
};

/// K(N) = (2/3) prod over odd l <= L, and every l | N, of k_factor. The omitted factors
/// each lie in [1 - 1/(l-1)^2, 1], so the relative tail is at most sum_{l > L} 3/l^2 < 3/L.
inline enveloped k_of_n(i64 N, const truncation_spec& spec, formula_variant variant = formula_variant::verified) {
    detail::require_odd_n(N);
    require(spec.L >= 1, error_kind::precondition, "L must be positive");
    dd_real prod = to_dd(k_factor_two(N));
    const arith::factorization fac = arith::factorize(static_cast<u64>(N));
    for (u64 ell : arith::primes_in(3, std::max<u64>(spec.L, 3))) {
        if (ell > spec.L) break;
        prod *= k_factor(N, ell, variant).value;
    }
    for (const auto& pp : fac.factors) {
        if (pp.prime > spec.L) prod *= k_factor(N, pp.prime, variant).value;
    }
    const double value = prod.to_double();
    return {value, value * 3.0 / double(spec.L)};
}

struct f_factor_values {
    rational F0;
    rational F1;
    std::optional<rational> F2;
};

/// F_0(l), F_1(l) and, when l | f, F_2(l, f).
inline f_factor_values f_factors(i64 N, u64 ell, i64 f, formula_variant variant = formula_variant::verified) {
    detail::require_odd_n(N);
    require(ell != 2 && arith::is_prime(ell), error_kind::precondition, "l must be an odd prime");
    require(f >= 1 && f % 2 != 0, error_kind::unsupported_parity, "f must be odd and positive");
    const i128 l = ell;
    f_factor_values out;
    out.F0 = rational(1) + rational(l - 2, (l - 1) * (l - 1));
    const int c = detail::leg(i128(N) - 1, ell);
    const int cn = detail::leg(N, ell);
    out.F1 = rational(1) - rational(i128(c * c) * l + cn + c * c + 1, (l - 1) * (l * l - 1));
    if (f % static_cast<i64>(ell) == 0) {
        const unsigned vN = arith::valuation(static_cast<u64>(N), ell);
        const unsigned vf = arith::valuation(static_cast<u64>(f), ell);
        if (vN < 2 * vf) {
            out.F2 = rational(1) + rational(1, l * (l + 1));
        } else if (vN > 2 * vf) {
            out.F2 = rational(1) + rational(1, l);
        } else {
            const i64 Nl = static_cast<i64>(arith::free_part(static_cast<u64>(N), ell));
            const int m = variant == formula_variant::printed ? detail::leg(-i128(Nl), ell) : 0;
            const int p = detail::leg(Nl, ell);
            out.F2 = rational(1) + rational(i128(m) * l + m - p - 1, l * (l * l - 1));
        }
    }
    return out;
}

/// Local building blocks of the K_0 double sum for one N. For a pair (n, f) the inner sum
/// sum_{a mod 4n, a = 1 (4)} (a/n) #C_N(a, n, f) splits by CRT into a 2-adic sum, one
/// character-weighted sum per odd l | n, and #C_N^(l)(1, 1, f) for l | f not dividing n.
/// Every local count comes from localcounts::c_local_closed.
class k0_engine {
public:
    k0_engine(i64 N, u64 U, u64 V) : N_(N), spf_(std::max<u64>({U, V, 4})) {
        detail::require_odd_n(N);
        require(U >= 1 && V >= 1, error_kind::precondition, "U and V must be positive");
        for (unsigned alpha = 0; arith::ipow(2, alpha) <= U; ++alpha) two_.push_back(two_adic_sum(alpha));
        // beta = 0 blocks for every odd prime power up to U.
        for (u64 ell : arith::primes_in(3, std::max<u64>(U, 3))) {
            if (ell > U) break;
            for (unsigned alpha = 1; arith::ipow(ell, alpha) <= U; ++alpha) odd_[{ell, alpha, 0}] = odd_sum(ell, alpha, 0);
        }
        // blocks touching f: l^beta || f with f <= V odd.
        for (u64 f = 3; f <= V; f += 2) {
            for (const auto& pp : spf_.factorize(f).factors) {
                const unsigned beta = pp.exponent;
                const auto key0 = std::make_tuple(pp.prime, 0u, beta);
                if (!odd_.count(key0)) odd_[key0] = static_cast<i64>(single(pp.prime, beta));
                for (unsigned alpha = 1; arith::ipow(pp.prime, alpha) <= U; ++alpha) {
                    const auto key = std::make_tuple(pp.prime, alpha, beta);
                    if (!odd_.count(key)) odd_[key] = odd_sum(pp.prime, alpha, beta);
                }
            }
        }
    }

    i64 n_value() const { return N_; }
    const arith::spf_table& spf() const { return spf_; }

    /// sum_{a mod 4n, a = 1 (4)} (a/n) #C_N(a, n, f).
    i128 inner_sum(u64 n, u64 f) const {
        const arith::factorization fn = spf_.factorize(n);
        const arith::factorization ff = spf_.factorize(f);
        i128 prod = two_.at(fn.valuation(2));
        for (const auto& pp : fn.factors) {
            if (pp.prime == 2) continue;
            prod *= odd_.at({pp.prime, pp.exponent, ff.valuation(pp.prime)});
            if (prod == 0) return 0;
        }
        for (const auto& pp : ff.factors) {
            if (fn.valuation(pp.prime) == 0) prod *= odd_.at({pp.prime, 0u, pp.exponent});
            if (prod == 0) return 0;
        }
        return prod;
    }

    /// f n phi(4 n f^2), the denominator of the (n, f) term.
    i128 weight_denominator(u64 n, u64 f) const {
        const arith::factorization fn = spf_.factorize(n);
        const arith::factorization ff = spf_.factorize(f);
        i128 phi = static_cast<i128>(arith::ipow(2, fn.valuation(2) + 1));  // phi(2^(v+2))
        std::map<u64, unsigned> odd;
        for (const auto& pp : fn.factors) {
            if (pp.prime != 2) odd[pp.prime] += pp.exponent;
        }
        for (const auto& pp : ff.factors) odd[pp.prime] += 2 * pp.exponent;
        for (const auto& [ell, e] : odd) phi *= static_cast<i128>(arith::ipow(ell, e - 1) * (ell - 1));
        return phi * i128(n) * i128(f);
    }

private:
    u64 single(u64 ell, unsigned beta) const {
        return localcounts::detail::c_local_closed_unchecked(N_, ell, 1, 1, static_cast<i64>(arith::ipow(ell, beta))).count;
    }

    i64 two_adic_sum(unsigned alpha) const {
        const i64 mod = static_cast<i64>(arith::ipow(2, alpha + 2));
        const i64 n = static_cast<i64>(arith::ipow(2, alpha));
        i64 sum = 0;
        for (i64 a = 1; a < mod; a += 4) {
            const int chi = alpha % 2 ? arith::kronecker(a, 2) : 1;
            sum += chi * static_cast<i64>(localcounts::detail::c_local_closed_unchecked(N_, 2, a, n, 1).count);
        }
        return sum;
    }

    i64 odd_sum(u64 ell, unsigned alpha, unsigned beta) const {
        const i64 mod = static_cast<i64>(arith::ipow(ell, alpha));
        const i64 f = static_cast<i64>(arith::ipow(ell, beta));
        i64 sum = 0;
        for (i64 r = 1; r < mod; ++r) {
            if (r % static_cast<i64>(ell) == 0) continue;
            const int chi = alpha % 2 ? arith::legendre(r, ell) : 1;
            // representative congruent to r mod l^alpha and to 1 mod 4
            i64 a = r;
            while (arith::mod(a, 4) != 1) a += mod;
            sum += chi * static_cast<i64>(localcounts::detail::c_local_closed_unchecked(N_, ell, a, mod, f).count);
        }
        return sum;
    }

    i64 N_;
    arith::spf_table spf_;
    std::vector<i64> two_;
    std::map<std::tuple<u64, unsigned, unsigned>, i64> odd_;
};

/// Exact truncated K_0 for small cutoffs, given any inner-sum routine (n, f) -> integer.
template <typename InnerSum>
rational k0_exact(u64 U, u64 V, InnerSum&& inner, const k0_engine& engine) {
    rational sum(0);
    for (u64 f = 1; f <= V; f += 2) {
        for (u64 n = 1; n <= U; ++n) {
            const i128 t = inner(n, f);
            if (t != 0) sum += rational(t, engine.weight_denominator(n, f));
        }
    }
    return sum;
}

/// The (n, f) inner sum from the definition: a direct scan of a mod 4n using c_total.
inline i128 k0_inner_sum_direct(i64 N, u64 n, u64 f) {
    i128 sum = 0;
    const i64 nn = static_cast<i64>(n), ff = static_cast<i64>(f);
    for (i64 a = 1; a < 4 * nn; a += 4) {
        const int chi = arith::kronecker(a, n);
        if (chi) sum += chi * static_cast<i128>(localcounts::c_total(N, a, nn, ff));
    }
    return sum;
}

struct k0_result {
    double value = 0;
    double envelope = 0;
};

/// Envelope N^eps/sqrt(U) + log log N / V for the truncated double sum.
inline double k0_envelope(i64 N, u64 U, u64 V) {
    const double lnN = std::log(double(N));
    const double loglog = lnN > 1 ? std::log(lnN) : 0.0;
    return std::pow(double(N), envelope_epsilon) / std::sqrt(double(U)) + std::max(loglog, 0.0) / double(V);
}

/// K_0(N) truncated at f <= V (odd), n <= U. Work splits over f; partial sums are reduced
/// in ascending f, each accumulated in ascending n, so the result is thread-count independent.
inline k0_result k0_truncated(i64 N, const truncation_spec& spec, unsigned threads = 0) {
    const k0_engine engine(N, spec.U, spec.V);
    std::vector<u64> fs;
    for (u64 f = 1; f <= spec.V; f += 2) fs.push_back(f);
    std::vector<dd_real> partial(fs.size());
    auto work = [&](std::size_t i) {
        dd_real s;
        const u64 f = fs[i];
        for (u64 n = 1; n <= spec.U; ++n) {
            const i128 t = engine.inner_sum(n, f);
            if (t != 0) s += curve_spectrum::detail::i128_to_dd(t) / curve_spectrum::detail::i128_to_dd(engine.weight_denominator(n, f));
        }
        partial[i] = s;
    };
    unsigned workers = threads ? threads : std::max(1u, std::thread::hardware_concurrency());
    workers = std::min<unsigned>(workers, static_cast<unsigned>(fs.size()));
    if (workers <= 1) {
        for (std::size_t i = 0; i < fs.size(); ++i) work(i);
    } else {
        std::vector<std::future<void>> jobs;
        for (unsigned w = 0; w < workers; ++w) {
            jobs.push_back(std::async(std::launch::async, [&, w] {
                for (std::size_t i = w; i < fs.size(); i += workers) work(i);
            }));
        }
        for (auto& j : jobs) j.get();
    }
    dd_real total;
    for (const auto& s : partial) total += s;
    return {total.to_double(), k0_envelope(N, spec.U, spec.V)};
}

struct identity_result {
    double k0 = 0;
    double rhs = 0;  ///< (N/phi(N)) K(N)
    double residual = 0;
    double envelope = 0;
    bool within() const { return residual <= envelope; }
};

/// |K_0(N) - (N/phi(N)) K(N)| with the combined truncation envelope.
inline identity_result identity_check(i64 N, const truncation_spec& spec, unsigned threads = 0) {
    const k0_result k0 = k0_truncated(N, spec, threads);
    const enveloped K = k_of_n(N, spec);
    const double ratio = double(N) / double(arith::euler_phi(static_cast<u64>(N)));
    identity_result r;
    r.k0 = k0.value;
    r.rhs = ratio * K.value;
    r.residual = std::abs(r.k0 - r.rhs);
    r.envelope = k0.envelope + ratio * K.envelope;
    return r;
}

/// Main term K(N) N / (phi(N) ln N).
inline enveloped predicted_average(i64 N, const truncation_spec& spec) {
    require(N >= 3, error_kind::precondition, "predicted_average requires N >= 3");
    const enveloped K = k_of_n(N, spec);
    const double scale = double(N) / (double(arith::euler_phi(static_cast<u64>(N))) * std::log(double(N)));
    return {K.value * scale, K.envelope * scale};
}

}  // namespace curve_spectrum::constants
