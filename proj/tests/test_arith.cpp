#include <gtest/gtest.h>

#include <random>

#include "curve_spectrum/arith.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace curve_spectrum;
using namespace curve_spectrum::arith;

namespace {

std::vector<u64> as_vector(const prime_table& t) { return {t.begin(), t.end()}; }

}  // namespace

TEST(PrimesIn, SmallRanges) {
    EXPECT_EQ(as_vector(primes_in(4, 16)), (std::vector<u64>{5, 7, 11, 13}));
    EXPECT_TRUE(primes_in(0, 1).empty());
    EXPECT_EQ(as_vector(primes_in(10, 20)), (std::vector<u64>{11, 13, 17, 19}));
    EXPECT_EQ(as_vector(primes_in(2, 2)), (std::vector<u64>{2}));
}

TEST(PrimesIn, MatchesTrialDivisionOnRandomRanges) {
    std::mt19937_64 rng(17);
    for (int i = 0; i < 40; ++i) {
        const u64 lo = rng() % 1'000'000;
        const u64 hi = std::min<u64>(1'000'000, lo + rng() % 5000);
        EXPECT_EQ(as_vector(primes_in(lo, hi)), oracle::primes_between(lo, hi)) << lo << ".." << hi;
    }
}

TEST(PrimesIn, SegmentSizeDoesNotMatter) {
    const auto whole = as_vector(primes_in(0, 200'000));
    for (u64 seg : {1u, 7u, 1000u, 65536u}) {
        EXPECT_EQ(as_vector(primes_in(0, 200'000, {.segment_size = seg})), whole);
    }
    EXPECT_EQ(whole.size(), 17984u);
}

TEST(PrimesIn, UnsegmentedRangeLimit) {
    EXPECT_EQ(kind_of([] { primes_in(0, 1000, {.segment_size = 100, .segmented = false}); }),
              error_kind::range_too_large);
    EXPECT_EQ(primes_in(0, 99, {.segment_size = 100, .segmented = false}).size(), 25u);
    EXPECT_EQ(kind_of([] { primes_in(5, 4); }), error_kind::precondition);
}

TEST(PrimesIn, ContainsAndBounds) {
    const auto t = primes_in(100, 200);
    EXPECT_TRUE(t.contains(101));
    EXPECT_FALSE(t.contains(100));
    EXPECT_EQ(t.lo(), 100u);
    EXPECT_EQ(t.hi(), 200u);
}

TEST(IsPrime, MatchesTrialDivision) {
    for (u64 n = 0; n < 20000; ++n) EXPECT_EQ(is_prime(n), oracle::is_prime(n)) << n;
    EXPECT_TRUE(is_prime(18446744073709551557ull));
    EXPECT_FALSE(is_prime(3215031751ull));  // strong pseudoprime to bases 2, 3, 5, 7
}

TEST(Kronecker, Examples) {
    EXPECT_EQ(kronecker(-19, 5), 1);
    for (i64 d : {-7, 0, 5, 12}) EXPECT_EQ(kronecker(d, 1), 1);
    EXPECT_EQ(kronecker(-3, 2), -1);
    EXPECT_EQ(kronecker(1, 0), 1);
    EXPECT_EQ(kronecker(2, 0), 0);
}

TEST(Kronecker, MatchesDefinition) {
    for (i64 d = -60; d <= 60; ++d) {
        for (u64 n = 0; n <= 300; ++n) {
            if (d == 0 && n == 0) continue;
            EXPECT_EQ(kronecker(d, n), oracle::kronecker(d, n)) << d << " " << n;
        }
    }
}

TEST(Kronecker, CompletelyMultiplicativeInN) {
    for (i64 d = -50; d <= 50; ++d) {
        for (u64 n = 1; n <= 50; ++n) {
            for (u64 m = 1; m <= 50; ++m) EXPECT_EQ(kronecker(d, n * m), kronecker(d, n) * kronecker(d, m));
        }
    }
}

TEST(Kronecker, UnitExactlyOffOddPrimeDivisors) {
    for (u64 p : primes_in(3, 200)) {
        for (i64 d = -100; d <= 100; ++d) {
            const int k = kronecker(d, p);
            if (d % static_cast<i64>(p) == 0) {
                EXPECT_EQ(k, 0);
            } else {
                EXPECT_TRUE(k == 1 || k == -1);
                EXPECT_EQ(k, legendre(d, p));
            }
        }
    }
}

TEST(Factorize, Examples) {
    EXPECT_EQ(factorize(18).factors, (std::vector<prime_power>{{2, 1}, {3, 2}}));
    EXPECT_TRUE(factorize(1).empty());
    EXPECT_EQ(factorize(496).factors, (std::vector<prime_power>{{2, 4}, {31, 1}}));
}

TEST(Factorize, ReconstructsAndOrders) {
    std::mt19937_64 rng(5);
    std::vector<u64> inputs = {1000000007ull * 998244353ull, 4611686018427387847ull, 600851475143ull,
                               (1ull << 61) - 1, 999999000001ull * 3};
    for (int i = 0; i < 200; ++i) inputs.push_back(rng() >> (rng() % 40));
    for (u64 n : inputs) {
        if (n == 0) continue;
        const factorization f = factorize(n);
        EXPECT_EQ(f.value(), n);
        for (std::size_t i = 0; i < f.factors.size(); ++i) {
            EXPECT_TRUE(is_prime(f.factors[i].prime));
            EXPECT_GE(f.factors[i].exponent, 1u);
            if (i) {
                EXPECT_LT(f.factors[i - 1].prime, f.factors[i].prime);
            }
        }
    }
}

TEST(Factorize, OmegaTauValuation) {
    const factorization f = factorize(720);
    EXPECT_EQ(f.omega(), 3u);
    EXPECT_EQ(f.tau(), 30u);
    EXPECT_EQ(f.valuation(2), 4u);
    EXPECT_EQ(f.valuation(7), 0u);
    EXPECT_EQ(valuation(720, 3), 2u);
    EXPECT_EQ(free_part(720, 2), 45u);
}

TEST(SpfTable, AgreesWithFactorize) {
    const spf_table spf(5000);
    for (u64 n = 1; n <= 5000; ++n) EXPECT_EQ(spf.factorize(n).factors, factorize(n).factors);
}

TEST(EulerPhi, Examples) {
    EXPECT_EQ(euler_phi(1), 1u);
    EXPECT_EQ(euler_phi(9), 6u);
    EXPECT_EQ(euler_phi(36), 12u);
    for (u64 n = 1; n <= 500; ++n) EXPECT_EQ(euler_phi(n), oracle::phi(n));
}

TEST(Kappa, Examples) {
    EXPECT_EQ(kappa(18, 5), 5u);
    EXPECT_EQ(kappa(18, 3), 1u);
    EXPECT_EQ(kappa(18, 25), 1u);
    EXPECT_EQ(kappa(1, 12), 3u);
}

TEST(Multiplicative, PhiAndKappaOnRandomCoprimePairs) {
    std::mt19937_64 rng(99);
    int checked = 0;
    while (checked < 3000) {
        const u64 n = 1 + rng() % 10000, m = 1 + rng() % 10000;
        if (std::gcd(n, m) != 1) continue;
        ++checked;
        EXPECT_EQ(euler_phi(n * m), euler_phi(n) * euler_phi(m));
        for (u64 k : {1ull, 6ull, 18ull, 35ull}) EXPECT_EQ(kappa(k, n * m), kappa(k, n) * kappa(k, m));
    }
}

TEST(Kappa, TrivialOnSquares) {
    for (u64 n = 1; n * n <= 1000; ++n) {
        for (u64 m : {1ull, 2ull, 6ull, 30ull, 77ull}) EXPECT_EQ(kappa(m, n * n), 1u);
    }
}

TEST(Helpers, FloorDivModIsqrt) {
    EXPECT_EQ(floor_div(-7, 2), -4);
    EXPECT_EQ(floor_div(7, 2), 3);
    EXPECT_EQ(mod(i64(-7), 5), 3);
    EXPECT_EQ(isqrt(0), 0u);
    EXPECT_EQ(isqrt(99), 9u);
    EXPECT_EQ(isqrt(100), 10u);
    EXPECT_EQ(isqrt(~0ull), 4294967295u);
}
