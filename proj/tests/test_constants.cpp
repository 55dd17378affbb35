#include <gtest/gtest.h>

#include <cmath>

#include "curve_spectrum/constants.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace curve_spectrum;
using namespace curve_spectrum::constants;
using arith::i64;
using arith::u64;

TEST(KFactor, Examples) {
    EXPECT_EQ(k_factor(5, 5).exact, rational(19, 20));
    EXPECT_EQ(k_factor(5, 5).branch, factor_branch::odd_valuation);
    EXPECT_EQ(kind_of([] { k_factor(5, 2); }), error_kind::precondition);
    EXPECT_EQ(k_factor(7, 3).exact, rational(15, 16));
    EXPECT_EQ(k_factor(7, 3).branch, factor_branch::coprime);
    EXPECT_EQ(k_factor_two(9), rational(2, 3));
    EXPECT_EQ(kind_of([] { k_factor(6, 3); }), error_kind::unsupported_parity);
}

TEST(KFactor, EvenValuationBranch) {
    // Verified: same shape as the odd branch. Printed: 1 - (l - (-N_l/l))/(l^(nu+1)(l-1)).
    EXPECT_EQ(k_factor(9, 3).branch, factor_branch::even_valuation);
    EXPECT_EQ(k_factor(9, 3).exact, rational(17, 18));
    EXPECT_EQ(k_factor(9, 3, formula_variant::printed).exact, rational(25, 27));
    EXPECT_EQ(k_factor(45, 3, formula_variant::printed).exact, rational(26, 27));
    EXPECT_EQ(k_factor(25, 5).exact, rational(99, 100));
}

TEST(KFactor, RangeAndBranchConsistency) {
    for (i64 N = 1; N <= 301; N += 2) {
        for (u64 l : arith::primes_in(3, 1000)) {
            const product_factor pf = k_factor(N, l);
            const double v = pf.value.to_double();
            EXPECT_GT(v, 0.0);
            EXPECT_LT(v, 2.0);
            EXPECT_LE(v, 1.0 + 1.0 / double(l));
            EXPECT_NEAR(v, pf.exact.to_double(), 1e-15);
            const unsigned nu = arith::valuation(u64(N), l);
            const factor_branch expect = nu == 0       ? factor_branch::coprime
                                         : nu % 2 == 1 ? factor_branch::odd_valuation
                                                       : factor_branch::even_valuation;
            EXPECT_EQ(pf.branch, expect);
            if (nu == 0) {
                EXPECT_LE(std::abs(1 - v), 3.0 / double(l * l));
            }
        }
    }
}

TEST(KFactor, DenominatorSpellingsAgree) {
    for (u64 l : arith::primes_in(3, 1000)) {
        const auto [a, b] = coprime_denominators(l);
        EXPECT_EQ(a, b);
    }
}

TEST(FFactors, Examples) {
    EXPECT_EQ(f_factors(1, 3, 1).F0, rational(5, 4));
    EXPECT_FALSE(f_factors(1, 3, 1).F2.has_value());
    EXPECT_EQ(f_factors(27, 3, 3).F2, rational(4, 3));
    EXPECT_EQ(f_factors(11, 5, 1).F1, rational(47, 48));
    EXPECT_EQ(f_factors(1, 3, 3).F2, rational(13, 12));  // nu_l(N) < 2 nu_l(f)
    EXPECT_EQ(kind_of([] { f_factors(9, 3, 2); }), error_kind::unsupported_parity);
}

TEST(FFactors, BalancedValuationVariants) {
    // nu_3(9) = 2 nu_3(3): verified 1 - (1 + (N_l/l))/(l(l^2 - 1)); printed adds ((-N_l/l)(l + 1))/(l(l^2 - 1)).
    EXPECT_EQ(f_factors(9, 3, 3).F2, rational(1) - rational(2, 24));
    EXPECT_EQ(f_factors(9, 3, 3, formula_variant::printed).F2, rational(1) - rational(2, 24) - rational(4, 24));
    EXPECT_EQ(f_factors(45, 3, 3).F2, rational(1));
}

TEST(FFactors, AlgebraMatchesCoprimeKFactor) {
    for (i64 N = 1; N <= 99; N += 2) {
        for (u64 l : arith::primes_in(3, 1000)) {
            if (N % i64(l) == 0) continue;
            const i128 L = l;
            const int sym = arith::legendre(arith::mod(i128(N) * (N - 1) * (N - 1), i64(l)), l);
            const rational lhs = f_factors(N, l, 1).F1 + rational(1 + sym, (L * L - 1) * (L - 1));
            EXPECT_EQ(lhs, k_factor(N, l).exact) << N << " " << l;
        }
    }
}

TEST(KOfN, TailEnvelopeCoversLongerProducts) {
    for (i64 N : {3, 9, 15, 45, 105}) {
        const enveloped shortp = k_of_n(N, {.L = 100});
        const enveloped longp = k_of_n(N, {.L = 100000});
        EXPECT_LE(std::abs(shortp.value - longp.value), shortp.envelope) << N;
        EXPECT_NEAR(shortp.envelope, shortp.value * 3.0 / 100, 1e-15);
    }
}

TEST(KOfN, IncludesDivisorsBeyondCutoff) {
    // 1009 is prime: its factor must be present even when L < 1009.
    const double with = k_of_n(1009, {.L = 10}).value;
    double expect = 2.0 / 3.0;
    for (u64 l : {3ull, 5ull, 7ull, 1009ull}) expect *= k_factor(1009, l).value.to_double();
    EXPECT_NEAR(with, expect, 1e-15);
}

TEST(KOfN, Fixtures) {
    // Regression values of this implementation; each is cross-checked against K_0 below.
    EXPECT_NEAR(k_of_n(9, {.L = 1000}).value, 0.554280377654, 1e-11);
    EXPECT_NEAR(k_of_n(3, {.L = 1000}).value, 0.489070921460, 1e-11);
}

TEST(K0, SingleTerm) {
    const k0_result r = k0_truncated(9, {.U = 1, .V = 1});
    EXPECT_DOUBLE_EQ(r.value, 1.0);
}

TEST(K0, EngineMatchesDefinitionExactly) {
    for (i64 N : {1, 3, 9, 15, 21, 25, 45}) {
        const k0_engine engine(N, 12, 11);
        for (u64 f = 1; f <= 11; f += 2) {
            for (u64 n = 1; n <= 12; ++n) {
                EXPECT_EQ(engine.inner_sum(n, f), k0_inner_sum_direct(N, n, f)) << N << " " << n << " " << f;
                EXPECT_EQ(engine.weight_denominator(n, f), i128(f) * n * oracle::phi(4 * n * f * f));
            }
        }
        const rational fast = k0_exact(12, 11, [&](u64 n, u64 f) { return engine.inner_sum(n, f); }, engine);
        EXPECT_EQ(fast, oracle::k0_exact(N, 12, 11)) << N;
        EXPECT_NEAR(k0_truncated(N, {.U = 12, .V = 11}).value, fast.to_double(), 1e-14);
    }
}

TEST(K0, DifferencesShrinkLikeInverseRootU) {
    for (i64 N : {3, 15}) {
        std::vector<double> vals;
        for (u64 U : {100ull, 400ull, 1600ull, 6400ull}) vals.push_back(k0_truncated(N, {.U = U, .V = 50}).value);
        const double d1 = std::abs(vals[1] - vals[0]), d2 = std::abs(vals[2] - vals[1]), d3 = std::abs(vals[3] - vals[2]);
        EXPECT_LT(d2, d1) << N;
        EXPECT_LT(d3, d2) << N;
        // With a 1/sqrt(U) tail each quadrupling roughly halves the step.
        EXPECT_LT(d3, 0.75 * d1) << N;
    }
}

TEST(K0, ThreadCountDoesNotChangeBits) {
    const double one = k0_truncated(15, {.U = 2000, .V = 31}, 1).value;
    EXPECT_EQ(k0_truncated(15, {.U = 2000, .V = 31}, 3).value, one);
}

TEST(Identity, WithinEnvelope) {
    for (i64 N : {3, 15, 27}) {
        const identity_result r = identity_check(N, {.U = 1000, .V = 100, .L = 1000});
        EXPECT_TRUE(r.within()) << N << " residual " << r.residual << " envelope " << r.envelope;
    }
}

TEST(Identity, FixturesCrossValidated) {
    for (i64 N : {3, 9}) {
        const double K = k_of_n(N, {.L = 1000}).value;
        const double k0 = k0_truncated(N, {.U = 10000, .V = 100}).value;
        const double ratio = double(N) / double(arith::euler_phi(u64(N)));
        EXPECT_NEAR(k0, ratio * K, 1e-2) << N;
    }
}

TEST(Identity, PrintedEvenFactorMissesTheLimit) {
    // With the printed even-valuation factor the N = 9 identity is off by more than the U = 1e4 residual.
    const double k0 = k0_truncated(9, {.U = 10000, .V = 200}).value;
    const double verified = 1.5 * k_of_n(9, {.L = 10000}).value;
    const double printed = 1.5 * k_of_n(9, {.L = 10000}, formula_variant::printed).value;
    EXPECT_LT(std::abs(k0 - verified), 0.005);
    EXPECT_GT(std::abs(k0 - printed), 0.01);
}

TEST(PredictedAverage, Examples) {
    for (i64 N : {3, 9}) {
        const truncation_spec spec{.L = 1000};
        EXPECT_NEAR(predicted_average(N, spec).value, 1.5 * k_of_n(N, spec).value / std::log(double(N)), 1e-15);
    }
    for (i64 N = 3; N <= 199; N += 2) {
        const double v = predicted_average(N, {.L = 1000}).value;
        EXPECT_GT(v, 0.0);
        EXPECT_LT(v, 2.0 / std::log(double(N))) << N;
    }
    EXPECT_EQ(kind_of([] { predicted_average(1, {}); }), error_kind::precondition);
    EXPECT_EQ(kind_of([] { predicted_average(8, {}); }), error_kind::unsupported_parity);
}
