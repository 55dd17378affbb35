#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>

#include "curve_spectrum/classno.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace curve_spectrum;
using namespace curve_spectrum::classno;
using arith::i64;
using arith::u64;

TEST(ClassNumber, Examples) {
    EXPECT_EQ(class_number(-3), (class_data{-3, 1, 6}));
    EXPECT_EQ(class_number(-4), (class_data{-4, 1, 4}));
    EXPECT_EQ(class_number(-19), (class_data{-19, 1, 2}));
    EXPECT_EQ(class_number(-23).h, 3);
    EXPECT_EQ(class_number(-163).h, 1);
}

TEST(ClassNumber, MatchesFormSearch) {
    for (i64 d = -3; d >= -4000; --d) {
        if (!is_negative_discriminant(d)) continue;
        const class_data cd = class_number(d);
        EXPECT_EQ(cd.h, oracle::class_number(d)) << d;
        EXPECT_GE(cd.h, 1);
    }
}

TEST(ClassNumber, RejectsNonDiscriminants) {
    for (i64 d : {0, 1, 5, -1, -2, -5, -6}) {
        EXPECT_EQ(kind_of([d] { class_number(d); }), error_kind::invalid_discriminant) << d;
        EXPECT_EQ(kind_of([d] { kronecker_class_number(d); }), error_kind::invalid_discriminant) << d;
    }
}

TEST(KroneckerClassNumber, Examples) {
    EXPECT_EQ(kronecker_class_number(-3).value, rational(1, 6));
    EXPECT_EQ(kronecker_class_number(-12).value, rational(2, 3));
    EXPECT_EQ(kronecker_class_number(-19).value, rational(1, 2));
}

TEST(KroneckerClassNumber, DenominatorDividesTwelveAndMatchesOracle) {
    for (i64 D = -3; D >= -3000; --D) {
        if (!is_negative_discriminant(D)) continue;
        const rational H = kronecker_class_number(D).value;
        EXPECT_GT(H, rational(0));
        EXPECT_EQ(12 % H.den(), 0) << D;
        EXPECT_EQ(H, oracle::hurwitz(D)) << D;
    }
}

TEST(LOneTruncated, Examples) {
    const truncated_value a = l_one_truncated(-3, 100000);
    EXPECT_NEAR(a.value, std::numbers::pi / (3 * std::sqrt(3.0)), 1e-3);
    EXPECT_NEAR(a.value, 0.6046, 1e-3);
    const truncated_value b = l_one_truncated(-4, 100000);
    EXPECT_NEAR(b.value, 0.7854, 1e-3);
    EXPECT_NEAR(b.value, oracle::leibniz(100000), 1e-12);
    EXPECT_DOUBLE_EQ(l_one_truncated(-3, 1).value, 1.0);
}

TEST(LOneTruncated, UncertaintyCoversTheLimit) {
    // Against the exact value 2 pi h / (w sqrt|d|) from the class number formula.
    for (i64 d : {-3, -4, -7, -8, -15, -20, -23, -163, -1000}) {
        const class_data cd = class_number(d);
        const double exact = 2 * std::numbers::pi * double(cd.h) / (double(cd.w) * std::sqrt(double(-d)));
        for (u64 U : {10ull, 1000ull, 100000ull}) {
            const truncated_value v = l_one_truncated(d, U);
            EXPECT_LE(std::abs(v.value - exact), v.uncertainty) << d << " " << U;
        }
    }
}

TEST(ClassNumberFormula, Examples) {
    EXPECT_LT(class_number_formula_check(-3, 100000).residual, 1e-3);
    EXPECT_LT(class_number_formula_check(-163, 1000000).residual, 1e-3);
    EXPECT_LT(class_number_formula_check(-4, 100000).residual, 1e-3);
    EXPECT_TRUE(class_number_formula_check(-3, 100000).within());
}

TEST(Deuring, Examples) {
    EXPECT_EQ(deuring_mass(5, 1), rational(1, 2));
    EXPECT_EQ(kronecker_class_number(-19).value, rational(1, 2));
    rational total(0);
    for (i64 t = -4; t <= 4; ++t) total += deuring_mass(5, t);
    EXPECT_EQ(total, rational(5));
    EXPECT_EQ(kind_of([] { deuring_mass(5, 5); }), error_kind::precondition);
    EXPECT_EQ(kind_of([] { deuring_mass(3, 1); }), error_kind::precondition);
}

TEST(Deuring, TableMatchesAwayFromSupersingularTrace) {
    for (u64 p : arith::primes_in(5, 97)) {
        rational total(0);
        for (const deuring_row& r : deuring_table(p)) {
            total += r.mass;
            if (r.t % i64(p) != 0) {
                EXPECT_TRUE(r.match()) << p << " " << r.t;
                EXPECT_EQ(r.h, oracle::hurwitz(r.t * r.t - 4 * i64(p)));
            }
        }
        EXPECT_EQ(total, rational(i128(p))) << p;
    }
}

TEST(Deuring, TraceZeroIsReportedNotAsserted) {
    // The t = 0 row is compared against H(-4p) only for information.
    const trace_histogram hist(7);
    EXPECT_EQ(hist.pairs_with_trace(0) + hist.pairs_with_trace(1) + hist.pairs_with_trace(-1) +
                  hist.pairs_with_trace(2) + hist.pairs_with_trace(-2) + hist.pairs_with_trace(3) +
                  hist.pairs_with_trace(-3) + hist.pairs_with_trace(4) + hist.pairs_with_trace(-4) +
                  hist.pairs_with_trace(5) + hist.pairs_with_trace(-5),
              42u);
    const rational mass0 = hist.mass(0);
    const rational h28 = kronecker_class_number(-28).value;
    EXPECT_GT(mass0, rational(0));
    RecordProperty("p7_t0_mass", mass0.str());
    RecordProperty("p7_t0_H", h28.str());
}

TEST(ClassSideSum, TermByTerm) {
    for (u64 N : {9ull, 15ull}) {
        double expect = 0;
        for (u64 p : oracle::primes_between(2, 4 * N)) {
            const i64 D = (i64(p) - i64(N) - 1) * (i64(p) - i64(N) - 1) - 4 * i64(N);
            if (D < 0 && p > 3) expect += oracle::hurwitz(D).to_double() / double(p);
        }
        EXPECT_NEAR(class_number_side_sum(N), expect, 1e-14) << N;
    }
    EXPECT_EQ(kind_of([] { class_number_side_sum(7); }), error_kind::precondition);
}

TEST(Cache, CsvRoundTrip) {
    const auto dir = std::filesystem::temp_directory_path() / "curve_spectrum_cache_test";
    std::filesystem::remove_all(dir);
    const auto path = dir / "nested" / "classno.csv";
    class_number_cache a;
    for (i64 d : {-3, -4, -23, -47, -163, -12}) a.get(d);
    EXPECT_TRUE(a.dirty());
    a.save(path);
    EXPECT_FALSE(std::filesystem::exists(path.string() + ".tmp"));

    std::ifstream in(path);
    std::string line, text;
    std::getline(in, line);
    EXPECT_EQ(line, "d,h,w");
    i64 prev = 0;
    int rows = 0;
    while (std::getline(in, line)) {
        const i64 d = std::stoll(line.substr(0, line.find(',')));
        EXPECT_LT(d, prev);
        prev = d;
        ++rows;
    }
    EXPECT_EQ(rows, 6);

    class_number_cache b;
    b.load(path);
    EXPECT_EQ(b.size(), 6u);
    EXPECT_FALSE(b.dirty());
    EXPECT_EQ(b.get(-47), class_number(-47));
    EXPECT_EQ(kronecker_class_number(-12, b).value, rational(2, 3));

    std::ofstream(dir / "bad.csv") << "x,y\n";
    class_number_cache c;
    EXPECT_EQ(kind_of([&] { c.load(dir / "bad.csv"); }), error_kind::io);
    c.load(dir / "missing.csv");
    EXPECT_EQ(c.size(), 0u);
    std::filesystem::remove_all(dir);
}
