#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "curve_spectrum/arith.hpp"
#include "curve_spectrum/classno.hpp"
#include "curve_spectrum/constants.hpp"
#include "curve_spectrum/curves.hpp"
#include "curve_spectrum/ddreal.hpp"
#include "curve_spectrum/error.hpp"
#include "curve_spectrum/rational.hpp"

/// Short-interval prime statistics and the end-to-end family-average experiment.
namespace curve_spectrum::expt {

using arith::i64;
using arith::u64;

/// Interval (X, X + Y] restricted to p = a (mod q).
struct interval_spec {
    double X = 2;
    double Y = 1;
    u64 q = 1;
    i64 a = 0;
};

namespace detail {

inline std::pair<u64, u64> integer_range(double X, double Y) {
    require(X >= 0 && Y >= 0, error_kind::precondition, "X and Y must be nonnegative");
    const u64 lo = static_cast<u64>(std::floor(X)) + 1;
    const u64 hi = static_cast<u64>(std::floor(X + Y));
    return {lo, hi};
}

}  // namespace detail

/// theta(X, Y; q, a) = sum of ln p over primes X < p <= X + Y with p = a (mod q).
inline double theta(const interval_spec& s) {
    require(s.q >= 1, error_kind::precondition, "modulus must be positive");
    const auto [lo, hi] = detail::integer_range(s.X, s.Y);
    if (hi < lo) return 0.0;
    const u64 r = static_cast<u64>(arith::mod(s.a, static_cast<i64>(s.q)));
    dd_real sum;
    for (u64 p : arith::primes_in(lo, hi)) {
        if (p % s.q == r) sum += dd_real(std::log(double(p)));
    }
    return sum.to_double();
}

/// E(X, Y; q, a) = theta - Y/phi(q).
inline double e_err(const interval_spec& s) {
    require(s.q >= 1, error_kind::precondition, "modulus must be positive");
    const i64 r = arith::mod(s.a, static_cast<i64>(s.q));
    if (std::gcd(static_cast<u64>(r), s.q) != 1)
        fail(error_kind::non_coprime_residue, "gcd(a, q) != 1 for q = " + std::to_string(s.q));
    return theta(s) - s.Y / double(arith::euler_phi(s.q));
}

/// sum_{q <= Q} sum_{(a,q)=1} E(X, Y; q, a)^2 in one sieve pass with per-(q, a) accumulators.
inline double bdh_statistic(double X, double Y, u64 Q) {
    require(Y <= X, error_kind::precondition, "bdh_statistic requires Y <= X");
    require(Q >= 1 && double(Q) <= Y, error_kind::precondition, "bdh_statistic requires 1 <= Q <= Y");
    const auto [lo, hi] = detail::integer_range(X, Y);
    std::vector<std::vector<dd_real>> acc(Q + 1);
    for (u64 q = 1; q <= Q; ++q) acc[q].assign(q, dd_real{});
    if (hi >= lo) {
        for (u64 p : arith::primes_in(lo, hi)) {
            const dd_real lp(std::log(double(p)));
            for (u64 q = 1; q <= Q; ++q) acc[q][p % q] += lp;
        }
    }
    dd_real total;
    for (u64 q = 1; q <= Q; ++q) {
        const dd_real expected = dd_real(Y) / dd_real(double(arith::euler_phi(q)));
        for (u64 a = 0; a < q; ++a) {
            if (std::gcd(a, q) != 1) continue;
            const dd_real e = acc[q][a] - expected;
            total += e * e;
        }
    }
    return total.to_double();
}

struct experiment_row {
    i64 N = 0;
    rational family_average;
    double class_side = 0;          ///< sum over the window of H(D_N(p))/p
    double predicted = 0;           ///< K(N) N/(phi(N) ln N)
    double predicted_envelope = 0;  ///< from the Euler-product tail
    double gap_class = 0;           ///< |family average - class side|
    double gap_predicted = 0;       ///< |family average - predicted|
    double relative_gap = 0;        ///< gap_predicted / predicted
    double error_shape = 0;         ///< 1/sqrt N + sqrt N loglog N (1/A + 1/B) + N^1.5 ln N loglog N/(AB)
};

struct experiment_report {
    curves::family_box box;
    constants::truncation_spec spec;
    bool include_p3 = true;
    double wall_clock_seconds = 0;
    /// max over rows of gap_class / error_shape: a fitted constant, reported only.
    double fitted_constant = 0;
    std::vector<experiment_row> rows;
};

struct experiment_options {
    bool include_p3 = true;
    unsigned threads = 0;
};

inline double error_shape(double N, double A, double B) {
    const double lnN = std::log(N);
    const double ll = std::log(std::max(lnN, 1.0 + 1e-12));
    return 1 / std::sqrt(N) + std::sqrt(N) * ll * (1 / A + 1 / B) + std::pow(N, 1.5) * lnN * ll / (A * B);
}

/// Family average, class-number-side sum and predicted main term for each N.
inline experiment_report run_experiment(std::vector<i64> Ns, const curves::family_box& box,
                                        const constants::truncation_spec& spec, const experiment_options& opt = {}) {
    const auto start = std::chrono::steady_clock::now();
    for (i64 N : Ns) {
        require(N >= 3 && N % 2 != 0, error_kind::precondition, "run_experiment requires odd N >= 3");
    }
    std::sort(Ns.begin(), Ns.end());
    Ns.erase(std::unique(Ns.begin(), Ns.end()), Ns.end());

    experiment_report rep;
    rep.box = box;
    rep.spec = spec;
    rep.include_p3 = opt.include_p3;
    for (i64 N : Ns) {
        experiment_row row;
        row.N = N;
        row.family_average = curves::family_average(static_cast<u64>(N), box, {opt.include_p3, opt.threads});
        row.class_side = classno::class_number_side_sum(static_cast<u64>(N));
        const constants::enveloped pred = constants::predicted_average(N, spec);
        row.predicted = pred.value;
        row.predicted_envelope = pred.envelope;
        const double avg = row.family_average.to_double();
        row.gap_class = std::abs(avg - row.class_side);
        row.gap_predicted = std::abs(avg - row.predicted);
        row.relative_gap = row.gap_predicted / row.predicted;
        row.error_shape = error_shape(double(N), double(box.A), double(box.B));
        rep.fitted_constant = std::max(rep.fitted_constant, row.gap_class / row.error_shape);
        rep.rows.push_back(row);
    }
    rep.wall_clock_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return rep;
}

/// Shortest decimal that round-trips; fixed output for identical inputs.
inline std::string format_real(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

/// RFC-4180 field quoting.
inline std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

inline void write_csv_row(std::ostream& os, const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) os << ',';
        os << csv_field(fields[i]);
    }
    os << "\r\n";
}

/// CSV rows only; wall-clock time is left out so identical runs are byte-identical.
inline void write_csv(std::ostream& os, const experiment_report& rep) {
    write_csv_row(os, {"N", "A", "B", "U", "V", "L", "family_average", "family_average_decimal", "class_side",
                       "predicted", "predicted_envelope", "gap_class", "gap_predicted", "relative_gap"});
    for (const auto& r : rep.rows) {
        write_csv_row(os, {std::to_string(r.N), std::to_string(rep.box.A), std::to_string(rep.box.B),
                           std::to_string(rep.spec.U), std::to_string(rep.spec.V), std::to_string(rep.spec.L),
                           r.family_average.str(), format_real(r.family_average.to_double()), format_real(r.class_side),
                           format_real(r.predicted), format_real(r.predicted_envelope), format_real(r.gap_class),
                           format_real(r.gap_predicted), format_real(r.relative_gap)});
    }
}

inline nlohmann::ordered_json to_json(const experiment_report& rep) {
    nlohmann::ordered_json meta = {
        {"A", rep.box.A},
        {"B", rep.box.B},
        {"U", rep.spec.U},
        {"V", rep.spec.V},
        {"L", rep.spec.L},
        {"log", "natural"},
        {"epsilon", constants::envelope_epsilon},
        {"include_p3", rep.include_p3},
        {"determinism", "seed-free"},
        {"fitted_constant", rep.fitted_constant},
        {"wall_clock_seconds", rep.wall_clock_seconds},
    };
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (const auto& r : rep.rows) {
        rows.push_back({
            {"N", r.N},
            {"family_average", r.family_average.str()},
            {"family_average_decimal", r.family_average.to_double()},
            {"class_side", r.class_side},
            {"predicted", r.predicted},
            {"predicted_envelope", r.predicted_envelope},
            {"gap_class", r.gap_class},
            {"gap_predicted", r.gap_predicted},
            {"relative_gap", r.relative_gap},
        });
    }
    return {{"metadata", meta}, {"rows", rows}};
}

}  // namespace curve_spectrum::expt
