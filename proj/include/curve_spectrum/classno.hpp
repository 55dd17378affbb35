#pragma once

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <numbers>
#include <optional>
#include <shared_mutex>
#include <sstream>
#include <string>
#include <vector>

#include "curve_spectrum/arith.hpp"
#include "curve_spectrum/curves.hpp"
#include "curve_spectrum/ddreal.hpp"
#include "curve_spectrum/error.hpp"
#include "curve_spectrum/rational.hpp"

/// Imaginary quadratic class numbers, Kronecker class numbers H(D) and the
/// Deuring mass identity.
namespace curve_spectrum::classno {

using arith::i64;
using arith::u64;

struct class_data {
    i64 d = 0;
    i64 h = 0;
    int w = 2;
    friend bool operator==(const class_data&, const class_data&) = default;
};

struct kronecker_class_number_t {
    i64 D = 0;
    rational value;
};

inline bool is_negative_discriminant(i64 d) {
    if (d >= 0) return false;
    const i64 r = arith::mod(d, 4);
    return r == 0 || r == 1;
}

inline void require_discriminant(i64 d) {
    require(is_negative_discriminant(d), error_kind::invalid_discriminant,
            "d = " + std::to_string(d) + " is not a negative discriminant");
}

inline int unit_count(i64 d) { return d == -3 ? 6 : d == -4 ? 4 : 2; }

/// Counts primitive reduced forms (A, B, C) with B^2 - 4AC = d.
inline class_data class_number(i64 d) {
    require_discriminant(d);
    const i64 absd = -d;
    i64 h = 0;
    for (i64 a = 1; 3 * a * a <= absd; ++a) {
        for (i64 b = -a + 1; b <= a; ++b) {
            const i64 num = b * b - d;
            if (num % (4 * a) != 0) continue;
            const i64 c = num / (4 * a);
            if (c < a) continue;
            if (a == c && b < 0) continue;
            if (std::gcd(std::gcd(a, std::abs(b)), c) != 1) continue;
            ++h;
        }
    }
    return {d, h, unit_count(d)};
}

/// Process-wide memo of (h, w) with optional CSV persistence (header `d,h,w`,
/// d strictly decreasing). Writers race benignly: every writer stores the same value.
class class_number_cache {
public:
    class_data get(i64 d) {
        {
            std::shared_lock lock(mutex_);
            if (auto it = table_.find(d); it != table_.end()) return it->second;
        }
        const class_data cd = class_number(d);
        std::unique_lock lock(mutex_);
        table_[d] = cd;
        dirty_ = true;
        return cd;
    }

    std::size_t size() const {
        std::shared_lock lock(mutex_);
        return table_.size();
    }
    bool dirty() const {
        std::shared_lock lock(mutex_);
        return dirty_;
    }

    /// Loads rows from `path` if it exists. Malformed files raise an io error.
    void load(const std::filesystem::path& path) {
        std::ifstream in(path);
        if (!in) return;
        std::string line;
        if (!std::getline(in, line) || line != "d,h,w") fail(error_kind::io, "cache header mismatch in " + path.string());
        std::map<i64, class_data, std::greater<>> rows;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            std::istringstream ss(line);
            i64 d = 0, h = 0;
            int w = 0;
            char c1 = 0, c2 = 0;
            if (!(ss >> d >> c1 >> h >> c2 >> w) || c1 != ',' || c2 != ',')
                fail(error_kind::io, "malformed cache row: " + line);
            if (!is_negative_discriminant(d)) fail(error_kind::io, "cache row with invalid discriminant: " + line);
            rows[d] = {d, h, w};
        }
        std::unique_lock lock(mutex_);
        for (auto& [d, cd] : rows) table_.emplace(d, cd);
    }

    /// Writes the table to a sibling temporary and renames it over `path`.
    void save(const std::filesystem::path& path) const {
        std::shared_lock lock(mutex_);
        if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
        const std::filesystem::path tmp = path.string() + ".tmp";
        {
            std::ofstream out(tmp, std::ios::trunc);
            if (!out) fail(error_kind::io, "cannot write " + tmp.string());
            out << "d,h,w\n";
            for (const auto& [d, cd] : table_) out << cd.d << ',' << cd.h << ',' << cd.w << '\n';
            if (!out) fail(error_kind::io, "write failed for " + tmp.string());
        }
        std::filesystem::rename(tmp, path);
    }

private:
    mutable std::shared_mutex mutex_;
    std::map<i64, class_data, std::greater<>> table_;
    bool dirty_ = false;
};

inline class_number_cache& default_cache() {
    static class_number_cache cache;
    return cache;
}

/// H(D) = sum over f with f^2 | D and D/f^2 = 0, 1 (mod 4) of h(D/f^2)/w(D/f^2).
inline kronecker_class_number_t kronecker_class_number(i64 D, class_number_cache& cache = default_cache()) {
    require_discriminant(D);
    rational sum(0);
    for (i64 f = 1; f * f <= -D; ++f) {
        if (D % (f * f) != 0) continue;
        const i64 d = D / (f * f);
        if (!is_negative_discriminant(d)) continue;
        const class_data cd = cache.get(d);
        sum += rational(cd.h, cd.w);
    }
    return {D, sum};
}

struct truncated_value {
    double value = 0;
    double uncertainty = 0;
};

/// sum_{n <= U} chi_d(n)/n with an Abel-summation tail bound 2M/(U+1), where M is the
/// largest partial character sum over one period.
inline truncated_value l_one_truncated(i64 d, u64 U) {
    require_discriminant(d);
    require(U >= 1, error_kind::precondition, "U must be positive");
    const u64 period = static_cast<u64>(-d);
    std::vector<signed char> chi(period);
    i64 partial = 0, max_partial = 0;
    for (u64 n = 0; n < period; ++n) {
        chi[n] = static_cast<signed char>(arith::kronecker(d, n));
    }
    for (u64 n = 1; n <= period; ++n) {
        partial += chi[n % period];
        max_partial = std::max(max_partial, std::abs(partial));
    }
    dd_real sum;
    for (u64 n = 1; n <= U; ++n) {
        const int c = chi[n % period];
        if (c) sum += dd_real(double(c)) / dd_real(double(n));
    }
    const double tail = 2.0 * double(max_partial) / double(U + 1);
    // double-double accumulation error is far below this; keep a floor for the final rounding.
    const double rounding = 1e-15 * (1.0 + std::log(double(U)));
    return {sum.to_double(), tail + rounding};
}

struct formula_residual {
    double residual = 0;
    double envelope = 0;
    bool within() const { return residual <= envelope; }
};

/// |h/w - sqrt|d|/(2 pi) L_U(1, chi_d)| against the propagated truncation bound.
inline formula_residual class_number_formula_check(i64 d, u64 U, class_number_cache& cache = default_cache()) {
    const class_data cd = cache.get(d);
    const truncated_value L = l_one_truncated(d, U);
    const double scale = std::sqrt(double(-d)) / (2 * std::numbers::pi);
    const double hw = double(cd.h) / double(cd.w);
    return {std::abs(hw - scale * L.value), scale * L.uncertainty + 1e-14 * (1 + hw)};
}

/// Number of nonsingular residue pairs (s, t) mod p for every trace t, indexed by t + floor(2 sqrt p).
class trace_histogram {
public:
    explicit trace_histogram(u64 p) : p_(p) {
        require(p > 3 && arith::is_prime(p), error_kind::precondition, "trace histogram requires a prime p > 3");
        offset_ = static_cast<i64>(arith::isqrt(4 * p));
        counts_.assign(2 * offset_ + 1, 0);
        const curves::residue_symbols chi(p);
        std::vector<u64> cubic(p);
        for (u64 s = 0; s < p; ++s) {
            for (u64 x = 0; x < p; ++x) cubic[x] = (x * x % p * x + s * x) % p;
            for (u64 t = 0; t < p; ++t) {
                if (curves::singular_mod(static_cast<i64>(s), static_cast<i64>(t), p)) continue;
                i64 sum = 0;
                for (u64 x = 0; x < p; ++x) {
                    u64 v = cubic[x] + t;
                    if (v >= p) v -= p;
                    sum += chi[v];
                }
                ++counts_[static_cast<std::size_t>(-sum + offset_)];  // trace = -sum
            }
        }
    }

    u64 prime() const { return p_; }
    i64 max_trace() const { return offset_; }
    u64 pairs_with_trace(i64 t) const {
        if (t < -offset_ || t > offset_) return 0;
        return counts_[static_cast<std::size_t>(t + offset_)];
    }
    /// sum over isomorphism classes with trace t of 1/#Aut = pairs / (p - 1).
    rational mass(i64 t) const { return rational(i128(pairs_with_trace(t)), i128(p_ - 1)); }

private:
    u64 p_;
    i64 offset_ = 0;
    std::vector<u64> counts_;
};

/// Deuring mass at (p, t): #{nonsingular (s,t') with trace t} / (p - 1).
inline rational deuring_mass(u64 p, i64 t) {
    require(i128(t) * t < 4 * i128(p), error_kind::precondition, "deuring_mass requires t^2 < 4p");
    return trace_histogram(p).mass(t);
}

struct deuring_row {
    i64 t = 0;
    rational mass;
    rational h;  ///< H(t^2 - 4p)
    bool match() const { return mass == h; }
};

/// Full sweep |t| < 2 sqrt p comparing the Deuring mass to H(t^2 - 4p).
inline std::vector<deuring_row> deuring_table(u64 p, class_number_cache& cache = default_cache()) {
    const trace_histogram hist(p);
    std::vector<deuring_row> rows;
    for (i64 t = -hist.max_trace(); t <= hist.max_trace(); ++t) {
        const i64 D = t * t - 4 * static_cast<i64>(p);
        if (D >= 0) continue;
        rows.push_back({t, hist.mass(t), kronecker_class_number(D, cache).value});
    }
    return rows;
}

/// sum over window primes of H(D_N(p))/p; exact inner terms, double-double accumulation.
inline double class_number_side_sum(u64 N, class_number_cache& cache = default_cache()) {
    require(N >= 8, error_kind::precondition, "class_number_side_sum requires N >= 8");
    dd_real sum;
    const curves::hasse_window window(N);
    for (u64 p : window.prime_list()) {
        const i64 D = static_cast<i64>(curves::window_discriminant(N, p));
        sum += to_dd(kronecker_class_number(D, cache).value) / dd_real(double(p));
    }
    return sum.to_double();
}

}  // namespace curve_spectrum::classno
