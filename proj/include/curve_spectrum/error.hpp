#pragma once

#include <stdexcept>
#include <string>

namespace curve_spectrum {

/// Failure categories raised by the library. The CLI maps every kind to the
/// precondition exit code; usage errors never reach this type.
enum class error_kind {
    precondition,
    range_too_large,
    overflow,
    bad_reduction,
    small_prime,
    singular_pair,
    invalid_discriminant,
    nondivisible,
    not_dividing,
    unsupported_parity,
    non_coprime_residue,
    io,
};

inline const char* to_string(error_kind k) {
    switch (k) {
        case error_kind::precondition: return "precondition";
        case error_kind::range_too_large: return "range-too-large";
        case error_kind::overflow: return "overflow";
        case error_kind::bad_reduction: return "bad-reduction";
        case error_kind::small_prime: return "small-prime";
        case error_kind::singular_pair: return "singular-pair";
        case error_kind::invalid_discriminant: return "invalid-discriminant";
        case error_kind::nondivisible: return "nondivisible";
        case error_kind::not_dividing: return "not-dividing";
        case error_kind::unsupported_parity: return "unsupported-parity";
        case error_kind::non_coprime_residue: return "non-coprime-residue";
        case error_kind::io: return "io";
    }
    return "unknown";
}

class error : public std::runtime_error {
public:
    error(error_kind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

    error_kind kind() const noexcept { return kind_; }

private:
    error_kind kind_;
};

[[noreturn]] inline void fail(error_kind kind, const std::string& what) { throw error(kind, what); }

inline void require(bool cond, error_kind kind, const std::string& what) {
    if (!cond) fail(kind, what);
}

}  // namespace curve_spectrum
