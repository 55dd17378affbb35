#pragma once

#include <gtest/gtest.h>

#include "curve_spectrum/error.hpp"

/// Runs `fn` and returns the kind of the library error it throws.
template <typename Fn>
curve_spectrum::error_kind kind_of(Fn&& fn) {
    try {
        fn();
    } catch (const curve_spectrum::error& e) {
        return e.kind();
    }
    ADD_FAILURE() << "expected a library error";
    return curve_spectrum::error_kind::io;
}
