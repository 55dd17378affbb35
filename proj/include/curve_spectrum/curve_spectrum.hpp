#pragma once

#include "curve_spectrum/arith.hpp"
#include "curve_spectrum/classno.hpp"
#include "curve_spectrum/constants.hpp"
#include "curve_spectrum/curves.hpp"
#include "curve_spectrum/error.hpp"
#include "curve_spectrum/expt.hpp"
#include "curve_spectrum/localcounts.hpp"
#include "curve_spectrum/rational.hpp"
