#pragma once

#include "fracspec/numeric/double_double.hpp"

namespace fracspec::numeric {

/// sin(pi x), exactly zero at integers.
double sinpi(double x);

/// Euler gamma function (Lanczos approximation, reflection for x < 0.5).
/// Returns +-inf at the poles x = 0, -1, -2, ...
double gamma(double x);

/// 1 / Gamma(x); exactly zero at non-positive integers and finite everywhere.
double rgamma(double x);

/// ln |Gamma(x)|; +inf at the poles.
double log_abs_gamma(double x);

/// ln Gamma(x) in double-double for x > 0 (shifted Stirling series).
DoubleDouble log_gamma(const DoubleDouble& x);

}  // namespace fracspec::numeric
