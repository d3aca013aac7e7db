#pragma once

namespace selforg {

/// I_1(x) / (x I_0(x)) from the continued fraction
///   1 / (2 + x^2 / (4 + x^2 / (6 + ...))).
/// Even in x, equal to 1/2 at the origin, free of cancellation for all x.
double bessel_ratio_over_x(double x);

/// I_1(x) / I_0(x), odd in x.
double bessel_ratio(double x);

}  // namespace selforg
