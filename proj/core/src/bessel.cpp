#include "selforg/bessel.hpp"

#include <cmath>
#include <limits>

#include "selforg/errors.hpp"

namespace selforg {

double bessel_ratio_over_x(double x) {
  const double x2 = x * x;
  if (x2 == 0.0) return 0.5;
  // Modified Lentz evaluation of b0 + a1/(b1 + a2/(b2 + ...)) with b_j = 2(j+1), a_j = x^2.
  constexpr double tiny = 1e-300;
  double f = 2.0;
  double c = f;
  double d = 0.0;
  for (int j = 1; j < 100000; ++j) {
    const double b = 2.0 * (j + 1);
    d = b + x2 * d;
    if (d == 0.0) d = tiny;
    c = b + x2 / c;
    if (c == 0.0) c = tiny;
    d = 1.0 / d;
    const double delta = c * d;
    f *= delta;
    if (std::abs(delta - 1.0) < 4.0 * std::numeric_limits<double>::epsilon()) return 1.0 / f;
  }
  throw NonConvergence("Bessel ratio continued fraction did not converge");
}

double bessel_ratio(double x) { return x * bessel_ratio_over_x(x); }

}  // namespace selforg
