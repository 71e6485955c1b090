#include "fracspec/numeric/double_double.hpp"

#include <limits>

namespace fracspec::numeric {

DoubleDouble exp(const DoubleDouble& x) {
  if (x.hi > 709.782712893384) return {std::numeric_limits<double>::infinity(), 0.0};
  if (x.hi < -745.2) return {0.0, 0.0};
  if (x.hi == 0.0) return {1.0, 0.0};

  // x = m ln2 + r, then e^r = (e^{r/1024})^1024 evaluated on expm1 to keep
  // the small quantity accurate through the squarings.
  const double m = std::nearbyint(x.hi / dd_const::ln2.hi);
  DoubleDouble r = x - dd_const::ln2 * m;
  r = ldexp(r, -10);

  DoubleDouble p = r;
  DoubleDouble term = r;
  for (int k = 2; k < 30; ++k) {
    term = term * r / static_cast<double>(k);
    p += term;
    if (std::fabs(term.hi) < 1e-36 * std::fabs(p.hi)) break;
  }
  for (int i = 0; i < 10; ++i) p = p * (p + 2.0);

  DoubleDouble result = p + 1.0;
  // Split the scaling so 2^m never overflows on its own near the range ends.
  const int mi = static_cast<int>(m);
  const int half = mi / 2;
  result = ldexp(ldexp(result, half), mi - half);
  return result;
}

DoubleDouble log(const DoubleDouble& x) {
  if (!(x.hi > 0.0)) return {std::numeric_limits<double>::quiet_NaN(), 0.0};
  if (x.hi == 1.0 && x.lo == 0.0) return {0.0, 0.0};
  DoubleDouble y = std::log(x.hi);
  // One Newton step on exp(y) = x doubles the number of correct digits.
  y = y + x * exp(-y) - 1.0;
  return y;
}

DoubleDouble reduce_two_pi(const DoubleDouble& x) {
  const double q = std::nearbyint(x.hi / dd_const::two_pi.hi);
  DoubleDouble r = x - dd_const::two_pi * q;
  if (r > dd_const::pi) r -= dd_const::two_pi;
  if (!(r > -dd_const::pi)) r += dd_const::two_pi;
  return r;
}

}  // namespace fracspec::numeric
