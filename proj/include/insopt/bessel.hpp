// Bessel functions J0, J1 on [0, 50] and the bracketed root finding the
// disk oracles are built on. Ascending series below x = 12, Miller's
// backward recurrence beyond; long double accumulation keeps the
// alternating-series cancellation under 1e-12 absolute.
#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

namespace insopt {

namespace detail {

inline long double bessel_series(int n, long double x) {
  const long double q = 0.25L * x * x;
  long double term = 1.0L;
  if (n == 1) term = 0.5L * x;
  long double sum = term;
  for (int k = 1; k < 200; ++k) {
    term *= -q / (static_cast<long double>(k) * (k + n));
    sum += term;
    if (std::abs(term) < 1e-24L * (1.0L + std::abs(sum))) break;
  }
  return sum;
}

inline void bessel_backward(long double x, long double& j0, long double& j1) {
  // start high enough that J_start(x) ~ (ex/2k)^k is below 1e-20
  const int start = static_cast<int>(1.5 * x) + 40;
  long double jp = 0.0L, jc = 1e-30L, norm = 0.0L;
  long double r0 = 0.0L, r1 = 0.0L;
  for (int k = start; k >= 1; --k) {
    const long double jm = (2.0L * k / x) * jc - jp;
    jp = jc;
    jc = jm;
    if (k - 1 == 0) r0 = jc;
    if (k - 1 == 1) r1 = jc;
    if ((k - 1) % 2 == 0 && k - 1 > 0) norm += 2.0L * jc;
    if (std::abs(jc) > 1e20L) {  // rescale to avoid overflow
      jp /= 1e20L;
      jc /= 1e20L;
      norm /= 1e20L;
      r0 /= 1e20L;
      r1 /= 1e20L;
    }
  }
  norm += r0;  // J0 + 2*(J2 + J4 + ...) = 1
  j0 = r0 / norm;
  j1 = r1 / norm;
}

}  // namespace detail

// J_n(x) for n in {0, 1}, 0 <= x <= 50, absolute error <= 1e-12.
inline double bessel_j(int n, double x) {
  if (n != 0 && n != 1) throw std::invalid_argument("bessel_j: order must be 0 or 1");
  if (!(x >= 0.0) || x > 50.0) throw std::invalid_argument("bessel_j: x out of range [0, 50]");
  if (x <= 12.0) return static_cast<double>(detail::bessel_series(n, static_cast<long double>(x)));
  long double j0 = 0.0L, j1 = 0.0L;
  detail::bessel_backward(static_cast<long double>(x), j0, j1);
  return static_cast<double>(n == 0 ? j0 : j1);
}

inline double bessel_j0(double x) { return bessel_j(0, x); }
inline double bessel_j1(double x) { return bessel_j(1, x); }

// J1'(x) = J0(x) - J1(x)/x, with the x -> 0 limit 1/2.
inline double bessel_j1_prime(double x) {
  if (x == 0.0) return 0.5;
  return bessel_j0(x) - bessel_j1(x) / x;
}

// Bisection for a bracketed root; f(lo) and f(hi) must differ in sign.
inline double bisect(const std::function<double(double)>& f, double lo, double hi,
                     double xtol = 1e-15) {
  double flo = f(lo);
  double fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo > 0.0) == (fhi > 0.0)) throw std::invalid_argument("bisect: endpoints do not bracket a root");
  for (int it = 0; it < 200 && hi - lo > xtol * (1.0 + std::abs(lo)); ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((fm > 0.0) == (flo > 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
      fhi = fm;
    }
  }
  return 0.5 * (lo + hi);
}

// First zero of J0 (j_{0,1} = 2.404825...).
inline double bessel_j0_first_zero() {
  return bisect([](double x) { return bessel_j0(x); }, 2.0, 3.0);
}

// First positive zero of J1' (p'_{1,1} = 1.841183...).
inline double bessel_j1_prime_first_zero() {
  return bisect([](double x) { return bessel_j1_prime(x); }, 1.5, 2.5);
}

}  // namespace insopt
