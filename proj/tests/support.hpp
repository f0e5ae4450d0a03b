// Shared test utilities: dense linear-algebra oracles kept independent of
// the library's iterative solvers, reference quadrature, and seeded RNG
// helpers.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <stdexcept>
#include <vector>

#include "insopt/sparse.hpp"

namespace testsupport {

using Dense = std::vector<std::vector<double>>;

inline Dense dense_from_sparse(const insopt::SparseSymMatrix& a) {
  const int n = a.size();
  Dense d(static_cast<std::size_t>(n), std::vector<double>(static_cast<std::size_t>(n), 0.0));
  a.for_each_upper([&](int r, int c, double v) {
    d[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] += v;
    if (r != c) d[static_cast<std::size_t>(c)][static_cast<std::size_t>(r)] += v;
  });
  return d;
}

// Gaussian elimination with partial pivoting.
inline std::vector<double> gauss_solve(Dense a, std::vector<double> b) {
  const std::size_t n = a.size();
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    for (std::size_t i = k + 1; i < n; ++i)
      if (std::abs(a[i][k]) > std::abs(a[piv][k])) piv = i;
    std::swap(a[k], a[piv]);
    std::swap(b[k], b[piv]);
    if (a[k][k] == 0.0) throw std::runtime_error("gauss_solve: singular matrix");
    for (std::size_t i = k + 1; i < n; ++i) {
      const double f = a[i][k] / a[k][k];
      for (std::size_t j = k; j < n; ++j) a[i][j] -= f * a[k][j];
      b[i] -= f * b[k];
    }
  }
  std::vector<double> x(n);
  for (std::size_t i = n; i-- > 0;) {
    double s = b[i];
    for (std::size_t j = i + 1; j < n; ++j) s -= a[i][j] * x[j];
    x[i] = s / a[i][i];
  }
  return x;
}

// All eigenvalues of a symmetric matrix by the cyclic Jacobi method.
inline std::vector<double> jacobi_eigenvalues(Dense c) {
  const std::size_t n = c.size();
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off += c[p][q] * c[p][q];
    if (off < 1e-26) break;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) {
        if (std::abs(c[p][q]) < 1e-300) continue;
        const double theta = (c[q][q] - c[p][p]) / (2.0 * c[p][q]);
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double cs = 1.0 / std::sqrt(t * t + 1.0);
        const double sn = t * cs;
        for (std::size_t i = 0; i < n; ++i) {
          const double cip = c[i][p], ciq = c[i][q];
          c[i][p] = cs * cip - sn * ciq;
          c[i][q] = sn * cip + cs * ciq;
        }
        for (std::size_t i = 0; i < n; ++i) {
          const double cpi = c[p][i], cqi = c[q][i];
          c[p][i] = cs * cpi - sn * cqi;
          c[q][i] = sn * cpi + cs * cqi;
        }
      }
  }
  std::vector<double> ev(n);
  for (std::size_t i = 0; i < n; ++i) ev[i] = c[i][i];
  std::sort(ev.begin(), ev.end());
  return ev;
}

// Generalized eigenvalues of A x = lambda M x via Cholesky of M and Jacobi.
inline std::vector<double> dense_generalized_eigenvalues(const Dense& a, const Dense& m) {
  const std::size_t n = a.size();
  Dense l(n, std::vector<double>(n, 0.0));  // M = L L^T
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j <= i; ++j) {
      double s = m[i][j];
      for (std::size_t k = 0; k < j; ++k) s -= l[i][k] * l[j][k];
      if (i == j) {
        if (s <= 0.0) throw std::runtime_error("dense_generalized_eigenvalues: M not positive definite");
        l[i][i] = std::sqrt(s);
      } else {
        l[i][j] = s / l[j][j];
      }
    }
  // C = L^{-1} A L^{-T}: first Y with L Y = A, then rows of C from L C^T = Y^T
  Dense y = a;
  for (std::size_t col = 0; col < n; ++col)
    for (std::size_t i = 0; i < n; ++i) {
      double s = y[i][col];
      for (std::size_t k = 0; k < i; ++k) s -= l[i][k] * y[k][col];
      y[i][col] = s / l[i][i];
    }
  Dense c(n, std::vector<double>(n, 0.0));
  for (std::size_t row = 0; row < n; ++row)
    for (std::size_t i = 0; i < n; ++i) {
      double s = y[row][i];
      for (std::size_t k = 0; k < i; ++k) s -= l[i][k] * c[row][k];
      c[row][i] = s / l[i][i];
    }
  return jacobi_eigenvalues(c);
}

// 16-point Gauss-Legendre rule mapped to [0, 1]; reference quadrature for
// boundary integrals, independent of the closed forms in the library.
inline double gauss16(const std::function<double(double)>& f) {
  static const double nodes[8] = {0.0950125098376374402, 0.2816035507792589132,
                                  0.4580167776572273863, 0.6178762444026437484,
                                  0.7554044083550030339, 0.8656312023878317439,
                                  0.9445750230732325761, 0.9894009349916499326};
  static const double weights[8] = {0.1894506104550684963, 0.1826034150449235889,
                                    0.1691565193950025382, 0.1495959888165767320,
                                    0.1246289712555338720, 0.0951585116824927848,
                                    0.0622535239386478929, 0.0271524594117540949};
  double s = 0.0;
  for (int i = 0; i < 8; ++i) {
    s += weights[i] * f(0.5 * (1.0 + nodes[i]));
    s += weights[i] * f(0.5 * (1.0 - nodes[i]));
  }
  return 0.5 * s;
}

// Composite reference quadrature with many panels for rational integrands.
inline double gauss16_composite(const std::function<double(double)>& f, int panels = 64) {
  double s = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double a = static_cast<double>(p) / panels;
    const double w = 1.0 / panels;
    s += w * gauss16([&](double t) { return f(a + w * t); });
  }
  return s;
}

inline std::mt19937_64 rng(std::uint64_t seed) { return std::mt19937_64(seed); }

inline double uniform(std::mt19937_64& g, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(g);
}

// Independent ascending-series evaluation of J0 in long double with a
// generous term cap; cross-checks the library's Bessel oracle.
inline double series_j0_reference(double x) {
  const long double q = 0.25L * static_cast<long double>(x) * static_cast<long double>(x);
  long double term = 1.0L, sum = 1.0L;
  for (long k = 1; k < 100000; ++k) {
    term *= -q / (static_cast<long double>(k) * static_cast<long double>(k));
    sum += term;
    if (std::abs(term) < 1e-30L) break;
  }
  return static_cast<double>(sum);
}

}  // namespace testsupport
