// Conjugate gradients and inverse power iteration for the generalized
// symmetric problem A u = lambda M u. Only the extremal eigenpair is
// needed, with a certified residual: the returned Rayleigh quotient sits
// within O(residual^2 / gap) of the true minimum, which keeps warm-started
// solves from reporting values above the quotient of their start vector
// beyond roundoff (the alternating minimization relies on this).
#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "insopt/sparse.hpp"

namespace insopt {

struct SolveError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CgResult {
  int iterations = 0;
  double rel_residual = 0.0;
};

using LinOp = std::function<void(std::span<const double>, std::span<double>)>;

// Preconditioned CG with Jacobi scaling; x holds the initial guess.
inline CgResult cg_solve(const LinOp& apply_a, std::span<const double> inv_diag,
                         std::span<const double> b, std::vector<double>& x, double tol,
                         int max_iter = 10000) {
  const std::size_t n = b.size();
  if (x.size() != n) x.assign(n, 0.0);
  std::vector<double> r(n), z(n), p(n), q(n);
  apply_a(x, q);
  for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - q[i];
  const double bnorm = norm2(b);
  if (bnorm == 0.0) {
    x.assign(n, 0.0);
    return {0, 0.0};
  }
  for (std::size_t i = 0; i < n; ++i) z[i] = r[i] * inv_diag[i];
  p = z;
  double rz = dot(r, z);
  double rn = norm2(r);
  int it = 0;
  while (rn > tol * bnorm && it < max_iter) {
    ++it;
    apply_a(p, q);
    const double pq = dot(p, q);
    if (!(pq > 0.0)) throw SolveError("cg_solve: operator not positive definite");
    const double alpha = rz / pq;
    axpy(alpha, p, x);
    axpy(-alpha, q, r);
    for (std::size_t i = 0; i < n; ++i) z[i] = r[i] * inv_diag[i];
    const double rz_new = dot(r, z);
    const double beta = rz_new / rz;
    rz = rz_new;
    for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
    rn = norm2(r);
  }
  if (rn > tol * bnorm) {
    std::ostringstream msg;
    msg << "cg_solve: no convergence after " << it << " iterations, achieved relative residual "
        << rn / bnorm << " (target " << tol << ")";
    throw SolveError(msg.str());
  }
  return {it, rn / bnorm};
}

inline std::vector<double> make_inv_diag(const SparseSymMatrix& a) {
  std::vector<double> d = a.diagonal();
  for (auto& v : d) v = (v > 0.0) ? 1.0 / v : 1.0;
  return d;
}

// Solves A x = b for symmetric positive definite A.
inline std::vector<double> solve_spd(const SparseSymMatrix& a, std::span<const double> b, double tol,
                                     int max_iter = 10000) {
  std::vector<double> x;
  const std::vector<double> inv_diag = make_inv_diag(a);
  cg_solve([&](std::span<const double> in, std::span<double> out) { a.apply(in, out); }, inv_diag, b,
           x, tol, max_iter);
  return x;
}

struct EigenPair {
  double lambda = 0.0;
  std::vector<double> u;       // normalized to u' M u = 1, sign fixed by 1' M u >= 0
  double residual = 0.0;       // ||A u - lambda M u|| / ||A u||
  int iterations = 0;
  bool near_degenerate = false;  // observed convergence factor suggests gap < 1e-6
};

namespace detail {

inline void m_normalize(const SparseSymMatrix& m, std::vector<double>& x) {
  const double q = m.quad(x);
  if (!(q > 0.0)) throw SolveError("eigensolve: iterate vanished in the M norm");
  scale(1.0 / std::sqrt(q), x);
}

inline void fix_sign(const SparseSymMatrix& m, std::vector<double>& u) {
  std::vector<double> mu(u.size());
  m.apply(u, mu);
  double s = 0.0;
  for (double v : mu) s += v;
  if (s < 0.0) {
    scale(-1.0, u);
    return;
  }
  if (s == 0.0) {  // mean-zero modes: first nonzero entry decides
    for (double v : u) {
      if (v > 0.0) return;
      if (v < 0.0) {
        scale(-1.0, u);
        return;
      }
    }
  }
}

inline double certified_residual(const LinOp& apply_a, const SparseSymMatrix& m, double lambda,
                                 std::span<const double> u) {
  std::vector<double> au(u.size()), mu(u.size());
  apply_a(u, au);
  m.apply(u, mu);
  const double an = norm2(au);
  double rn = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double d = au[i] - lambda * mu[i];
    rn += d * d;
  }
  rn = std::sqrt(rn);
  return an > 0.0 ? rn / an : rn;
}

struct PowerOptions {
  double tol = 1e-9;
  int max_outer = 500;
  int cg_max_iter = 10000;
  // applied after every inverse step, e.g. deflation against constants
  std::function<void(std::vector<double>&)> project;
};

// Inverse power iteration on (A, M) with optional projection. Returns the
// extremal pair with a certified residual; the Rayleigh quotient of the
// returned vector never exceeds the quotient of the start vector.
inline EigenPair inverse_power(const LinOp& apply_a, std::span<const double> inv_diag,
                               const SparseSymMatrix& m, std::vector<double> x,
                               const PowerOptions& opt) {
  const std::size_t n = x.size();
  if (opt.project) opt.project(x);
  m_normalize(m, x);
  auto quad_a = [&](std::span<const double> v) {
    std::vector<double> av(n);
    apply_a(v, av);
    return dot(v, av);
  };
  double rho = quad_a(x);  // x is M-normalized
  double res = certified_residual(apply_a, m, rho, x);
  std::vector<double> mx(n), z;
  std::vector<double> res_history{res};
  const double cg_tol = std::min(1e-13, 0.01 * opt.tol);
  int it = 0;
  int stalled = 0;
  bool near_degenerate = false;
  while (res > opt.tol && it < opt.max_outer) {
    ++it;
    m.apply(x, mx);
    z = x;  // warm start: x is already close to the solution direction
    cg_solve(apply_a, inv_diag, mx, z, cg_tol, opt.cg_max_iter);
    if (opt.project) opt.project(z);
    m_normalize(m, z);
    const double rho_new = quad_a(z);
    const double res_new = certified_residual(apply_a, m, rho_new, z);
    // a persistent contraction factor near 1 means the gap is tiny
    if (it >= 3 && res > 0.0 && res_new > res * (1.0 - 1e-6)) near_degenerate = true;
    stalled = (res > 0.0 && res_new >= 0.999 * res) ? stalled + 1 : 0;
    x = z;
    rho = rho_new;
    res = res_new;
    res_history.push_back(res);
    if (stalled >= 10) break;  // stuck at solver precision
  }
  if (res > opt.tol) {
    std::ostringstream msg;
    msg << "inverse_power: no convergence after " << it << " iterations; residual history:";
    for (double r : res_history) msg << ' ' << r;
    throw SolveError(msg.str());
  }
  EigenPair ep;
  ep.lambda = rho;
  ep.u = std::move(x);
  ep.residual = res;
  ep.iterations = it;
  ep.near_degenerate = near_degenerate;
  return ep;
}

inline std::vector<double> default_start(std::size_t n) {
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = 1.0 + 1e-3 * std::sin(0.7 * static_cast<double>(i) + 0.3);
  return x;
}

}  // namespace detail

// Smallest eigenpair of A u = lambda M u, A symmetric positive
// semidefinite with A + M positive definite, M positive definite.
inline EigenPair smallest_eigenpair(const SparseSymMatrix& a, const SparseSymMatrix& m,
                                    double tol = 1e-9, const std::vector<double>* warm_start = nullptr) {
  if (a.size() != m.size()) throw std::invalid_argument("smallest_eigenpair: dimension mismatch");
  const std::size_t n = static_cast<std::size_t>(a.size());
  const LinOp apply_a = [&](std::span<const double> in, std::span<double> out) { a.apply(in, out); };

  // Fast path: constants are the exact ground state of the pure Neumann
  // operator. ||Au|| vanishes there, so certify against the matrix scale.
  {
    std::vector<double> ones(n, 1.0);
    const double mm = m.quad(ones);
    const double rho = a.quad(ones) / mm;
    std::vector<double> u = ones;
    scale(1.0 / std::sqrt(mm), u);
    std::vector<double> au(n), mu(n);
    a.apply(u, au);
    m.apply(u, mu);
    double rn = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double d = au[i] - rho * mu[i];
      rn += d * d;
    }
    rn = std::sqrt(rn);
    double diag_a = 0.0, diag_m = 0.0;
    for (double v : a.diagonal()) diag_a = std::max(diag_a, std::abs(v));
    for (double v : m.diagonal()) diag_m = std::max(diag_m, std::abs(v));
    const double matrix_scale = (diag_a + std::abs(rho) * diag_m) * norm2(u);
    if (matrix_scale > 0.0 && rn <= tol * matrix_scale) {
      detail::fix_sign(m, u);
      return {rho, std::move(u), rn / matrix_scale, 0, false};
    }
  }

  detail::PowerOptions opt;
  opt.tol = tol;
  std::vector<double> x0 = warm_start && warm_start->size() == n ? *warm_start : detail::default_start(n);
  EigenPair ep = detail::inverse_power(apply_a, make_inv_diag(a), m, std::move(x0), opt);
  detail::fix_sign(m, ep.u);
  return ep;
}

// First nontrivial Neumann eigenpair: smallest lambda of K u = lambda M u
// under 1' M u = 0, for K with kernel = constants. The constant mode is
// moved to a large penalty eigenvalue sigma, which keeps the shifted
// operator definite without touching the mean-zero spectrum.
inline EigenPair neumann_nontrivial_eigenpair(const SparseSymMatrix& k, const SparseSymMatrix& m,
                                              double tol = 1e-9) {
  if (k.size() != m.size()) throw std::invalid_argument("neumann_nontrivial_eigenpair: dimension mismatch");
  const std::size_t n = static_cast<std::size_t>(k.size());
  std::vector<double> ones(n, 1.0);
  std::vector<double> m1(n);
  m.apply(ones, m1);
  const double m11 = dot(ones, m1);

  double trace_k = 0.0, trace_m = 0.0;
  k.for_each_upper([&](int r, int c, double v) { if (r == c) trace_k += v; });
  m.for_each_upper([&](int r, int c, double v) { if (r == c) trace_m += v; });
  const double sigma = trace_k / trace_m;  // far above the low spectrum

  const LinOp apply_shifted = [&](std::span<const double> in, std::span<double> out) {
    k.apply(in, out);
    const double c = sigma * dot(m1, in) / m11;
    for (std::size_t i = 0; i < n; ++i) out[i] += c * m1[i];
  };
  auto project = [&](std::vector<double>& x) {
    const double c = dot(m1, x) / m11;
    for (std::size_t i = 0; i < n; ++i) x[i] -= c;
  };

  detail::PowerOptions opt;
  opt.tol = tol;
  opt.project = project;
  std::vector<double> x0(n);
  for (std::size_t i = 0; i < n; ++i) x0[i] = std::sin(1.3 * static_cast<double>(i) + 0.2);
  EigenPair ep =
      detail::inverse_power(apply_shifted, make_inv_diag(k), m, std::move(x0), opt);
  // certify against the original K: the penalty vanishes on mean-zero u
  ep.residual = detail::certified_residual(
      [&](std::span<const double> in, std::span<double> out) { k.apply(in, out); }, m, ep.lambda, ep.u);
  if (ep.residual > tol) throw SolveError("neumann_nontrivial_eigenpair: residual certification failed");
  detail::fix_sign(m, ep.u);
  return ep;
}

}  // namespace insopt
