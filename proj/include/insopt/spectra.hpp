// Reference eigenvalues of the disk via Bessel dispersion relations and of
// arbitrary meshes via FEM, plus the two thresholds of the symmetry
// dichotomy: beta* (where the Robin eigenvalue crosses the first
// nontrivial Neumann one) and the critical mass m_bar(beta) (where
// lambda_m crosses it).
#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "insopt/bessel.hpp"
#include "insopt/eigensolve.hpp"
#include "insopt/fem.hpp"
#include "insopt/insulation.hpp"
#include "insopt/mesh.hpp"

namespace insopt {

struct NoThreshold : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DispersionRoot {
  double k = 0.0;       // radial wavenumber
  double lambda = 0.0;  // k^2
  std::string relation;
  double residual = 0.0;  // dispersion residual at k, scaled by max(1, beta)
};

// lambda^D of the disk: k = j_{0,1} / radius.
inline DispersionRoot disk_dirichlet_oracle(double radius) {
  if (!(radius > 0.0)) throw std::invalid_argument("disk_dirichlet_oracle: radius must be positive");
  DispersionRoot r;
  r.k = bessel_j0_first_zero() / radius;
  r.lambda = r.k * r.k;
  r.relation = "J0(k r) = 0";
  r.residual = std::abs(bessel_j0(r.k * radius));
  return r;
}

// lambda^N of the disk: k = p'_{1,1} / radius (first maximum of J1).
inline DispersionRoot disk_neumann_oracle(double radius) {
  if (!(radius > 0.0)) throw std::invalid_argument("disk_neumann_oracle: radius must be positive");
  DispersionRoot r;
  r.k = bessel_j1_prime_first_zero() / radius;
  r.lambda = r.k * r.k;
  r.relation = "J1'(k r) = 0";
  r.residual = std::abs(bessel_j1_prime(r.k * radius));
  return r;
}

// lambda^R(beta) of the disk: smallest k > 0 with k J1(k r) = beta J0(k r)
// (radial eigenfunction J0(k r)). Increasing in beta, 0 at beta = 0,
// approaches lambda^D as beta -> infinity.
inline DispersionRoot disk_robin_oracle(double beta, double radius = 1.0) {
  if (!(radius > 0.0)) throw std::invalid_argument("disk_robin_oracle: radius must be positive");
  if (beta < 0.0) throw std::invalid_argument("disk_robin_oracle: beta must be nonnegative");
  DispersionRoot r;
  r.relation = "k J1(k r) = beta J0(k r)";
  if (beta == 0.0) return r;  // Neumann ground state
  const double hi = bessel_j0_first_zero() / radius;
  auto f = [&](double k) { return k * bessel_j1(k * radius) - beta * bessel_j0(k * radius); };
  r.k = bisect(f, 1e-12 * hi, hi, 1e-16);
  r.lambda = r.k * r.k;
  r.residual = std::abs(f(r.k)) / std::max(1.0, beta);
  return r;
}

// beta* of the disk: lambda^R(beta*) = lambda^N, i.e. the Robin dispersion
// evaluated at k = p'_{1,1}/radius.
inline double beta_star_disk(double radius = 1.0) {
  const double kn = bessel_j1_prime_first_zero() / radius;
  return kn * bessel_j1(kn * radius) / bessel_j0(kn * radius);
}

// --- FEM reference paths -------------------------------------------------

inline double fem_dirichlet_lambda(const TriMesh& mesh, double tol = 1e-9) {
  const SparseSymMatrix k = assemble_stiffness(mesh);
  const SparseSymMatrix m = assemble_mass(mesh);
  std::vector<char> is_boundary(static_cast<std::size_t>(mesh.n_vertices()), 0);
  for (int v : mesh.boundary_vertices) is_boundary[static_cast<std::size_t>(v)] = 1;
  std::vector<int> interior;
  for (int v = 0; v < mesh.n_vertices(); ++v)
    if (!is_boundary[static_cast<std::size_t>(v)]) interior.push_back(v);
  if (interior.empty()) throw std::invalid_argument("fem_dirichlet_lambda: mesh has no interior vertex");
  return smallest_eigenpair(k.restrict_to(interior), m.restrict_to(interior), tol).lambda;
}

inline double fem_neumann_lambda(const TriMesh& mesh, double tol = 1e-9) {
  const SparseSymMatrix k = assemble_stiffness(mesh);
  const SparseSymMatrix m = assemble_mass(mesh);
  return neumann_nontrivial_eigenpair(k, m, tol).lambda;
}

inline double fem_robin_lambda(const TriMesh& mesh, double beta, double tol = 1e-9) {
  const SparseSymMatrix k = assemble_stiffness(mesh);
  const SparseSymMatrix m = assemble_mass(mesh);
  const std::vector<double> w(mesh.boundary_edges.size(), beta);
  const SparseSymMatrix b = assemble_boundary_mass(mesh, w);
  return smallest_eigenpair(SparseSymMatrix::weighted_sum(1.0, k, 1.0, b), m, tol).lambda;
}

// FEM path for beta*: bisection of lambda^R_h(beta) - lambda^N_h on the
// given mesh (both discrete, so the discretization errors largely cancel).
inline double beta_star_fem(const TriMesh& mesh, double tol = 1e-9) {
  const SparseSymMatrix k = assemble_stiffness(mesh);
  const SparseSymMatrix m = assemble_mass(mesh);
  const double lambda_n = neumann_nontrivial_eigenpair(k, m, tol).lambda;
  auto robin = [&](double beta) {
    const std::vector<double> w(mesh.boundary_edges.size(), beta);
    const SparseSymMatrix b = assemble_boundary_mass(mesh, w);
    return smallest_eigenpair(SparseSymMatrix::weighted_sum(1.0, k, 1.0, b), m, tol).lambda;
  };
  double lo = 0.0, hi = 1.0;
  int guard = 0;
  while (robin(hi) < lambda_n) {
    lo = hi;
    hi *= 2.0;
    if (++guard > 60) throw SolveError("beta_star_fem: failed to bracket lambda^N");
  }
  // lambda^R is increasing in beta; bisect to the requested residual
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double lr = robin(mid);
    if (std::abs(lr - lambda_n) <= tol) return mid;
    if (lr < lambda_n)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

// Critical mass m_bar(beta) with lambda_{m_bar}(beta) = lambda^N, for
// beta above beta*. Bisection in m, using that lambda_m is decreasing and
// continuous in m; every probe is a full alternating solve.
inline double m_bar(double beta, const TriMesh& mesh, double tol = 1e-3, int max_probes = 40,
                    double solve_tol = 1e-10) {
  const SparseSymMatrix k = assemble_stiffness(mesh);
  const SparseSymMatrix m = assemble_mass(mesh);
  const double lambda_n = neumann_nontrivial_eigenpair(k, m).lambda;
  const double beta_star = beta_star_fem(mesh, 1e-7);
  if (beta <= beta_star)
    throw NoThreshold("m_bar: beta <= beta*, the minimizer is radial for every mass");

  int probes = 0;
  auto lambda_m_of = [&](double mass) {
    ++probes;
    return minimize_lambda_m(mesh, beta, mass, solve_tol).lambda_m;
  };

  double m_lo = 0.0;                      // lambda > lambda^N side (m -> 0 gives lambda^R > lambda^N)
  double m_hi = 1.0;
  double l_hi = lambda_m_of(m_hi);
  while (l_hi > lambda_n) {
    m_lo = m_hi;
    m_hi *= 4.0;
    if (probes >= max_probes) throw SolveError("m_bar: probe budget exhausted during bracketing");
    l_hi = lambda_m_of(m_hi);
  }
  while (probes < max_probes) {
    const double mid = 0.5 * (m_lo + m_hi);
    const double l = lambda_m_of(mid);
    if (std::abs(l - lambda_n) <= tol) return mid;
    if (l > lambda_n)
      m_lo = mid;
    else
      m_hi = mid;
  }
  throw SolveError("m_bar: probe budget exhausted before |lambda_m - lambda^N| <= tol");
}

// Least-squares slope of log(error) against log(h); the convergence order
// of a refinement study.
inline double fitted_order(const std::vector<double>& hs, const std::vector<double>& errors) {
  if (hs.size() != errors.size() || hs.size() < 2)
    throw std::invalid_argument("fitted_order: need matching lists with at least two entries");
  const std::size_t n = hs.size();
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = std::log(hs[i]);
    const double y = std::log(std::max(errors[i], 1e-300));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace insopt
