// Radial transmission eigenvalue problem for a disk wrapped in a uniform
// insulating layer of thickness eps*h and conductivity eps: J0(k r) inside,
// A + B log r in the layer, flux matching u_in' = eps u_out' at the
// interface and eps u' + beta u = 0 on the outer rim (the condition the
// first variation of the thick-layer functional produces). Eliminating A
// and B leaves a scalar dispersion relation in k whose eps -> 0 limit is
// exactly the Robin relation with effective coefficient beta/(1+beta h).
#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "insopt/bessel.hpp"
#include "insopt/spectra.hpp"

namespace insopt {

struct LayerSpec {
  double eps = 0.1;
  double h_const = 1.0;
  double beta = 1.0;
  double radius = 1.0;

  void check() const {
    if (!(eps > 0.0) || !(h_const > 0.0) || !(beta > 0.0) || !(radius > 0.0))
      throw std::invalid_argument("LayerSpec: all parameters must be positive");
    if (!(eps * h_const < radius)) throw std::invalid_argument("LayerSpec: layer is not thin (eps*h >= radius)");
  }
};

// Dispersion residual of the layered problem at wavenumber k:
//   k R J1(k R) (eps/R_out + beta log(R_out/R)) - eps beta J0(k R),
// R_out = R + eps h. Strictly increasing on (0, j01/R).
inline double layer_dispersion_residual(const LayerSpec& spec, double k) {
  const double r = spec.radius;
  const double r_out = r + spec.eps * spec.h_const;
  const double coupling = spec.eps / r_out + spec.beta * std::log(r_out / r);
  return k * r * bessel_j1(k * r) * coupling - spec.eps * spec.beta * bessel_j0(k * r);
}

// eps -> 0 limit of the relation above (after dividing by eps):
//   k J1(k R)(1 + beta h) - beta J0(k R) = 0,
// the Robin dispersion with weight beta/(1+beta h).
inline double limit_dispersion_residual(double beta, double h_const, double radius, double k) {
  return k * bessel_j1(k * radius) * (1.0 + beta * h_const) - beta * bessel_j0(k * radius);
}

// Smallest eigenvalue of the layered problem.
inline double radial_layer_eigenvalue(const LayerSpec& spec, double tol = 1e-12) {
  spec.check();
  const double hi = bessel_j0_first_zero() / spec.radius;
  auto f = [&](double k) { return layer_dispersion_residual(spec, k); };
  if (!(f(1e-12 * hi) < 0.0) || !(f(hi) > 0.0))
    throw SolveError("radial_layer_eigenvalue: dispersion relation does not bracket a root");
  const double k = bisect(f, 1e-12 * hi, hi, 1e-16);
  const double scale = std::max(1.0, spec.eps * spec.beta);
  if (std::abs(f(k)) / scale > tol)
    throw SolveError("radial_layer_eigenvalue: residual above tolerance after bisection");
  return k * k;
}

struct GammaRow {
  double eps = 0.0;
  double lambda_eps = 0.0;
  double gap = 0.0;  // |lambda_eps - lambda(h)|
};

// Sweep of the layer eigenvalue against the limit lambda(h) =
// disk_robin_oracle(beta/(1+beta h)).
inline std::vector<GammaRow> gamma_limit_report(double beta, double h_const,
                                                const std::vector<double>& eps_list,
                                                double radius = 1.0) {
  if (eps_list.empty()) throw std::invalid_argument("gamma_limit_report: empty eps list");
  for (std::size_t i = 0; i + 1 < eps_list.size(); ++i)
    if (!(eps_list[i] > eps_list[i + 1]))
      throw std::invalid_argument("gamma_limit_report: eps list must be positive decreasing");
  const double lambda_limit = disk_robin_oracle(beta / (1.0 + beta * h_const), radius).lambda;
  std::vector<GammaRow> rows;
  rows.reserve(eps_list.size());
  for (double eps : eps_list) {
    LayerSpec spec{eps, h_const, beta, radius};
    const double lam = radial_layer_eigenvalue(spec);
    rows.push_back({eps, lam, std::abs(lam - lambda_limit)});
  }
  return rows;
}

}  // namespace insopt
