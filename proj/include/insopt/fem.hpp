// P1 finite-element forms on a TriMesh: stiffness, mass, and weighted
// boundary mass. The boundary form comes in two flavours: a piecewise-
// linear vertex weight (2-point Gauss per edge, exact for the cubic
// integrand) and the Robin weight beta/(1+beta*h) for a piecewise-linear
// profile h (closed-form rational integrals per sub-segment, exact to
// roundoff; the alternating minimization needs both of its half-steps to
// minimize the same discrete functional).
#pragma once

#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

#include "insopt/boundary.hpp"
#include "insopt/mesh.hpp"
#include "insopt/sparse.hpp"

namespace insopt {

struct AssemblyError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

using NodalField = std::vector<double>;

inline SparseSymMatrix assemble_stiffness(const TriMesh& mesh) {
  std::vector<Triplet> t;
  t.reserve(mesh.triangles.size() * 6);
  for (const auto& tri : mesh.triangles) {
    const Point& p0 = mesh.vertices[tri[0]];
    const Point& p1 = mesh.vertices[tri[1]];
    const Point& p2 = mesh.vertices[tri[2]];
    const double area = signed_area(p0, p1, p2);
    if (area < 1e-14)
      throw AssemblyError("assemble_stiffness: degenerate triangle (area " + std::to_string(area) + ")");
    // grad of barycentric i: (b_i, c_i)/(2A), b_i = y_j - y_k, c_i = x_k - x_j
    const double b[3] = {p1[1] - p2[1], p2[1] - p0[1], p0[1] - p1[1]};
    const double c[3] = {p2[0] - p1[0], p0[0] - p2[0], p1[0] - p0[0]};
    for (int i = 0; i < 3; ++i)
      for (int j = i; j < 3; ++j)
        t.push_back({tri[i], tri[j], (b[i] * b[j] + c[i] * c[j]) / (4.0 * area)});
  }
  return SparseSymMatrix::from_triplets(mesh.n_vertices(), std::move(t));
}

inline SparseSymMatrix assemble_mass(const TriMesh& mesh) {
  std::vector<Triplet> t;
  t.reserve(mesh.triangles.size() * 6);
  for (const auto& tri : mesh.triangles) {
    const double area = signed_area(mesh.vertices[tri[0]], mesh.vertices[tri[1]], mesh.vertices[tri[2]]);
    if (area < 1e-14)
      throw AssemblyError("assemble_mass: degenerate triangle (area " + std::to_string(area) + ")");
    for (int i = 0; i < 3; ++i)
      for (int j = i; j < 3; ++j)
        t.push_back({tri[i], tri[j], area / 12.0 * (i == j ? 2.0 : 1.0)});
  }
  return SparseSymMatrix::from_triplets(mesh.n_vertices(), std::move(t));
}

// Boundary mass with a piecewise-linear weight given per boundary vertex
// (traversal order). The integrand w * phi_i * phi_j is cubic on each
// edge; 2-point Gauss integrates it exactly.
inline SparseSymMatrix assemble_boundary_mass(const TriMesh& mesh, std::span<const double> vertex_weights) {
  const std::size_t nb = mesh.boundary_edges.size();
  if (vertex_weights.size() != nb)
    throw std::invalid_argument("assemble_boundary_mass: need one weight per boundary vertex");
  for (double w : vertex_weights)
    if (!(w >= 0.0) || !std::isfinite(w))
      throw AssemblyError("assemble_boundary_mass: weights must be finite and nonnegative");

  static constexpr double kGauss[2] = {0.21132486540518712, 0.78867513459481288};  // (1 -+ 1/sqrt(3))/2
  std::vector<Triplet> t;
  t.reserve(nb * 3);
  for (std::size_t i = 0; i < nb; ++i) {
    const auto& e = mesh.boundary_edges[i];
    const double wa = vertex_weights[i];
    const double wb = vertex_weights[(i + 1) % nb];
    double baa = 0.0, bab = 0.0, bbb = 0.0;
    for (double g : kGauss) {
      const double w = wa + (wb - wa) * g;
      const double fa = 1.0 - g, fb = g;
      baa += 0.5 * w * fa * fa;
      bab += 0.5 * w * fa * fb;
      bbb += 0.5 * w * fb * fb;
    }
    t.push_back({e.a, e.a, baa * e.len});
    t.push_back({e.a, e.b, bab * e.len});
    t.push_back({e.b, e.b, bbb * e.len});
  }
  return SparseSymMatrix::from_triplets(mesh.n_vertices(), std::move(t));
}

// Boundary form of the h-insulated Robin operator:
//   B_ij = integral over dOmega of beta/(1 + beta*h) phi_i phi_j.
// h is piecewise linear on its own node partition; on each sub-segment the
// integrand is quadratic/linear and is integrated in closed form.
inline SparseSymMatrix assemble_robin_boundary(const TriMesh& mesh, const BoundaryField& h, double beta) {
  const std::size_t nb = mesh.boundary_edges.size();
  if (h.n_edges() != nb)
    throw std::invalid_argument("assemble_robin_boundary: profile does not match mesh boundary");
  if (!(beta > 0.0)) throw std::invalid_argument("assemble_robin_boundary: beta must be positive");

  std::vector<Triplet> t;
  t.reserve(nb * 3);
  for (std::size_t i = 0; i < nb; ++i) {
    const auto& e = mesh.boundary_edges[i];
    const auto& prof = h.edges()[i];
    double baa = 0.0, bab = 0.0, bbb = 0.0;
    for (std::size_t s = 0; s + 1 < prof.nodes.size(); ++s) {
      const double t0 = prof.nodes[s].t, t1 = prof.nodes[s + 1].t;
      const double dt = t1 - t0;
      if (dt <= 0.0) continue;
      const double d0 = 1.0 + beta * prof.nodes[s].value;
      const double d1 = 1.0 + beta * prof.nodes[s + 1].value;
      // P1 traces restricted to the sub-segment, in its local parameter
      const double fa0 = 1.0 - t0, fa1 = -dt;  // phi_a = fa0 + fa1 * s
      const double fb0 = t0, fb1 = dt;         // phi_b = fb0 + fb1 * s
      const double scale = beta * e.len * dt;
      baa += scale * detail::rational_product_integral(fa0, fa1, fa0, fa1, d0, d1);
      bab += scale * detail::rational_product_integral(fa0, fa1, fb0, fb1, d0, d1);
      bbb += scale * detail::rational_product_integral(fb0, fb1, fb0, fb1, d0, d1);
    }
    t.push_back({e.a, e.a, baa});
    t.push_back({e.a, e.b, bab});
    t.push_back({e.b, e.b, bbb});
  }
  return SparseSymMatrix::from_triplets(mesh.n_vertices(), std::move(t));
}

// (v'Kv + v'Bv) / (v'Mv); pass B = nullptr for the pure Neumann quotient.
inline double rayleigh_quotient(const SparseSymMatrix& K, const SparseSymMatrix& M,
                                const SparseSymMatrix* B, std::span<const double> v) {
  const double mm = M.quad(v);
  if (!(mm > 0.0)) throw std::invalid_argument("rayleigh_quotient: zero function");
  double num = K.quad(v);
  if (B) num += B->quad(v);
  return num / mm;
}

}  // namespace insopt
