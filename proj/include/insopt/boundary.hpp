// Piecewise-linear scalar fields on the boundary loop of a TriMesh.
//
// TraceField stores |v| per edge endpoint (so synthetic traces may jump at
// vertices; traces of nodal fields are continuous). BoundaryField stores an
// insulation profile h as parameter/value nodes per edge, which lets the
// optimal profile keep its kink exactly where the trace crosses the level
// c, and makes the mass identity hold to roundoff instead of O(h).
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "insopt/mesh.hpp"

namespace insopt {

struct DegenerateTrace : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct TraceField {
  struct Edge {
    double va = 0.0;  // |v| at the tail vertex
    double vb = 0.0;  // |v| at the head vertex
    double len = 0.0;
  };
  std::vector<Edge> edges;  // traversal order, closed loop

  static TraceField from_nodal(const TriMesh& mesh, std::span<const double> u) {
    if (static_cast<int>(u.size()) != mesh.n_vertices())
      throw std::invalid_argument("TraceField: field length does not match mesh");
    TraceField tr;
    tr.edges.reserve(mesh.boundary_edges.size());
    for (const auto& e : mesh.boundary_edges)
      tr.edges.push_back({std::abs(u[static_cast<std::size_t>(e.a)]),
                          std::abs(u[static_cast<std::size_t>(e.b)]), e.len});
    return tr;
  }

  double perimeter() const {
    double p = 0.0;
    for (const auto& e : edges) p += e.len;
    return p;
  }

  double max_value() const {
    double m = 0.0;
    for (const auto& e : edges) m = std::max({m, e.va, e.vb});
    return m;
  }

  // integral of |v| over the whole loop
  double integral() const {
    double s = 0.0;
    for (const auto& e : edges) s += 0.5 * (e.va + e.vb) * e.len;
    return s;
  }
};

struct LevelSetStats {
  double measure = 0.0;   // |{ |v| >= c }| as arc length
  double integral = 0.0;  // integral of |v| over { |v| >= c }
};

// Exact superlevel-set geometry of the piecewise-linear trace: edges
// crossing the level are split at the crossing parameter; the set is
// closed ({|v| >= c}).
inline LevelSetStats level_set_stats(const TraceField& trace, double c) {
  LevelSetStats s;
  for (const auto& e : trace.edges) {
    const double va = e.va, vb = e.vb;
    if (va >= c && vb >= c) {
      s.measure += e.len;
      s.integral += 0.5 * (va + vb) * e.len;
    } else if (va < c && vb < c) {
      // nothing
    } else {
      const double t = (c - va) / (vb - va);  // crossing parameter in (0,1)
      if (va < c) {                           // kept piece is [t, 1]
        const double frac = 1.0 - t;
        s.measure += e.len * frac;
        s.integral += 0.5 * (c + vb) * frac * e.len;
      } else {  // kept piece is [0, t]
        s.measure += e.len * t;
        s.integral += 0.5 * (va + c) * t * e.len;
      }
    }
  }
  return s;
}

class BoundaryField {
public:
  struct Node {
    double t = 0.0;  // parameter within the edge, in [0, 1]
    double value = 0.0;
  };
  struct EdgeProfile {
    double len = 0.0;
    std::vector<Node> nodes;  // first node at t=0, last at t=1, t increasing
  };

  BoundaryField() = default;
  explicit BoundaryField(std::vector<EdgeProfile> edges) : edges_(std::move(edges)) { check(); }

  static BoundaryField constant(const TriMesh& mesh, double value) {
    if (value < 0.0) throw std::invalid_argument("BoundaryField: negative value");
    std::vector<EdgeProfile> e;
    e.reserve(mesh.boundary_edges.size());
    for (const auto& be : mesh.boundary_edges) e.push_back({be.len, {{0.0, value}, {1.0, value}}});
    return BoundaryField(std::move(e));
  }

  // One value per boundary vertex in traversal order; continuous field.
  static BoundaryField from_vertex_values(const TriMesh& mesh, std::span<const double> values) {
    const std::size_t nb = mesh.boundary_edges.size();
    if (values.size() != nb)
      throw std::invalid_argument("BoundaryField: need one value per boundary vertex");
    std::vector<EdgeProfile> e;
    e.reserve(nb);
    for (std::size_t i = 0; i < nb; ++i)
      e.push_back({mesh.boundary_edges[i].len, {{0.0, values[i]}, {1.0, values[(i + 1) % nb]}}});
    return BoundaryField(std::move(e));
  }

  const std::vector<EdgeProfile>& edges() const { return edges_; }
  std::size_t n_edges() const { return edges_.size(); }

  // exact trapezoid over the node partition
  double mass() const {
    double m = 0.0;
    for (const auto& e : edges_)
      for (std::size_t i = 0; i + 1 < e.nodes.size(); ++i)
        m += 0.5 * (e.nodes[i].value + e.nodes[i + 1].value) * (e.nodes[i + 1].t - e.nodes[i].t) * e.len;
    return m;
  }

  double min_value() const {
    double m = edges_.empty() ? 0.0 : edges_[0].nodes[0].value;
    for (const auto& e : edges_)
      for (const auto& n : e.nodes) m = std::min(m, n.value);
    return m;
  }

  double max_value() const {
    double m = 0.0;
    for (const auto& e : edges_)
      for (const auto& n : e.nodes) m = std::max(m, n.value);
    return m;
  }

  // value at the tail vertex of each edge (for continuous fields this is
  // the per-boundary-vertex sampling)
  std::vector<double> vertex_values() const {
    std::vector<double> v;
    v.reserve(edges_.size());
    for (const auto& e : edges_) v.push_back(e.nodes.front().value);
    return v;
  }

  double value_at(std::size_t edge, double t) const {
    const auto& nodes = edges_[edge].nodes;
    if (t <= nodes.front().t) return nodes.front().value;
    for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
      if (t <= nodes[i + 1].t) {
        const double dt = nodes[i + 1].t - nodes[i].t;
        if (dt <= 0.0) return nodes[i + 1].value;
        const double s = (t - nodes[i].t) / dt;
        return nodes[i].value + s * (nodes[i + 1].value - nodes[i].value);
      }
    }
    return nodes.back().value;
  }

  BoundaryField scaled(double factor) const {
    BoundaryField out = *this;
    for (auto& e : out.edges_)
      for (auto& n : e.nodes) n.value *= factor;
    return out;
  }

private:
  void check() const {
    for (const auto& e : edges_) {
      if (e.nodes.size() < 2 || e.nodes.front().t != 0.0 || e.nodes.back().t != 1.0)
        throw std::invalid_argument("BoundaryField: edge profile must span [0,1]");
      for (std::size_t i = 0; i + 1 < e.nodes.size(); ++i)
        if (!(e.nodes[i].t <= e.nodes[i + 1].t))
          throw std::invalid_argument("BoundaryField: nodes must be sorted by t");
      for (const auto& n : e.nodes)
        if (!(n.value >= 0.0)) throw std::invalid_argument("BoundaryField: negative value");
    }
  }

  std::vector<EdgeProfile> edges_;
};

namespace detail {

// I_k = integral over [0,1] of s^k / (d0 + (d1-d0) s) ds for k = 0,1,2,
// with d0, d1 >= some positive floor. Switches to a series when the
// denominator is nearly constant to avoid log cancellation.
struct RationalMoments {
  double i0 = 0.0, i1 = 0.0, i2 = 0.0;
};

inline RationalMoments rational_moments(double d0, double d1) {
  const double delta = d1 - d0;
  RationalMoments m;
  // The log forms lose up to three leading digits per power of delta/d0,
  // so the series takes over well before that matters.
  if (std::abs(delta) < 0.5 * d0) {
    const double r = delta / d0;
    double i0 = 0.0, i1 = 0.0, i2 = 0.0, p = 1.0;
    for (int j = 0; j < 80; ++j) {
      i0 += p / (j + 1);
      i1 += p / (j + 2);
      i2 += p / (j + 3);
      p *= -r;
      if (std::abs(p) < 1e-18) break;
    }
    m.i0 = i0 / d0;
    m.i1 = i1 / d0;
    m.i2 = i2 / d0;
    return m;
  }
  const double lg = std::log1p(delta / d0);  // log(d1/d0)
  m.i0 = lg / delta;
  m.i1 = (delta - d0 * lg) / (delta * delta);
  m.i2 = (0.5 * (d1 * d1 - d0 * d0) - 2.0 * d0 * delta + d0 * d0 * lg) / (delta * delta * delta);
  return m;
}

// integral over [0,1] of (a0 + a1 s)(b0 + b1 s) / (d0 + (d1-d0) s) ds
inline double rational_product_integral(double a0, double a1, double b0, double b1, double d0, double d1) {
  const RationalMoments m = rational_moments(d0, d1);
  return a0 * b0 * m.i0 + (a0 * b1 + a1 * b0) * m.i1 + a1 * b1 * m.i2;
}

}  // namespace detail

}  // namespace insopt
