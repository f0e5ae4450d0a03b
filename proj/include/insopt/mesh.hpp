// Structured triangulations of the disk, regular polygons and rectangles,
// with an oriented boundary loop and outward normals. Disk meshes use
// concentric rings (ring i at radius i/k, 6i vertices); polygonal domains
// use a centroid fan refined until the mesh size target is met. The
// boundary is a piecewise-linear polygon; for disks its vertices lie
// exactly on the circle and O(h^2) geometric error is absorbed into the
// FEM tolerances downstream.
#pragma once

#include <array>
#include <cmath>
#include <cstdio>
#include <istream>
#include <map>
#include <numbers>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

namespace insopt {

struct MeshError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

using Point = std::array<double, 2>;

struct Circle {
  Point center{0.0, 0.0};
  double radius = 1.0;
};

struct DomainSpec {
  enum class Kind { Disk, RegularPolygon, Rectangle };
  Kind kind = Kind::Disk;
  double radius = 1.0;        // disk
  int n_sides = 0;            // regular polygon
  double circumradius = 1.0;  // regular polygon
  double width = 1.0;         // rectangle
  double height = 1.0;        // rectangle
  double target_h = 0.1;

  static DomainSpec disk(double radius, double target_h) {
    DomainSpec s;
    s.kind = Kind::Disk;
    s.radius = radius;
    s.target_h = target_h;
    s.check();
    return s;
  }
  static DomainSpec regular_polygon(int n_sides, double circumradius, double target_h) {
    DomainSpec s;
    s.kind = Kind::RegularPolygon;
    s.n_sides = n_sides;
    s.circumradius = circumradius;
    s.target_h = target_h;
    s.check();
    return s;
  }
  static DomainSpec rectangle(double width, double height, double target_h) {
    DomainSpec s;
    s.kind = Kind::Rectangle;
    s.width = width;
    s.height = height;
    s.target_h = target_h;
    s.check();
    return s;
  }

  // "disk:R", "regular_polygon:N:R", "rectangle:W:H"
  static DomainSpec parse(const std::string& text, double target_h);

  double diameter() const {
    switch (kind) {
      case Kind::Disk: return 2.0 * radius;
      case Kind::RegularPolygon: return 2.0 * circumradius;
      case Kind::Rectangle: return std::hypot(width, height);
    }
    return 0.0;
  }

  void check() const {
    if (!(target_h > 0.0)) throw MeshError("DomainSpec: target_h must be positive");
    switch (kind) {
      case Kind::Disk:
        if (!(radius > 0.0)) throw MeshError("DomainSpec: disk radius must be positive");
        break;
      case Kind::RegularPolygon:
        if (n_sides < 3) throw MeshError("DomainSpec: polygon needs at least 3 sides");
        if (!(circumradius > 0.0)) throw MeshError("DomainSpec: circumradius must be positive");
        break;
      case Kind::Rectangle:
        if (!(width > 0.0) || !(height > 0.0)) throw MeshError("DomainSpec: rectangle sides must be positive");
        break;
    }
    if (!(target_h < diameter())) throw MeshError("DomainSpec: target_h must be smaller than the domain diameter");
  }

  std::string to_string() const {
    char buf[96];
    switch (kind) {
      case Kind::Disk:
        std::snprintf(buf, sizeof buf, "disk:%g", radius);
        break;
      case Kind::RegularPolygon:
        std::snprintf(buf, sizeof buf, "regular_polygon:%d:%g", n_sides, circumradius);
        break;
      case Kind::Rectangle:
        std::snprintf(buf, sizeof buf, "rectangle:%g:%g", width, height);
        break;
    }
    return buf;
  }
};

struct BoundaryEdge {
  int a = 0;  // tail vertex, loop runs counterclockwise
  int b = 0;  // head vertex
  double nx = 0.0, ny = 0.0;  // outward unit normal
  double len = 0.0;
};

struct TriMesh {
  std::vector<Point> vertices;
  std::vector<std::array<int, 3>> triangles;   // counterclockwise
  std::vector<BoundaryEdge> boundary_edges;    // closed loop in traversal order
  std::vector<int> boundary_vertices;          // boundary_vertices[i] == boundary_edges[i].a
  std::optional<Circle> boundary_circle;       // set for disk domains; refine projects onto it

  int n_vertices() const { return static_cast<int>(vertices.size()); }
  int n_triangles() const { return static_cast<int>(triangles.size()); }
  int n_boundary() const { return static_cast<int>(boundary_edges.size()); }
};

inline double signed_area(const Point& p0, const Point& p1, const Point& p2) {
  return 0.5 * ((p1[0] - p0[0]) * (p2[1] - p0[1]) - (p1[1] - p0[1]) * (p2[0] - p0[0]));
}

inline double mesh_area(const TriMesh& mesh) {
  double a = 0.0;
  for (const auto& t : mesh.triangles)
    a += signed_area(mesh.vertices[t[0]], mesh.vertices[t[1]], mesh.vertices[t[2]]);
  return a;
}

// Sum of boundary edge lengths, the discrete |dOmega|.
inline double boundary_measure(const TriMesh& mesh) {
  double p = 0.0;
  for (const auto& e : mesh.boundary_edges) p += e.len;
  return p;
}

inline double max_triangle_diameter(const TriMesh& mesh) {
  double d = 0.0;
  for (const auto& t : mesh.triangles)
    for (int i = 0; i < 3; ++i) {
      const Point& p = mesh.vertices[t[i]];
      const Point& q = mesh.vertices[t[(i + 1) % 3]];
      d = std::max(d, std::hypot(q[0] - p[0], q[1] - p[1]));
    }
  return d;
}

namespace detail {

// Rebuilds boundary_edges/boundary_vertices from the triangle set: edges
// used by exactly one triangle, chained into a single CCW loop.
inline void extract_boundary(TriMesh& mesh) {
  std::map<std::pair<int, int>, int> directed;  // (a,b) of CCW triangle edges
  for (const auto& t : mesh.triangles) {
    for (int i = 0; i < 3; ++i) {
      int a = t[i], b = t[(i + 1) % 3];
      ++directed[{a, b}];
    }
  }
  std::map<int, int> next;  // boundary successor
  for (const auto& [edge, count] : directed) {
    if (count != 1) throw MeshError("extract_boundary: non-manifold edge");
    // A CCW triangle edge lies on the boundary iff the opposite direction
    // is unused.
    if (directed.find({edge.second, edge.first}) == directed.end()) {
      if (!next.emplace(edge.first, edge.second).second)
        throw MeshError("extract_boundary: boundary is not a simple loop");
    }
  }
  if (next.empty()) throw MeshError("extract_boundary: no boundary found");

  mesh.boundary_edges.clear();
  mesh.boundary_vertices.clear();
  const int start = next.begin()->first;
  int v = start;
  do {
    auto it = next.find(v);
    if (it == next.end()) throw MeshError("extract_boundary: open boundary chain");
    const int w = it->second;
    const Point& p = mesh.vertices[v];
    const Point& q = mesh.vertices[w];
    const double dx = q[0] - p[0], dy = q[1] - p[1];
    const double len = std::hypot(dx, dy);
    if (!(len > 0.0)) throw MeshError("extract_boundary: zero-length boundary edge");
    // interior lies left of the CCW traversal, outward is to the right
    mesh.boundary_edges.push_back({v, w, dy / len, -dx / len, len});
    mesh.boundary_vertices.push_back(v);
    v = w;
  } while (v != start);
  if (mesh.boundary_edges.size() != next.size())
    throw MeshError("extract_boundary: boundary has more than one loop");
}

inline void check_triangle_areas(const TriMesh& mesh) {
  for (const auto& t : mesh.triangles)
    if (!(signed_area(mesh.vertices[t[0]], mesh.vertices[t[1]], mesh.vertices[t[2]]) > 0.0))
      throw MeshError("mesh: triangle with non-positive area");
}

// Triangulates the annulus between two concentric vertex rings (uniform in
// angle) by an angular merge walk. ring0 may be a single center vertex.
inline void triangulate_annulus(std::vector<std::array<int, 3>>& tris, const std::vector<int>& inner,
                                const std::vector<int>& outer) {
  const int n0 = static_cast<int>(inner.size());
  const int n1 = static_cast<int>(outer.size());
  if (n0 == 1) {
    for (int j = 0; j < n1; ++j) tris.push_back({inner[0], outer[j], outer[(j + 1) % n1]});
    return;
  }
  auto angle_in = [&](int i) { return static_cast<double>(i) / n0; };
  auto angle_out = [&](int j) { return static_cast<double>(j) / n1; };
  int i = 0, j = 0;
  while (i < n0 || j < n1) {
    // ties go to the inner ring, otherwise the closing triangle of each
    // sector spans a whole inner edge plus the annulus diagonal
    const bool advance_outer = (j < n1) && (i == n0 || angle_out(j + 1) < angle_in(i + 1));
    if (advance_outer) {
      tris.push_back({inner[i % n0], outer[j % n1], outer[(j + 1) % n1]});
      ++j;
    } else {
      tris.push_back({inner[i % n0], outer[j % n1], inner[(i + 1) % n0]});
      ++i;
    }
  }
}

inline TriMesh build_disk(double radius, double target_h) {
  const int k = std::max(1, static_cast<int>(std::ceil(radius / target_h)));
  TriMesh mesh;
  mesh.boundary_circle = Circle{{0.0, 0.0}, radius};
  mesh.vertices.push_back({0.0, 0.0});
  std::vector<std::vector<int>> rings(static_cast<std::size_t>(k) + 1);
  rings[0] = {0};
  for (int i = 1; i <= k; ++i) {
    const double r = radius * static_cast<double>(i) / k;
    const int n = 6 * i;
    for (int j = 0; j < n; ++j) {
      const double th = 2.0 * std::numbers::pi * j / n;
      rings[i].push_back(mesh.n_vertices());
      mesh.vertices.push_back({r * std::cos(th), r * std::sin(th)});
    }
  }
  for (int i = 1; i <= k; ++i) triangulate_annulus(mesh.triangles, rings[i - 1], rings[i]);
  check_triangle_areas(mesh);
  extract_boundary(mesh);
  return mesh;
}

inline TriMesh fan_mesh(const std::vector<Point>& corners) {
  TriMesh mesh;
  Point c{0.0, 0.0};
  for (const auto& p : corners) {
    c[0] += p[0] / corners.size();
    c[1] += p[1] / corners.size();
  }
  mesh.vertices.push_back(c);
  for (const auto& p : corners) mesh.vertices.push_back(p);
  const int n = static_cast<int>(corners.size());
  for (int j = 0; j < n; ++j) mesh.triangles.push_back({0, 1 + j, 1 + (j + 1) % n});
  return mesh;
}

}  // namespace detail

TriMesh refine(const TriMesh& mesh);

inline TriMesh build_mesh(const DomainSpec& spec) {
  spec.check();
  if (spec.kind == DomainSpec::Kind::Disk) return detail::build_disk(spec.radius, spec.target_h);

  std::vector<Point> corners;
  if (spec.kind == DomainSpec::Kind::RegularPolygon) {
    for (int j = 0; j < spec.n_sides; ++j) {
      const double th = 2.0 * std::numbers::pi * j / spec.n_sides;
      corners.push_back({spec.circumradius * std::cos(th), spec.circumradius * std::sin(th)});
    }
  } else {
    const double w = spec.width, h = spec.height;
    corners = {{0.0, 0.0}, {w, 0.0}, {w, h}, {0.0, h}};
  }
  TriMesh mesh = detail::fan_mesh(corners);
  detail::check_triangle_areas(mesh);
  detail::extract_boundary(mesh);
  while (max_triangle_diameter(mesh) > 1.5 * spec.target_h) mesh = refine(mesh);
  return mesh;
}

// Uniform 1-to-4 split by edge midpoints. Midpoints of boundary edges are
// projected back onto the boundary circle when the mesh carries one, so
// disk refinements keep boundary vertices exactly on the circle.
inline TriMesh refine(const TriMesh& mesh) {
  TriMesh out;
  out.vertices = mesh.vertices;
  out.boundary_circle = mesh.boundary_circle;

  std::map<std::pair<int, int>, bool> on_boundary;
  for (const auto& e : mesh.boundary_edges) on_boundary[{std::min(e.a, e.b), std::max(e.a, e.b)}] = true;

  std::map<std::pair<int, int>, int> midpoint;
  auto mid = [&](int a, int b) {
    const auto key = std::make_pair(std::min(a, b), std::max(a, b));
    auto it = midpoint.find(key);
    if (it != midpoint.end()) return it->second;
    const Point& p = mesh.vertices[a];
    const Point& q = mesh.vertices[b];
    Point m{0.5 * (p[0] + q[0]), 0.5 * (p[1] + q[1])};
    if (mesh.boundary_circle && on_boundary.count(key)) {
      const Circle& c = *mesh.boundary_circle;
      const double dx = m[0] - c.center[0], dy = m[1] - c.center[1];
      const double r = std::hypot(dx, dy);
      if (r > 0.0) {
        m[0] = c.center[0] + dx * c.radius / r;
        m[1] = c.center[1] + dy * c.radius / r;
      }
    }
    const int idx = out.n_vertices();
    out.vertices.push_back(m);
    midpoint.emplace(key, idx);
    return idx;
  };

  for (const auto& t : mesh.triangles) {
    const int m01 = mid(t[0], t[1]);
    const int m12 = mid(t[1], t[2]);
    const int m20 = mid(t[2], t[0]);
    out.triangles.push_back({t[0], m01, m20});
    out.triangles.push_back({t[1], m12, m01});
    out.triangles.push_back({t[2], m20, m12});
    out.triangles.push_back({m01, m12, m20});
  }
  detail::check_triangle_areas(out);
  detail::extract_boundary(out);
  return out;
}

inline DomainSpec DomainSpec::parse(const std::string& text, double target_h) {
  std::vector<std::string> parts;
  std::string cur;
  for (char ch : text) {
    if (ch == ':') {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  parts.push_back(cur);
  auto num = [&](const std::string& s) {
    try {
      std::size_t pos = 0;
      double v = std::stod(s, &pos);
      if (pos != s.size()) throw std::invalid_argument(s);
      return v;
    } catch (const std::exception&) {
      throw MeshError("DomainSpec: bad number '" + s + "' in '" + text + "'");
    }
  };
  if (parts[0] == "disk" && parts.size() == 2) return disk(num(parts[1]), target_h);
  if (parts[0] == "regular_polygon" && parts.size() == 3)
    return regular_polygon(static_cast<int>(num(parts[1])), num(parts[2]), target_h);
  if (parts[0] == "rectangle" && parts.size() == 3) return rectangle(num(parts[1]), num(parts[2]), target_h);
  throw MeshError("DomainSpec: cannot parse '" + text +
                  "' (expected disk:R, regular_polygon:N:R or rectangle:W:H)");
}

// Text format: line 1 "NV NT NB"; NV lines "x y"; NT lines "i j k";
// NB lines "a b nx ny len".
void write_mesh(std::ostream& os, const TriMesh& mesh);
TriMesh read_mesh(std::istream& is);

inline void write_mesh(std::ostream& os, const TriMesh& mesh) {
  char buf[160];
  os << mesh.n_vertices() << ' ' << mesh.n_triangles() << ' ' << mesh.n_boundary() << '\n';
  for (const auto& p : mesh.vertices) {
    std::snprintf(buf, sizeof buf, "%.17g %.17g\n", p[0], p[1]);
    os << buf;
  }
  for (const auto& t : mesh.triangles) os << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
  for (const auto& e : mesh.boundary_edges) {
    std::snprintf(buf, sizeof buf, "%d %d %.17g %.17g %.17g\n", e.a, e.b, e.nx, e.ny, e.len);
    os << buf;
  }
}

inline TriMesh read_mesh(std::istream& is) {
  TriMesh mesh;
  int nv = 0, nt = 0, nb = 0;
  if (!(is >> nv >> nt >> nb) || nv < 3 || nt < 1 || nb < 3) throw MeshError("read_mesh: bad header");
  mesh.vertices.resize(static_cast<std::size_t>(nv));
  for (auto& p : mesh.vertices)
    if (!(is >> p[0] >> p[1])) throw MeshError("read_mesh: bad vertex line");
  mesh.triangles.resize(static_cast<std::size_t>(nt));
  for (auto& t : mesh.triangles)
    if (!(is >> t[0] >> t[1] >> t[2])) throw MeshError("read_mesh: bad triangle line");
  mesh.boundary_edges.resize(static_cast<std::size_t>(nb));
  for (auto& e : mesh.boundary_edges) {
    if (!(is >> e.a >> e.b >> e.nx >> e.ny >> e.len)) throw MeshError("read_mesh: bad boundary line");
    mesh.boundary_vertices.push_back(e.a);
  }
  detail::check_triangle_areas(mesh);
  return mesh;
}

inline Point mesh_centroid(const TriMesh& mesh) {
  Point c{0.0, 0.0};
  double total = 0.0;
  for (const auto& t : mesh.triangles) {
    const Point& p0 = mesh.vertices[t[0]];
    const Point& p1 = mesh.vertices[t[1]];
    const Point& p2 = mesh.vertices[t[2]];
    const double a = signed_area(p0, p1, p2);
    c[0] += a * (p0[0] + p1[0] + p2[0]) / 3.0;
    c[1] += a * (p0[1] + p1[1] + p2[1]) / 3.0;
    total += a;
  }
  c[0] /= total;
  c[1] /= total;
  return c;
}

}  // namespace insopt
