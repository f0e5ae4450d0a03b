#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <vector>

#include "insopt/fem.hpp"
#include "insopt/mesh.hpp"
#include "support.hpp"

using namespace insopt;
using Catch::Approx;

namespace {

std::vector<double> nodal(const TriMesh& mesh, double a, double bx, double cy) {
  std::vector<double> v(static_cast<std::size_t>(mesh.n_vertices()));
  for (int i = 0; i < mesh.n_vertices(); ++i)
    v[static_cast<std::size_t>(i)] = a + bx * mesh.vertices[i][0] + cy * mesh.vertices[i][1];
  return v;
}

}  // namespace

TEST_CASE("stiffness annihilates constants and reproduces linear gradients", "[fem]") {
  const TriMesh square = build_mesh(DomainSpec::rectangle(1.0, 1.0, 0.2));
  const SparseSymMatrix k = assemble_stiffness(square);

  const std::vector<double> ones(static_cast<std::size_t>(square.n_vertices()), 1.0);
  const auto k1 = k.apply(ones);
  for (double v : k1) REQUIRE(std::abs(v) < 1e-13);
  REQUIRE(std::abs(k.quad(ones)) < 1e-13);

  // integral of |grad x|^2 over the unit square is the area
  REQUIRE(k.quad(nodal(square, 0.0, 1.0, 0.0)) == Approx(1.0).epsilon(1e-13));

  auto g = testsupport::rng(21);
  for (int trial = 0; trial < 10; ++trial) {
    const double bx = testsupport::uniform(g, -2.0, 2.0);
    const double cy = testsupport::uniform(g, -2.0, 2.0);
    const double a = testsupport::uniform(g, -1.0, 1.0);
    REQUIRE(k.quad(nodal(square, a, bx, cy)) ==
            Approx((bx * bx + cy * cy) * 1.0).margin(1e-12 * (1.0 + bx * bx + cy * cy)));
  }
}

TEST_CASE("stiffness form of v = x tends to the disk area", "[fem]") {
  TriMesh disk = build_mesh(DomainSpec::disk(1.0, 0.2));
  double prev_err = 1e9;
  for (int level = 0; level < 3; ++level) {
    const double val = assemble_stiffness(disk).quad(nodal(disk, 0.0, 1.0, 0.0));
    const double err = std::abs(val - std::numbers::pi);
    REQUIRE(err < prev_err);
    prev_err = err;
    disk = refine(disk);
  }
  REQUIRE(prev_err < 5e-3);
}

TEST_CASE("mass matrix integrates areas and quadratics of linears exactly", "[fem]") {
  const TriMesh square = build_mesh(DomainSpec::rectangle(1.0, 1.0, 0.2));
  const SparseSymMatrix m = assemble_mass(square);
  const std::vector<double> ones(static_cast<std::size_t>(square.n_vertices()), 1.0);
  REQUIRE(m.quad(ones) == Approx(1.0).epsilon(1e-13));
  // interpolant of the linear v=x is v itself, so v'Mv = integral x^2 = 1/3
  REQUIRE(m.quad(nodal(square, 0.0, 1.0, 0.0)) == Approx(1.0 / 3.0).epsilon(1e-13));

  const TriMesh disk = build_mesh(DomainSpec::disk(1.0, 0.05));
  const std::vector<double> dones(static_cast<std::size_t>(disk.n_vertices()), 1.0);
  REQUIRE(assemble_mass(disk).quad(dones) == Approx(std::numbers::pi).margin(2e-3));
}

TEST_CASE("boundary mass with unit weight integrates the perimeter", "[fem]") {
  const TriMesh square = build_mesh(DomainSpec::rectangle(1.0, 1.0, 0.25));
  const std::vector<double> w(square.boundary_edges.size(), 1.0);
  const SparseSymMatrix b = assemble_boundary_mass(square, w);
  const std::vector<double> ones(static_cast<std::size_t>(square.n_vertices()), 1.0);
  REQUIRE(b.quad(ones) == Approx(4.0).epsilon(1e-13));

  // constant weight beta/(1+beta*h0) against the closed form
  const double beta = 2.5, m = 1.7;
  const double h0 = m / 4.0;
  const std::vector<double> wc(square.boundary_edges.size(), beta / (1.0 + beta * h0));
  REQUIRE(assemble_boundary_mass(square, wc).quad(ones) ==
          Approx(beta * 4.0 / (1.0 + beta * m / 4.0)).epsilon(1e-13));
}

TEST_CASE("boundary mass of v = x tends to pi on the unit circle", "[fem]") {
  TriMesh disk = build_mesh(DomainSpec::disk(1.0, 0.2));
  double prev_err = 1e9;
  for (int level = 0; level < 3; ++level) {
    const std::vector<double> w(disk.boundary_edges.size(), 1.0);
    const double val = assemble_boundary_mass(disk, w).quad(nodal(disk, 0.0, 1.0, 0.0));
    const double err = std::abs(val - std::numbers::pi);
    REQUIRE(err < prev_err);
    prev_err = err;
    disk = refine(disk);
  }
  REQUIRE(prev_err < 5e-3);
}

TEST_CASE("negative boundary weights are rejected", "[fem]") {
  const TriMesh square = build_mesh(DomainSpec::rectangle(1.0, 1.0, 0.5));
  std::vector<double> w(square.boundary_edges.size(), 1.0);
  w[2] = -0.25;
  REQUIRE_THROWS_AS(assemble_boundary_mass(square, w), AssemblyError);
}

TEST_CASE("boundary form is exact for piecewise-linear data", "[fem]") {
  const TriMesh hex = build_mesh(DomainSpec::regular_polygon(6, 1.0, 0.5));
  const std::size_t nb = hex.boundary_edges.size();
  auto g = testsupport::rng(31);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<double> w(nb);
    for (auto& x : w) x = testsupport::uniform(g, 0.0, 2.0);
    const auto v = nodal(hex, testsupport::uniform(g, -1.0, 1.0), testsupport::uniform(g, -1.0, 1.0),
                         testsupport::uniform(g, -1.0, 1.0));
    // independent edgewise reference quadrature
    double ref = 0.0;
    for (std::size_t i = 0; i < nb; ++i) {
      const auto& e = hex.boundary_edges[i];
      const double va = v[static_cast<std::size_t>(e.a)];
      const double vb = v[static_cast<std::size_t>(e.b)];
      const double wa = w[i], wb = w[(i + 1) % nb];
      ref += e.len * testsupport::gauss16([&](double t) {
        const double vv = va + (vb - va) * t;
        return (wa + (wb - wa) * t) * vv * vv;
      });
    }
    const double val = assemble_boundary_mass(hex, w).quad(v);
    REQUIRE(val == Approx(ref).epsilon(1e-12));
  }
}

TEST_CASE("boundary form is monotone in the weight", "[fem]") {
  const TriMesh disk = build_mesh(DomainSpec::disk(1.0, 0.3));
  const std::size_t nb = disk.boundary_edges.size();
  auto g = testsupport::rng(41);
  std::vector<double> w1(nb), w2(nb);
  for (std::size_t i = 0; i < nb; ++i) {
    w1[i] = testsupport::uniform(g, 0.0, 1.0);
    w2[i] = w1[i] + testsupport::uniform(g, 0.0, 1.0);
  }
  const auto b1 = assemble_boundary_mass(disk, w1);
  const auto b2 = assemble_boundary_mass(disk, w2);
  std::vector<double> v(static_cast<std::size_t>(disk.n_vertices()));
  for (int trial = 0; trial < 100; ++trial) {
    for (auto& x : v) x = testsupport::uniform(g, -1.0, 1.0);
    REQUIRE(b1.quad(v) <= b2.quad(v) + 1e-13);
  }
}

TEST_CASE("robin boundary assembly matches reference quadrature and the constant-profile closed form",
          "[fem]") {
  const TriMesh disk = build_mesh(DomainSpec::disk(1.0, 0.3));
  const double beta = 1.7;

  // constant profile: rational weight is the constant beta/(1+beta*h0)
  const double h0 = 0.8;
  const auto b_rat = assemble_robin_boundary(disk, BoundaryField::constant(disk, h0), beta);
  const std::vector<double> w(disk.boundary_edges.size(), beta / (1.0 + beta * h0));
  const auto b_pl = assemble_boundary_mass(disk, w);
  auto g = testsupport::rng(51);
  std::vector<double> v(static_cast<std::size_t>(disk.n_vertices()));
  for (auto& x : v) x = testsupport::uniform(g, -1.0, 1.0);
  REQUIRE(b_rat.quad(v) == Approx(b_pl.quad(v)).epsilon(1e-13));

  // varying profile with a mid-edge breakpoint against composite Gauss
  const std::size_t nb = disk.boundary_edges.size();
  std::vector<BoundaryField::EdgeProfile> profs;
  std::vector<std::vector<double>> hvals(nb);
  for (std::size_t i = 0; i < nb; ++i) {
    const double ha = testsupport::uniform(g, 0.0, 2.0);
    const double hm = testsupport::uniform(g, 0.0, 2.0);
    const double hb = testsupport::uniform(g, 0.0, 2.0);
    profs.push_back({disk.boundary_edges[i].len, {{0.0, ha}, {0.37, hm}, {1.0, hb}}});
    hvals[i] = {ha, hm, hb};
  }
  const BoundaryField h{std::move(profs)};
  const auto b = assemble_robin_boundary(disk, h, beta);
  for (auto& x : v) x = testsupport::uniform(g, -1.0, 1.0);
  // integrate the two smooth pieces on either side of the t = 0.37 kink
  double ref = 0.0;
  for (std::size_t i = 0; i < nb; ++i) {
    const auto& e = disk.boundary_edges[i];
    const double va = v[static_cast<std::size_t>(e.a)];
    const double vb = v[static_cast<std::size_t>(e.b)];
    auto integrand = [&](double t) {
      const double vv = va + (vb - va) * t;
      const double ht = t <= 0.37 ? hvals[i][0] + (hvals[i][1] - hvals[i][0]) * (t / 0.37)
                                  : hvals[i][1] + (hvals[i][2] - hvals[i][1]) * ((t - 0.37) / 0.63);
      return beta * vv * vv / (1.0 + beta * ht);
    };
    ref += e.len * 0.37 * testsupport::gauss16_composite([&](double s) { return integrand(0.37 * s); });
    ref += e.len * 0.63 *
           testsupport::gauss16_composite([&](double s) { return integrand(0.37 + 0.63 * s); });
  }
  REQUIRE(b.quad(v) == Approx(ref).epsilon(1e-10));
}

TEST_CASE("rayleigh quotient: constants, homogeneity, zero denominator", "[fem]") {
  const TriMesh disk = build_mesh(DomainSpec::disk(1.0, 0.1));
  const SparseSymMatrix k = assemble_stiffness(disk);
  const SparseSymMatrix m = assemble_mass(disk);
  const double beta = 0.7;
  const std::vector<double> w(disk.boundary_edges.size(), beta);
  const SparseSymMatrix b = assemble_boundary_mass(disk, w);

  const std::vector<double> ones(static_cast<std::size_t>(disk.n_vertices()), 1.0);
  // constants: F = beta |dOmega| / |Omega| which tends to 2 beta on the unit disk
  REQUIRE(rayleigh_quotient(k, m, &b, ones) == Approx(2.0 * beta).margin(1e-2));
  REQUIRE(rayleigh_quotient(k, m, nullptr, ones) == Approx(0.0).margin(1e-11));

  auto g = testsupport::rng(61);
  std::vector<double> v(static_cast<std::size_t>(disk.n_vertices()));
  for (auto& x : v) x = testsupport::uniform(g, -1.0, 1.0);
  const double base = rayleigh_quotient(k, m, &b, v);
  for (double t : {0.5, -3.0, 1e-7, 2e6}) {
    std::vector<double> tv = v;
    insopt::scale(t, tv);
    REQUIRE(rayleigh_quotient(k, m, &b, tv) == Approx(base).epsilon(1e-12));
  }

  const std::vector<double> zero(static_cast<std::size_t>(disk.n_vertices()), 0.0);
  REQUIRE_THROWS_AS(rayleigh_quotient(k, m, &b, zero), std::invalid_argument);
}

TEST_CASE("degenerate triangles abort assembly", "[fem]") {
  TriMesh mesh;
  mesh.vertices = {{0.0, 0.0}, {1.0, 0.0}, {2.0, 1e-16}};
  mesh.triangles = {{0, 1, 2}};
  REQUIRE_THROWS_AS(assemble_stiffness(mesh), AssemblyError);
  REQUIRE_THROWS_AS(assemble_mass(mesh), AssemblyError);
}
