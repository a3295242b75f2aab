// SPDX-License-Identifier: Apache-2.0
#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <filesystem>
#include <fstream>

#include "fracsim/darcy.hpp"
#include "fracsim/mesh_io.hpp"

using namespace fracsim;

namespace {

struct Setup {
  MixedMesh mesh;
  GeometryCache geom;
  std::vector<double> phi;
  std::vector<double> eps;

  explicit Setup(MixedMesh m, double phi0 = 0.2, double eps0 = 1e-2) : mesh(std::move(m)), geom(compute_geometry(mesh)) {
    phi.assign(static_cast<size_t>(mesh.n_tri()), phi0);
    eps.assign(static_cast<size_t>(mesh.n_frac_cell()), eps0);
  }
};

BoundaryConfig channel_bc() {
  BoundaryConfig bc;
  bc.flow_on(BoundarySide::bottom) = {FlowBC::Kind::pressure, 1.0};
  bc.flow_on(BoundarySide::top) = {FlowBC::Kind::pressure, 0.0};
  return bc;
}

BoundaryConfig uniform_pressure_bc(double p) {
  BoundaryConfig bc;
  for (auto side : {BoundarySide::bottom, BoundarySide::right, BoundarySide::top, BoundarySide::left})
    bc.flow_on(side) = {FlowBC::Kind::pressure, p};
  return bc;
}

}  // namespace

TEST_CASE("permeability laws") {
  FlowCoefficients c;
  c.matrix_permeability_ref = 1.0;
  c.matrix_porosity_ref = 0.2;
  REQUIRE(matrix_permeability(0.2, c) == Catch::Approx(1.0));
  REQUIRE(matrix_permeability(0.1, c) == Catch::Approx(0.25));
  c.matrix_permeability_ref = 2.0;
  REQUIRE(matrix_permeability(0.3, c) == Catch::Approx(4.5));
  REQUIRE_THROWS_AS(matrix_permeability(0.0, c), std::invalid_argument);

  FlowCoefficients f;  // reference data: k_{gamma,0} = kappa_{gamma,0} = 1e2, eps_0 = 1e-2
  auto [kg, kap] = fracture_permeabilities(1e-2, f);
  REQUIRE(kg == Catch::Approx(1e2));
  REQUIRE(kap == Catch::Approx(1e2));
  auto sealed = fracture_permeabilities(0.0, f);
  REQUIRE(sealed.first == 0.0);
  REQUIRE(sealed.second == 0.0);
  auto half = fracture_permeabilities(0.5e-2, f);
  REQUIRE(half.first == Catch::Approx(25.0));
  REQUIRE(half.second == Catch::Approx(25.0));
  REQUIRE_THROWS_AS(fracture_permeabilities(-1.0, f), std::invalid_argument);
}

TEST_CASE("uniform Dirichlet pressure gives the constant solution") {
  Setup s(build_unit_square_with_fractures({{{0.1, 0.0}, {0.9, 0.8}}}, 0.2));
  FlowCoefficients coeffs;
  auto sol = assemble_and_solve_darcy(s.mesh, s.geom, s.phi, s.eps, {}, {}, uniform_pressure_bc(1.0), coeffs);
  for (double q : sol.face_flux) REQUIRE(std::abs(q) < 1e-10);
  for (double q : sol.frac_flux) REQUIRE(std::abs(q) < 1e-10);
  for (double p : sol.p_matrix) REQUIRE(p == Catch::Approx(1.0).margin(1e-10));
  for (double p : sol.p_fracture) REQUIRE(p == Catch::Approx(1.0).margin(1e-10));
}

TEST_CASE("channel flow: linear pressure and unit total flux") {
  Setup s(build_unit_square_with_fractures({}, 0.1));
  FlowCoefficients coeffs;  // k = mu = 1 at phi = phi_ref
  auto sol = assemble_and_solve_darcy(s.mesh, s.geom, s.phi, s.eps, {}, {}, channel_bc(), coeffs);

  double inflow = 0.0;
  for (int f = 0; f < s.mesh.n_face(); ++f) {
    const Face& face = s.mesh.faces[static_cast<size_t>(f)];
    if (face.boundary == BoundarySide::bottom) inflow -= sol.face_flux[static_cast<size_t>(f)];
  }
  REQUIRE(inflow == Catch::Approx(1.0).margin(1e-8));
  for (int t = 0; t < s.mesh.n_tri(); ++t) {
    double expected = 1.0 - s.geom.tri_centroid[static_cast<size_t>(t)].y;
    REQUIRE(sol.p_matrix[static_cast<size_t>(t)] == Catch::Approx(expected).margin(1e-9));
  }
}

TEST_CASE("local conservation on the single-fracture scenario mesh") {
  Setup s(build_unit_square_with_fractures({{{0.1, 0.0}, {0.9, 0.8}}}, 0.05));
  FlowCoefficients coeffs;
  auto sol = assemble_and_solve_darcy(s.mesh, s.geom, s.phi, s.eps, {}, {}, channel_bc(), coeffs);
  REQUIRE(max_conservation_residual(s.mesh, s.geom, sol, {}, {}, s.eps, coeffs) < 1e-10);
}

TEST_CASE("sealed coupling: kappa_gamma = 0 kills the exchange fluxes") {
  Setup s(build_unit_square_with_fractures({{{0.1, 0.0}, {0.9, 0.8}}}, 0.1));
  FlowCoefficients coeffs;
  coeffs.frac_normal_permeability_ref = 0.0;  // kappa_gamma(eps) == 0 for all eps
  // the validate() guard forbids this in configs, but the solver must honor it
  auto sol = assemble_and_solve_darcy(s.mesh, s.geom, s.phi, s.eps, {}, {}, channel_bc(), coeffs);
  for (int c = 0; c < s.mesh.n_frac_cell(); ++c) {
    REQUIRE(sol.exchange_into_fracture(s.mesh, c, +1) == 0.0);
    REQUIRE(sol.exchange_into_fracture(s.mesh, c, -1) == 0.0);
  }
}

TEST_CASE("pressure-jump law holds on every fracture side face") {
  Setup s(build_unit_square_with_fractures({{{0.1, 0.0}, {0.9, 0.8}}}, 0.1));
  FlowCoefficients coeffs;
  auto sol = assemble_and_solve_darcy(s.mesh, s.geom, s.phi, s.eps, {}, {}, channel_bc(), coeffs);
  // lambda = kappa/(mu eps) (p_trace - p_gamma), with the trace recovered from
  // the Robin closure; the residual of the momentum row is checked through an
  // independent reconstruction of the trace from the adjacent cell pressure:
  // |mu eps lambda + kappa (p_gamma - p_near)| <= O(h) * scale, and exactly 0
  // with the discrete trace.
  for (int c = 0; c < s.mesh.n_frac_cell(); ++c) {
    auto [kg, kap] = fracture_permeabilities(s.eps[static_cast<size_t>(c)], coeffs);
    for (int side : {+1, -1}) {
      const auto& fc = s.mesh.fracture_cells[static_cast<size_t>(c)];
      int f = side > 0 ? fc.face_plus : fc.face_minus;
      double len = s.geom.face_length[static_cast<size_t>(f)];
      double lambda = sol.face_flux[static_cast<size_t>(f)] / len;
      double trace = sol.p_fracture[static_cast<size_t>(c)] +
                     coeffs.viscosity * s.eps[static_cast<size_t>(c)] / kap * lambda;
      double resid = coeffs.viscosity * s.eps[static_cast<size_t>(c)] * lambda +
                     kap * (sol.p_fracture[static_cast<size_t>(c)] - trace);
      REQUIRE(std::abs(resid) < 1e-12);
      // the implied trace must sit between fracture and cell pressure scales
      double p_cell = sol.p_matrix[static_cast<size_t>(s.mesh.faces[static_cast<size_t>(f)].left)];
      REQUIRE(std::abs(trace - p_cell) < 0.2);
    }
  }
}

TEST_CASE("symmetry: symmetric mesh and data give a symmetric pressure") {
  // structured two-triangle-per-square mesh, symmetric under x -> 1-x
  auto p = std::filesystem::temp_directory_path() / "fracsim_sym.mdmesh";
  {
    std::ofstream out(p);
    out << "mdmesh 1\n";
    const int n = 4;
    for (int j = 0; j <= n; ++j)
      for (int i = 0; i <= n; ++i) out << "v " << static_cast<double>(i) / n << ' ' << static_cast<double>(j) / n << '\n';
    auto id = [&](int i, int j) { return j * (n + 1) + i; };
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        // split toward the center line so the mesh is mirror symmetric
        if (i < n / 2) {
          out << "t " << id(i, j) << ' ' << id(i + 1, j) << ' ' << id(i + 1, j + 1) << '\n';
          out << "t " << id(i, j) << ' ' << id(i + 1, j + 1) << ' ' << id(i, j + 1) << '\n';
        } else {
          out << "t " << id(i, j) << ' ' << id(i + 1, j) << ' ' << id(i, j + 1) << '\n';
          out << "t " << id(i + 1, j) << ' ' << id(i + 1, j + 1) << ' ' << id(i, j + 1) << '\n';
        }
      }
  }
  Setup s(load_mesh(p.string()));
  std::filesystem::remove(p);
  FlowCoefficients coeffs;
  auto sol = assemble_and_solve_darcy(s.mesh, s.geom, s.phi, s.eps, {}, {}, channel_bc(), coeffs);
  // pair each triangle with its mirror image by centroid lookup
  for (int t = 0; t < s.mesh.n_tri(); ++t) {
    Vec2 c = s.geom.tri_centroid[static_cast<size_t>(t)];
    Vec2 mirror{1.0 - c.x, c.y};
    for (int u = 0; u < s.mesh.n_tri(); ++u) {
      if (dist(s.geom.tri_centroid[static_cast<size_t>(u)], mirror) < 1e-12) {
        REQUIRE(sol.p_matrix[static_cast<size_t>(t)] ==
                Catch::Approx(sol.p_matrix[static_cast<size_t>(u)]).margin(1e-10));
      }
    }
  }
}

TEST_CASE("flux continuity on interior non-fracture faces") {
  // RT0 stores one dof per face, so continuity is structural; verify the dof
  // feeds both adjacent cell balances with opposite signs via conservation
  Setup s(build_unit_square_with_fractures({{{0.3, 0.2}, {0.7, 0.8}}}, 0.1));
  FlowCoefficients coeffs;
  auto sol = assemble_and_solve_darcy(s.mesh, s.geom, s.phi, s.eps, {}, {}, channel_bc(), coeffs);
  REQUIRE(max_conservation_residual(s.mesh, s.geom, sol, {}, {}, s.eps, coeffs) < 1e-10);
}

TEST_CASE("manufactured solution converges at first order or better") {
  // p(x,y) = sin(pi x) sin(pi y), k = mu = 1, Dirichlet p = 0 on the boundary:
  // -lap p = 2 pi^2 sin sin, passed through the rate-source slot
  auto exact = [](const Vec2& v) { return std::sin(M_PI * v.x) * std::sin(M_PI * v.y); };
  auto source = [](const Vec2& v) { return 2.0 * M_PI * M_PI * std::sin(M_PI * v.x) * std::sin(M_PI * v.y); };
  FlowCoefficients coeffs;
  std::vector<double> errs, hs;
  for (double h : {0.2, 0.1, 0.05}) {
    Setup s(build_unit_square_with_fractures({}, h));
    std::vector<double> src(static_cast<size_t>(s.mesh.n_tri()));
    for (int t = 0; t < s.mesh.n_tri(); ++t) src[static_cast<size_t>(t)] = source(s.geom.tri_centroid[static_cast<size_t>(t)]);
    auto sol = assemble_and_solve_darcy(s.mesh, s.geom, s.phi, s.eps, src, {}, uniform_pressure_bc(0.0), coeffs);
    double err2 = 0.0;
    for (int t = 0; t < s.mesh.n_tri(); ++t) {
      double d = sol.p_matrix[static_cast<size_t>(t)] - exact(s.geom.tri_centroid[static_cast<size_t>(t)]);
      err2 += d * d * s.geom.tri_area[static_cast<size_t>(t)];
    }
    errs.push_back(std::sqrt(err2));
    hs.push_back(h);
  }
  double rate1 = std::log(errs[0] / errs[1]) / std::log(hs[0] / hs[1]);
  double rate2 = std::log(errs[1] / errs[2]) / std::log(hs[1] / hs[2]);
  INFO("errors " << errs[0] << " " << errs[1] << " " << errs[2] << ", rates " << rate1 << " " << rate2);
  REQUIRE(rate2 >= 0.9);
}

TEST_CASE("pure Neumann data is rejected as singular") {
  Setup s(build_unit_square_with_fractures({}, 0.25));
  BoundaryConfig bc;  // all walls
  FlowCoefficients coeffs;
  REQUIRE_THROWS_AS(assemble_and_solve_darcy(s.mesh, s.geom, s.phi, s.eps, {}, {}, bc, coeffs), SolverError);
}

TEST_CASE("non-finite inputs are rejected") {
  Setup s(build_unit_square_with_fractures({}, 0.25));
  FlowCoefficients coeffs;
  auto bad_phi = s.phi;
  bad_phi[0] = std::nan("");
  REQUIRE_THROWS_AS(assemble_and_solve_darcy(s.mesh, s.geom, bad_phi, s.eps, {}, {}, channel_bc(), coeffs),
                    std::invalid_argument);
}
