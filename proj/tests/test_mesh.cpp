// SPDX-License-Identifier: Apache-2.0
#include <catch2/catch_amalgamated.hpp>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>

#include "fracsim/mesh.hpp"
#include "fracsim/mesh_io.hpp"

using namespace fracsim;

namespace {

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / name;
}

MixedMesh two_triangle_square() {
  auto p = temp_file("fracsim_two_tri.mdmesh");
  std::ofstream out(p);
  out << "mdmesh 1\n"
      << "v 0 0\nv 1 0\nv 1 1\nv 0 1\n"
      << "t 0 1 2\nt 0 2 3\n";
  out.close();
  return load_mesh(p.string());
}

}  // namespace

TEST_CASE("unit square without fractures partitions the domain area") {
  auto mesh = build_unit_square_with_fractures({}, 0.5);
  auto geom = compute_geometry(mesh);
  REQUIRE(geom.domain_area == Catch::Approx(1.0).margin(1e-12));
  REQUIRE(mesh.n_frac_cell() == 0);
  REQUIRE(mesh.n_intersection() == 0);
}

TEST_CASE("single fracture cells cover the segment length") {
  auto mesh = build_unit_square_with_fractures({{{0.1, 0.0}, {0.9, 0.8}}}, 0.1);
  auto geom = compute_geometry(mesh);
  double len = 0.0;
  for (int c = 0; c < mesh.n_frac_cell(); ++c) len += geom.frac_length[static_cast<size_t>(c)];
  REQUIRE(len == Catch::Approx(1.1313708498984762).margin(1e-9));
  REQUIRE(geom.domain_area == Catch::Approx(1.0).margin(1e-12));

  SECTION("fracture conformity: every fracture cell is a triangle edge") {
    std::set<std::pair<int, int>> edges;
    for (const auto& t : mesh.triangles)
      for (int e = 0; e < 3; ++e)
        edges.insert({std::min(t.v[static_cast<size_t>(e)], t.v[static_cast<size_t>((e + 1) % 3)]),
                      std::max(t.v[static_cast<size_t>(e)], t.v[static_cast<size_t>((e + 1) % 3)])});
    for (const auto& fc : mesh.fracture_cells)
      REQUIRE(edges.count({std::min(fc.v0, fc.v1), std::max(fc.v0, fc.v1)}) == 1);
  }

  SECTION("side faces duplicate the geometry with distinct triangles") {
    for (const auto& fc : mesh.fracture_cells) {
      const Face& fp = mesh.faces[static_cast<size_t>(fc.face_plus)];
      const Face& fm = mesh.faces[static_cast<size_t>(fc.face_minus)];
      REQUIRE(fp.left != fm.left);
      std::set<int> a{fp.v0, fp.v1}, b{fm.v0, fm.v1}, c{fc.v0, fc.v1};
      REQUIRE(a == c);
      REQUIRE(b == c);
    }
  }

  SECTION("boundary tip of the fracture is tagged bottom") {
    int n_boundary_tips = 0;
    for (const auto& fi : mesh.fracture_interfaces)
      if (fi.kind == FractureInterface::Kind::boundary) {
        ++n_boundary_tips;
        REQUIRE(fi.boundary == BoundarySide::bottom);
      }
    REQUIRE(n_boundary_tips == 1);
  }
}

TEST_CASE("two crossing segments create one intersection with 4 incident cells") {
  auto mesh = build_unit_square_with_fractures({{{0.2, 0.2}, {0.8, 0.8}}, {{0.2, 0.8}, {0.8, 0.2}}}, 0.1);
  REQUIRE(mesh.n_intersection() == 1);
  REQUIRE(mesh.intersections[0].cells.size() == 4);
  const Vec2& p = mesh.vertices[static_cast<size_t>(mesh.intersections[0].vertex)];
  REQUIRE(p.x == Catch::Approx(0.5).margin(1e-9));
  REQUIRE(p.y == Catch::Approx(0.5).margin(1e-9));
}

TEST_CASE("generator rejects invalid input") {
  REQUIRE_THROWS_AS(build_unit_square_with_fractures({}, 0.0), std::invalid_argument);
  REQUIRE_THROWS_AS(build_unit_square_with_fractures({{{0.3, 0.3}, {0.3, 0.3}}}, 0.1), std::invalid_argument);
  REQUIRE_THROWS_AS(build_unit_square_with_fractures({{{0.5, 0.5}, {1.5, 0.5}}}, 0.1), std::invalid_argument);
}

TEST_CASE("geometry cache basics on a hand-built mesh") {
  auto mesh = two_triangle_square();
  auto geom = compute_geometry(mesh);
  REQUIRE(mesh.n_tri() == 2);
  REQUIRE(geom.tri_area[0] == Catch::Approx(0.5).margin(1e-15));
  REQUIRE(geom.domain_area == Catch::Approx(1.0).margin(1e-15));

  SECTION("bottom face normal points away from its left triangle") {
    for (int f = 0; f < mesh.n_face(); ++f) {
      const Face& face = mesh.faces[static_cast<size_t>(f)];
      if (face.boundary != BoundarySide::bottom) continue;
      REQUIRE(geom.face_normal[static_cast<size_t>(f)].x == Catch::Approx(0.0).margin(1e-15));
      REQUIRE(geom.face_normal[static_cast<size_t>(f)].y == Catch::Approx(-1.0).margin(1e-15));
    }
  }
}

TEST_CASE("closed-cell identity: outward normals weighted by length sum to zero") {
  auto mesh = build_unit_square_with_fractures({{{0.1, 0.0}, {0.9, 0.8}}}, 0.2);
  auto geom = compute_geometry(mesh);
  for (int t = 0; t < mesh.n_tri(); ++t) {
    Vec2 acc{0.0, 0.0};
    for (int f : mesh.cell_faces[static_cast<size_t>(t)]) {
      double sgn = (mesh.faces[static_cast<size_t>(f)].left == t) ? 1.0 : -1.0;
      acc = acc + geom.face_normal[static_cast<size_t>(f)] * (sgn * geom.face_length[static_cast<size_t>(f)]);
    }
    REQUIRE(std::abs(acc.x) < 1e-12);
    REQUIRE(std::abs(acc.y) < 1e-12);
  }
}

TEST_CASE("TPFA distortion stays below the configured bound") {
  auto mesh = build_unit_square_with_fractures({{{0.1, 0.0}, {0.9, 0.8}}}, 0.05);
  auto geom = compute_geometry(mesh);
  REQUIRE(geom.max_tpfa_angle_deg < 30.0);
}

TEST_CASE("mesh file round-trip preserves connectivity and coordinates") {
  auto mesh = build_unit_square_with_fractures({{{0.2, 0.2}, {0.8, 0.8}}, {{0.2, 0.8}, {0.8, 0.2}}}, 0.2);
  auto p = temp_file("fracsim_roundtrip.mdmesh");
  write_mesh(mesh, p.string());
  auto loaded = load_mesh(p.string());
  REQUIRE(loaded.vertices.size() == mesh.vertices.size());
  REQUIRE(loaded.triangles.size() == mesh.triangles.size());
  for (size_t i = 0; i < mesh.vertices.size(); ++i) {
    REQUIRE(loaded.vertices[i].x == mesh.vertices[i].x);
    REQUIRE(loaded.vertices[i].y == mesh.vertices[i].y);
  }
  for (size_t i = 0; i < mesh.triangles.size(); ++i) REQUIRE(loaded.triangles[i].v == mesh.triangles[i].v);
  REQUIRE(loaded.fracture_polylines == mesh.fracture_polylines);
  REQUIRE(loaded.n_frac_cell() == mesh.n_frac_cell());
  REQUIRE(loaded.n_intersection() == mesh.n_intersection());
  std::filesystem::remove(p);
}

TEST_CASE("loader reports malformed files with line numbers") {
  auto p = temp_file("fracsim_bad.mdmesh");

  SECTION("negative-area triangle is an invariant violation naming the entity") {
    std::ofstream out(p);
    out << "mdmesh 1\nv 0 0\nv 1 0\nv 0 1\nt 0 2 1\n";
    out.close();
    REQUIRE_THROWS_WITH(load_mesh(p.string()), Catch::Matchers::ContainsSubstring("triangle 0") &&
                                                   Catch::Matchers::ContainsSubstring("nonpositive area"));
  }
  SECTION("nonexistent vertex id is a parse error with the line number") {
    std::ofstream out(p);
    out << "mdmesh 1\nv 0 0\nv 1 0\nv 0 1\nt 0 1 7\n";
    out.close();
    REQUIRE_THROWS_WITH(load_mesh(p.string()), Catch::Matchers::ContainsSubstring(":5:"));
  }
  SECTION("bad header") {
    std::ofstream out(p);
    out << "notamesh\n";
    out.close();
    REQUIRE_THROWS_AS(load_mesh(p.string()), MeshParseError);
  }
  std::filesystem::remove(p);
}
