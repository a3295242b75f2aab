// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include "fracsim/mesh.hpp"

namespace fracsim {

class MeshParseError : public MeshError {
 public:
  MeshParseError(const std::string& path, int line, const std::string& what)
      : MeshError(path + ":" + std::to_string(line) + ": " + what) {}
};

/// Plain-text mesh format, 0-based indices:
///   mdmesh 1
///   v x y
///   t i j k
///   f i j tag          (boundary-face tag: bottom/top/left/right)
///   frac n i1 ... in   (fracture polyline as vertex ids)
inline MixedMesh load_mesh(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw MeshError("cannot open mesh file: " + path);

  MixedMesh mesh;
  std::map<std::pair<int, int>, BoundarySide> tags;
  std::string line;
  int lineno = 0;

  auto parse_side = [&](const std::string& s) -> BoundarySide {
    if (s == "bottom") return BoundarySide::bottom;
    if (s == "top") return BoundarySide::top;
    if (s == "left") return BoundarySide::left;
    if (s == "right") return BoundarySide::right;
    throw MeshParseError(path, lineno, "unknown boundary tag '" + s + "'");
  };
  auto need_vertex = [&](int v) {
    if (v < 0 || v >= static_cast<int>(mesh.vertices.size()))
      throw MeshParseError(path, lineno, "vertex id " + std::to_string(v) + " out of range");
    return v;
  };

  if (!std::getline(in, line)) throw MeshParseError(path, 1, "empty file");
  ++lineno;
  {
    std::istringstream is(line);
    std::string magic;
    int version = 0;
    if (!(is >> magic >> version) || magic != "mdmesh" || version != 1)
      throw MeshParseError(path, lineno, "expected header 'mdmesh 1'");
  }

  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream is(line);
    std::string kw;
    if (!(is >> kw) || kw[0] == '#') continue;
    if (kw == "v") {
      double x, y;
      if (!(is >> x >> y)) throw MeshParseError(path, lineno, "malformed vertex line");
      mesh.vertices.push_back({x, y});
    } else if (kw == "t") {
      int i, j, k;
      if (!(is >> i >> j >> k)) throw MeshParseError(path, lineno, "malformed triangle line");
      mesh.triangles.push_back({{need_vertex(i), need_vertex(j), need_vertex(k)}});
    } else if (kw == "f") {
      int i, j;
      std::string tag;
      if (!(is >> i >> j >> tag)) throw MeshParseError(path, lineno, "malformed face tag line");
      need_vertex(i);
      need_vertex(j);
      tags[{std::min(i, j), std::max(i, j)}] = parse_side(tag);
    } else if (kw == "frac") {
      int n;
      if (!(is >> n) || n < 2) throw MeshParseError(path, lineno, "malformed fracture line");
      std::vector<int> chain(static_cast<size_t>(n));
      for (int p = 0; p < n; ++p) {
        if (!(is >> chain[static_cast<size_t>(p)])) throw MeshParseError(path, lineno, "fracture line too short");
        need_vertex(chain[static_cast<size_t>(p)]);
      }
      mesh.fracture_polylines.push_back(std::move(chain));
    } else {
      throw MeshParseError(path, lineno, "unknown keyword '" + kw + "'");
    }
  }

  detail::validate_elements(mesh);
  detail::finalize_topology(mesh, &tags);
  detail::validate(mesh);
  return mesh;
}

inline void write_mesh(const MixedMesh& mesh, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw MeshError("cannot write mesh file: " + path);
  out.precision(17);
  out << "mdmesh 1\n";
  for (const auto& p : mesh.vertices) out << "v " << p.x << ' ' << p.y << '\n';
  for (const auto& t : mesh.triangles) out << "t " << t.v[0] << ' ' << t.v[1] << ' ' << t.v[2] << '\n';
  for (const auto& f : mesh.faces)
    if (f.is_domain_boundary()) out << "f " << f.v0 << ' ' << f.v1 << ' ' << to_string(f.boundary) << '\n';
  for (const auto& chain : mesh.fracture_polylines) {
    out << "frac " << chain.size();
    for (int v : chain) out << ' ' << v;
    out << '\n';
  }
}

}  // namespace fracsim
