// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "fracsim/delaunay.hpp"
#include "fracsim/geometry.hpp"

namespace fracsim {

enum class BoundarySide : uint8_t { none = 0, bottom, right, top, left };

inline const char* to_string(BoundarySide s) {
  switch (s) {
    case BoundarySide::bottom: return "bottom";
    case BoundarySide::right: return "right";
    case BoundarySide::top: return "top";
    case BoundarySide::left: return "left";
    default: return "none";
  }
}

struct Triangle {
  std::array<int, 3> v;  // CCW
};

/// A matrix face. Interior faces have both triangles; boundary faces only
/// `left`. Along fractures each geometric edge is duplicated into two side
/// faces (side = +1/-1), each owned by one triangle, with the unit normal
/// pointing out of that triangle into the fracture.
struct Face {
  int v0 = -1, v1 = -1;
  int left = -1;
  int right = -1;
  BoundarySide boundary = BoundarySide::none;
  int fracture_cell = -1;
  int side = 0;  // +1 / -1 for fracture side faces, 0 otherwise

  bool is_interior() const { return right >= 0; }
  bool is_fracture_side() const { return fracture_cell >= 0; }
  bool is_domain_boundary() const { return boundary != BoundarySide::none; }
};

/// 1D fracture cell: one segment of a fracture polyline, geometrically
/// coincident with a (duplicated) matrix edge.
struct FractureCell {
  int v0 = -1, v1 = -1;  // ordered along the parent fracture direction
  int fracture_id = -1;
  int face_plus = -1;   // matrix side face on the n_gamma side
  int face_minus = -1;  // matrix side face opposite n_gamma
};

/// 0D entity where fracture cells from at least two distinct fractures meet.
struct IntersectionPoint {
  int vertex = -1;
  std::vector<int> cells;  // incident fracture-cell ids
};

/// Interface between entities of the 1D fracture grid. `cell_b >= 0` for an
/// interface between two cells of the same fracture; otherwise the end of a
/// fracture at an intersection point, a domain boundary, or an immersed tip.
struct FractureInterface {
  enum class Kind : uint8_t { inner, intersection, boundary, tip };
  Kind kind = Kind::inner;
  int vertex = -1;
  int cell_a = -1;  // flux is oriented out of cell_a through this interface
  int cell_b = -1;
  int intersection = -1;
  BoundarySide boundary = BoundarySide::none;
};

class MeshError : public std::runtime_error {
 public:
  explicit MeshError(const std::string& what) : std::runtime_error(what) {}
};

struct MixedMesh {
  std::vector<Vec2> vertices;
  std::vector<Triangle> triangles;
  std::vector<Face> faces;
  std::vector<FractureCell> fracture_cells;
  std::vector<IntersectionPoint> intersections;
  std::vector<FractureInterface> fracture_interfaces;
  std::vector<std::vector<int>> fracture_polylines;  // vertex chains, one per fracture
  std::vector<std::vector<int>> cell_faces;          // face ids per triangle

  int n_tri() const { return static_cast<int>(triangles.size()); }
  int n_face() const { return static_cast<int>(faces.size()); }
  int n_frac_cell() const { return static_cast<int>(fracture_cells.size()); }
  int n_frac_iface() const { return static_cast<int>(fracture_interfaces.size()); }
  int n_intersection() const { return static_cast<int>(intersections.size()); }
};

struct GeometryCache {
  std::vector<double> tri_area;
  std::vector<Vec2> tri_centroid;
  std::vector<double> face_length;
  std::vector<Vec2> face_normal;  // unit, left -> right (outward from `left` on boundary/side faces)
  std::vector<Vec2> face_centroid;
  std::vector<double> dist_left;   // left-triangle centroid to face line
  std::vector<double> dist_right;  // right-triangle centroid to face line (interior faces)
  std::vector<double> frac_length;
  std::vector<Vec2> frac_tangent;  // unit, along the cell's v0 -> v1 direction
  std::vector<Vec2> frac_normal;   // unit normal n_gamma (plus side)
  double max_tpfa_angle_deg = 0.0;  // worst angle between face normal and centroid connector
  double domain_area = 0.0;
};

namespace detail {

inline int face_key_lookup(const std::map<std::pair<int, int>, int>& m, int a, int b) {
  auto it = m.find({std::min(a, b), std::max(a, b)});
  return it == m.end() ? -1 : it->second;
}

/// Assemble faces, side duplication, fracture cells/interfaces and
/// intersection points for a triangulation whose constrained fracture edges
/// are given as vertex-polylines. Shared by the generator and the loader.
/// `explicit_tags` (optional) carries boundary tags read from a mesh file;
/// untagged boundary faces fall back to unit-square geometric tagging.
inline void finalize_topology(MixedMesh& mesh,
                              const std::map<std::pair<int, int>, BoundarySide>* explicit_tags = nullptr,
                              double coord_tol = 1e-10) {
  // vertex-pair -> adjacent triangles with orientation
  std::map<std::pair<int, int>, std::array<int, 2>> adj;  // (left, right)
  for (int t = 0; t < mesh.n_tri(); ++t) {
    const auto& tri = mesh.triangles[static_cast<size_t>(t)].v;
    for (int e = 0; e < 3; ++e) {
      int a = tri[static_cast<size_t>(e)], b = tri[static_cast<size_t>((e + 1) % 3)];
      auto k = std::make_pair(std::min(a, b), std::max(a, b));
      auto it = adj.find(k);
      if (it == adj.end()) adj[k] = {-1, -1};
      int slot = (a < b) ? 0 : 1;  // triangle is to the LEFT of directed edge a->b (CCW)
      if (adj[k][static_cast<size_t>(slot)] >= 0)
        throw MeshError("edge (" + std::to_string(k.first) + "," + std::to_string(k.second) +
                        "): inconsistent triangle orientation or non-manifold edge");
      adj[k][static_cast<size_t>(slot)] = t;
    }
  }

  // collect constrained (fracture) edges
  std::map<std::pair<int, int>, std::pair<int, int>> frac_edge;  // edge -> (fracture_id, order index)
  for (int fid = 0; fid < static_cast<int>(mesh.fracture_polylines.size()); ++fid) {
    const auto& chain = mesh.fracture_polylines[static_cast<size_t>(fid)];
    for (size_t i = 0; i + 1 < chain.size(); ++i) {
      auto k = std::make_pair(std::min(chain[i], chain[i + 1]), std::max(chain[i], chain[i + 1]));
      if (frac_edge.count(k)) throw MeshError("duplicate fracture edge in polylines");
      frac_edge[k] = {fid, static_cast<int>(i)};
    }
  }

  mesh.faces.clear();
  mesh.fracture_cells.clear();
  mesh.intersections.clear();
  mesh.fracture_interfaces.clear();

  auto classify_boundary = [&](int a, int b) -> BoundarySide {
    const Vec2& pa = mesh.vertices[static_cast<size_t>(a)];
    const Vec2& pb = mesh.vertices[static_cast<size_t>(b)];
    if (std::abs(pa.y) < coord_tol && std::abs(pb.y) < coord_tol) return BoundarySide::bottom;
    if (std::abs(pa.y - 1.0) < coord_tol && std::abs(pb.y - 1.0) < coord_tol) return BoundarySide::top;
    if (std::abs(pa.x) < coord_tol && std::abs(pb.x) < coord_tol) return BoundarySide::left;
    if (std::abs(pa.x - 1.0) < coord_tol && std::abs(pb.x - 1.0) < coord_tol) return BoundarySide::right;
    return BoundarySide::none;
  };

  // fracture cells first (ordered per polyline), so side faces can link back
  std::map<std::pair<int, int>, int> edge_to_cell;
  for (int fid = 0; fid < static_cast<int>(mesh.fracture_polylines.size()); ++fid) {
    const auto& chain = mesh.fracture_polylines[static_cast<size_t>(fid)];
    for (size_t i = 0; i + 1 < chain.size(); ++i) {
      FractureCell c;
      c.v0 = chain[i];
      c.v1 = chain[i + 1];
      c.fracture_id = fid;
      edge_to_cell[{std::min(c.v0, c.v1), std::max(c.v0, c.v1)}] = static_cast<int>(mesh.fracture_cells.size());
      mesh.fracture_cells.push_back(c);
    }
  }

  for (const auto& [k, lr] : adj) {
    auto fe = frac_edge.find(k);
    if (fe == frac_edge.end()) {
      Face f;
      f.v0 = k.first;
      f.v1 = k.second;
      f.left = lr[0];
      f.right = lr[1];
      if (f.left < 0) {  // orient so the existing triangle is `left`
        std::swap(f.v0, f.v1);
        f.left = lr[1];
        f.right = -1;
      }
      if (!f.is_interior()) {
        if (explicit_tags) {
          auto it = explicit_tags->find({std::min(f.v0, f.v1), std::max(f.v0, f.v1)});
          if (it != explicit_tags->end()) f.boundary = it->second;
        }
        if (f.boundary == BoundarySide::none) f.boundary = classify_boundary(f.v0, f.v1);
        if (f.boundary == BoundarySide::none)
          throw MeshError("boundary face (" + std::to_string(f.v0) + "," + std::to_string(f.v1) +
                          ") has no tag and is not on the unit-square boundary");
      }
      mesh.faces.push_back(f);
    } else {
      if (lr[0] < 0 || lr[1] < 0)
        throw MeshError("fracture edge (" + std::to_string(k.first) + "," + std::to_string(k.second) +
                        ") must be interior to the domain");
      int cell = edge_to_cell.at(k);
      auto& fc = mesh.fracture_cells[static_cast<size_t>(cell)];
      // n_gamma: right normal of the cell's own direction v0->v1
      Vec2 ngamma = right_normal(mesh.vertices[static_cast<size_t>(fc.v0)], mesh.vertices[static_cast<size_t>(fc.v1)]);
      Vec2 mid = (mesh.vertices[static_cast<size_t>(fc.v0)] + mesh.vertices[static_cast<size_t>(fc.v1)]) * 0.5;
      for (int s = 0; s < 2; ++s) {
        int tri = lr[static_cast<size_t>(s)];
        Vec2 cen = (mesh.vertices[static_cast<size_t>(mesh.triangles[static_cast<size_t>(tri)].v[0])] +
                    mesh.vertices[static_cast<size_t>(mesh.triangles[static_cast<size_t>(tri)].v[1])] +
                    mesh.vertices[static_cast<size_t>(mesh.triangles[static_cast<size_t>(tri)].v[2])]) /
                   3.0;
        bool plus = dot(cen - mid, ngamma) > 0.0;
        Face f;
        // orient v0->v1 so the face normal (right of direction) points out of
        // `tri` into the fracture
        f.left = tri;
        f.fracture_cell = cell;
        f.side = plus ? +1 : -1;
        if (plus) {  // outward normal of the plus triangle is -n_gamma
          f.v0 = fc.v1;
          f.v1 = fc.v0;
        } else {
          f.v0 = fc.v0;
          f.v1 = fc.v1;
        }
        int fidx = static_cast<int>(mesh.faces.size());
        mesh.faces.push_back(f);
        if (plus)
          fc.face_plus = fidx;
        else
          fc.face_minus = fidx;
      }
    }
  }

  for (const auto& fc : mesh.fracture_cells)
    if (fc.face_plus < 0 || fc.face_minus < 0) throw MeshError("fracture cell missing a side face");

  // intersection points: vertices with incident cells from >= 2 fractures
  std::map<int, std::vector<int>> vertex_cells;
  for (int c = 0; c < mesh.n_frac_cell(); ++c) {
    vertex_cells[mesh.fracture_cells[static_cast<size_t>(c)].v0].push_back(c);
    vertex_cells[mesh.fracture_cells[static_cast<size_t>(c)].v1].push_back(c);
  }
  std::map<int, int> vertex_to_intersection;
  for (const auto& [v, cells] : vertex_cells) {
    std::set<int> fids;
    for (int c : cells) fids.insert(mesh.fracture_cells[static_cast<size_t>(c)].fracture_id);
    if (fids.size() >= 2) {
      vertex_to_intersection[v] = static_cast<int>(mesh.intersections.size());
      mesh.intersections.push_back({v, cells});
    }
  }

  // 1D interfaces
  auto boundary_side_of_vertex = [&](int v) -> BoundarySide {
    const Vec2& p = mesh.vertices[static_cast<size_t>(v)];
    if (std::abs(p.y) < coord_tol) return BoundarySide::bottom;
    if (std::abs(p.y - 1.0) < coord_tol) return BoundarySide::top;
    if (std::abs(p.x) < coord_tol) return BoundarySide::left;
    if (std::abs(p.x - 1.0) < coord_tol) return BoundarySide::right;
    return BoundarySide::none;
  };
  for (const auto& [v, cells] : vertex_cells) {
    auto xit = vertex_to_intersection.find(v);
    if (xit != vertex_to_intersection.end()) {
      for (int c : cells) {
        FractureInterface fi;
        fi.kind = FractureInterface::Kind::intersection;
        fi.vertex = v;
        fi.cell_a = c;
        fi.intersection = xit->second;
        mesh.fracture_interfaces.push_back(fi);
      }
      continue;
    }
    if (cells.size() == 2) {
      FractureInterface fi;
      fi.kind = FractureInterface::Kind::inner;
      fi.vertex = v;
      // orient out of the cell for which v is the far end (v1)
      int a = cells[0], b = cells[1];
      if (mesh.fracture_cells[static_cast<size_t>(a)].v1 != v) std::swap(a, b);
      fi.cell_a = a;
      fi.cell_b = b;
      mesh.fracture_interfaces.push_back(fi);
    } else if (cells.size() == 1) {
      FractureInterface fi;
      fi.vertex = v;
      fi.cell_a = cells[0];
      fi.boundary = boundary_side_of_vertex(v);
      fi.kind = (fi.boundary == BoundarySide::none) ? FractureInterface::Kind::tip : FractureInterface::Kind::boundary;
      mesh.fracture_interfaces.push_back(fi);
    } else {
      throw MeshError("vertex " + std::to_string(v) + ": more than two cells of one fracture meet");
    }
  }

  mesh.cell_faces.assign(static_cast<size_t>(mesh.n_tri()), {});
  for (int f = 0; f < mesh.n_face(); ++f) {
    const Face& face = mesh.faces[static_cast<size_t>(f)];
    mesh.cell_faces[static_cast<size_t>(face.left)].push_back(f);
    if (face.right >= 0) mesh.cell_faces[static_cast<size_t>(face.right)].push_back(f);
  }
  for (int t = 0; t < mesh.n_tri(); ++t)
    if (mesh.cell_faces[static_cast<size_t>(t)].size() != 3)
      throw MeshError("triangle " + std::to_string(t) + ": expected 3 faces");
}

/// Element-level checks that must pass before topology can be derived.
inline void validate_elements(const MixedMesh& mesh) {
  const int nv = static_cast<int>(mesh.vertices.size());
  for (int t = 0; t < mesh.n_tri(); ++t) {
    const auto& tri = mesh.triangles[static_cast<size_t>(t)].v;
    for (int v : tri)
      if (v < 0 || v >= nv) throw MeshError("triangle " + std::to_string(t) + ": vertex id out of range");
    double a2 = orient2d(mesh.vertices[static_cast<size_t>(tri[0])], mesh.vertices[static_cast<size_t>(tri[1])],
                         mesh.vertices[static_cast<size_t>(tri[2])]);
    if (a2 <= 0.0) throw MeshError("triangle " + std::to_string(t) + ": nonpositive area");
  }
}

inline void validate(const MixedMesh& mesh) {
  validate_elements(mesh);
  for (int c = 0; c < mesh.n_frac_cell(); ++c) {
    const auto& fc = mesh.fracture_cells[static_cast<size_t>(c)];
    if (dist(mesh.vertices[static_cast<size_t>(fc.v0)], mesh.vertices[static_cast<size_t>(fc.v1)]) <= 0.0)
      throw MeshError("fracture cell " + std::to_string(c) + ": zero length");
    const Face& fp = mesh.faces[static_cast<size_t>(fc.face_plus)];
    const Face& fm = mesh.faces[static_cast<size_t>(fc.face_minus)];
    if (fp.left == fm.left) throw MeshError("fracture cell " + std::to_string(c) + ": sides share a triangle");
  }
}

}  // namespace detail

/// Per fracture cell, the interfaces at its two ends (index 0: at v0,
/// index 1: at v1) and the orientation sign of each interface dof relative to
/// the cell tangent (+1 when the dof points along v0->v1).
struct FractureCellEnds {
  std::array<int, 2> iface{-1, -1};
  std::array<double, 2> sign{1.0, 1.0};
};

inline std::vector<FractureCellEnds> fracture_cell_ends(const MixedMesh& mesh) {
  std::vector<FractureCellEnds> ends(static_cast<size_t>(mesh.n_frac_cell()));
  for (int i = 0; i < mesh.n_frac_iface(); ++i) {
    const auto& fi = mesh.fracture_interfaces[static_cast<size_t>(i)];
    const auto& ca = mesh.fracture_cells[static_cast<size_t>(fi.cell_a)];
    if (fi.kind == FractureInterface::Kind::inner) {
      ends[static_cast<size_t>(fi.cell_a)].iface[1] = i;
      ends[static_cast<size_t>(fi.cell_a)].sign[1] = 1.0;
      ends[static_cast<size_t>(fi.cell_b)].iface[0] = i;
      ends[static_cast<size_t>(fi.cell_b)].sign[0] = 1.0;
    } else if (fi.vertex == ca.v1) {
      ends[static_cast<size_t>(fi.cell_a)].iface[1] = i;
      ends[static_cast<size_t>(fi.cell_a)].sign[1] = 1.0;
    } else {
      ends[static_cast<size_t>(fi.cell_a)].iface[0] = i;
      ends[static_cast<size_t>(fi.cell_a)].sign[0] = -1.0;  // dof points out of the cell, against the tangent
    }
  }
  for (const auto& e : ends)
    if (e.iface[0] < 0 || e.iface[1] < 0) throw MeshError("fracture cell missing an end interface");
  return ends;
}

inline GeometryCache compute_geometry(const MixedMesh& mesh) {
  GeometryCache g;
  const auto& V = mesh.vertices;
  g.tri_area.resize(static_cast<size_t>(mesh.n_tri()));
  g.tri_centroid.resize(static_cast<size_t>(mesh.n_tri()));
  for (int t = 0; t < mesh.n_tri(); ++t) {
    const auto& tv = mesh.triangles[static_cast<size_t>(t)].v;
    const Vec2 &a = V[static_cast<size_t>(tv[0])], &b = V[static_cast<size_t>(tv[1])], &c = V[static_cast<size_t>(tv[2])];
    g.tri_area[static_cast<size_t>(t)] = triangle_area(a, b, c);
    g.tri_centroid[static_cast<size_t>(t)] = (a + b + c) / 3.0;
    g.domain_area += g.tri_area[static_cast<size_t>(t)];
  }

  g.face_length.resize(static_cast<size_t>(mesh.n_face()));
  g.face_normal.resize(static_cast<size_t>(mesh.n_face()));
  g.face_centroid.resize(static_cast<size_t>(mesh.n_face()));
  g.dist_left.resize(static_cast<size_t>(mesh.n_face()));
  g.dist_right.assign(static_cast<size_t>(mesh.n_face()), 0.0);
  for (int f = 0; f < mesh.n_face(); ++f) {
    const Face& face = mesh.faces[static_cast<size_t>(f)];
    const Vec2 &a = V[static_cast<size_t>(face.v0)], &b = V[static_cast<size_t>(face.v1)];
    g.face_length[static_cast<size_t>(f)] = dist(a, b);
    g.face_normal[static_cast<size_t>(f)] = right_normal(a, b);
    g.face_centroid[static_cast<size_t>(f)] = (a + b) * 0.5;
    auto line_dist = [&](int tri) {
      const Vec2& cen = g.tri_centroid[static_cast<size_t>(tri)];
      return std::abs(dot(cen - a, g.face_normal[static_cast<size_t>(f)]));
    };
    g.dist_left[static_cast<size_t>(f)] = line_dist(face.left);
    if (g.dist_left[static_cast<size_t>(f)] <= 0.0) throw MeshError("degenerate centroid-face distance");
    // TPFA admissibility report: angle between the face normal and the
    // connector of the two cell centroids (for a fracture side face the 1D
    // cell midpoint coincides with the face centroid)
    if (face.right >= 0 || face.is_fracture_side()) {
      Vec2 other = (face.right >= 0) ? g.tri_centroid[static_cast<size_t>(face.right)] : g.face_centroid[static_cast<size_t>(f)];
      if (face.right >= 0) g.dist_right[static_cast<size_t>(f)] = line_dist(face.right);
      Vec2 conn = other - g.tri_centroid[static_cast<size_t>(face.left)];
      double ang_num = std::abs(dot(conn / norm(conn), g.face_normal[static_cast<size_t>(f)]));
      double ang = std::acos(std::min(1.0, ang_num)) * 180.0 / M_PI;
      g.max_tpfa_angle_deg = std::max(g.max_tpfa_angle_deg, ang);
    }
  }

  g.frac_length.resize(static_cast<size_t>(mesh.n_frac_cell()));
  g.frac_tangent.resize(static_cast<size_t>(mesh.n_frac_cell()));
  g.frac_normal.resize(static_cast<size_t>(mesh.n_frac_cell()));
  for (int c = 0; c < mesh.n_frac_cell(); ++c) {
    const auto& fc = mesh.fracture_cells[static_cast<size_t>(c)];
    const Vec2 &a = V[static_cast<size_t>(fc.v0)], &b = V[static_cast<size_t>(fc.v1)];
    g.frac_length[static_cast<size_t>(c)] = dist(a, b);
    g.frac_tangent[static_cast<size_t>(c)] = (b - a) / g.frac_length[static_cast<size_t>(c)];
    g.frac_normal[static_cast<size_t>(c)] = right_normal(a, b);
  }
  return g;
}

/// Conforming triangulation of (0,1)^2 honoring the given fracture segments.
/// Fracture cells are created on every sub-segment; 0D intersection points
/// where segments cross; boundary faces tagged bottom/top/left/right.
inline MixedMesh build_unit_square_with_fractures(const std::vector<std::pair<Vec2, Vec2>>& fracture_segments,
                                                  double target_h) {
  if (!(target_h > 0.0)) throw std::invalid_argument("target_h must be positive");
  const double tol = 1e-10;
  for (const auto& [a, b] : fracture_segments) {
    if (dist(a, b) < tol) throw std::invalid_argument("degenerate (zero-length) fracture segment");
    for (const Vec2& p : {a, b})
      if (p.x < -tol || p.x > 1.0 + tol || p.y < -tol || p.y > 1.0 + tol)
        throw std::invalid_argument("fracture segment outside the unit square");
  }

  MixedMesh mesh;
  const double merge_tol = 1e-9;
  std::vector<Vec2> pts;
  auto add_point = [&](Vec2 p) -> int {
    p.x = std::min(1.0, std::max(0.0, p.x));
    p.y = std::min(1.0, std::max(0.0, p.y));
    for (int i = 0; i < static_cast<int>(pts.size()); ++i)
      if (dist(pts[static_cast<size_t>(i)], p) < merge_tol) return i;
    pts.push_back(p);
    return static_cast<int>(pts.size()) - 1;
  };

  // breakpoints on each segment: endpoints + intersections with other segments
  const int ns = static_cast<int>(fracture_segments.size());
  std::vector<std::vector<double>> breaks(static_cast<size_t>(ns));
  for (int i = 0; i < ns; ++i) breaks[static_cast<size_t>(i)] = {0.0, 1.0};
  for (int i = 0; i < ns; ++i)
    for (int j = i + 1; j < ns; ++j) {
      auto hit = segment_intersection(fracture_segments[static_cast<size_t>(i)].first,
                                      fracture_segments[static_cast<size_t>(i)].second,
                                      fracture_segments[static_cast<size_t>(j)].first,
                                      fracture_segments[static_cast<size_t>(j)].second);
      if (hit) {
        breaks[static_cast<size_t>(i)].push_back(hit->first);
        breaks[static_cast<size_t>(j)].push_back(hit->second);
      }
    }

  // constraint chains: subdivide each sub-segment to ~target_h
  std::vector<std::vector<int>> chains(static_cast<size_t>(ns));
  for (int i = 0; i < ns; ++i) {
    auto& bk = breaks[static_cast<size_t>(i)];
    std::sort(bk.begin(), bk.end());
    bk.erase(std::unique(bk.begin(), bk.end(), [](double a, double b) { return std::abs(a - b) < 1e-9; }), bk.end());
    const Vec2 &p0 = fracture_segments[static_cast<size_t>(i)].first, &p1 = fracture_segments[static_cast<size_t>(i)].second;
    double seg_len = dist(p0, p1);
    auto at = [&](double t) { return p0 + (p1 - p0) * t; };
    std::vector<int>& chain = chains[static_cast<size_t>(i)];
    chain.push_back(add_point(at(bk.front())));
    for (size_t s = 0; s + 1 < bk.size(); ++s) {
      double t0 = bk[s], t1 = bk[s + 1];
      int pieces = std::max(1, static_cast<int>(std::ceil((t1 - t0) * seg_len / target_h)));
      for (int p = 1; p <= pieces; ++p) chain.push_back(add_point(at(t0 + (t1 - t0) * p / pieces)));
    }
    chain.erase(std::unique(chain.begin(), chain.end()), chain.end());
    if (chain.size() < 2) throw std::invalid_argument("fracture segment collapsed during subdivision");
  }
  const int n_constraint = static_cast<int>(pts.size());

  // rail points offset on both sides of each fracture keep the near-fracture
  // triangles well shaped for TPFA
  int n = std::max(2, static_cast<int>(std::lround(1.0 / target_h)));
  double h = 1.0 / n;
  auto near_other_constraint = [&](const Vec2& p, double vtx_r, double seg_r) {
    for (int k = 0; k < n_constraint; ++k)
      if (dist(p, pts[static_cast<size_t>(k)]) < vtx_r) return true;
    for (int s = 0; s < ns; ++s) {
      const auto& seg = fracture_segments[static_cast<size_t>(s)];
      if (point_segment_distance(p, seg.first, seg.second) < seg_r) return true;
    }
    return false;
  };
  for (int s = 0; s < ns; ++s) {
    const auto& chain = chains[static_cast<size_t>(s)];
    const auto& seg = fracture_segments[static_cast<size_t>(s)];
    Vec2 nrm = right_normal(seg.first, seg.second);
    for (size_t i = 0; i + 1 < chain.size(); ++i) {
      Vec2 mid = (pts[static_cast<size_t>(chain[i])] + pts[static_cast<size_t>(chain[i + 1])]) * 0.5;
      for (double side : {+0.5, -0.5}) {
        Vec2 p = mid + nrm * (side * h);
        if (p.x < 0.3 * h || p.x > 1.0 - 0.3 * h || p.y < 0.3 * h || p.y > 1.0 - 0.3 * h) continue;
        if (near_other_constraint(p, 0.45 * h, 0.4 * h)) continue;
        add_point(p);
      }
    }
  }
  const int n_rail_end = static_cast<int>(pts.size());

  // background grid, dropping points crowding the constraints or the rails
  auto jitter = [&](int i, int j, int salt) {
    uint64_t x = 0x9e3779b97f4a7c15ull * (static_cast<uint64_t>(i) + 1) +
                 0xbf58476d1ce4e5b9ull * (static_cast<uint64_t>(j) + 1) + static_cast<uint64_t>(salt);
    x ^= x >> 30;
    x *= 0xbf58476d1ce4e5b9ull;
    x ^= x >> 27;
    return (static_cast<double>(x % 20001) / 10000.0 - 1.0) * 1e-4 * h;
  };
  std::vector<char> movable(pts.size(), 0);
  for (int j = 0; j <= n; ++j)
    for (int i = 0; i <= n; ++i) {
      Vec2 p{i * h, j * h};
      bool interior = i > 0 && i < n && j > 0 && j < n;
      bool corner = (i == 0 || i == n) && (j == 0 || j == n);
      if (interior) p = p + Vec2{jitter(i, j, 1), jitter(i, j, 2)};
      bool keep = true;
      for (int k = 0; k < n_constraint && keep; ++k)
        if (dist(p, pts[static_cast<size_t>(k)]) < 0.5 * h) keep = false;
      if (!corner && interior) {
        for (int k = n_constraint; k < n_rail_end && keep; ++k)
          if (dist(p, pts[static_cast<size_t>(k)]) < 0.45 * h) keep = false;
        for (int s = 0; s < ns && keep; ++s) {
          const auto& seg = fracture_segments[static_cast<size_t>(s)];
          if (point_segment_distance(p, seg.first, seg.second) < 0.8 * h) keep = false;
        }
      }
      if (!keep) continue;
      size_t before = pts.size();
      int id = add_point(p);
      if (pts.size() > before) {
        movable.resize(pts.size(), 0);
        // 1: free, 2..5: slide along the left/right/bottom/top side
        char kind = 0;
        if (interior)
          kind = 1;
        else if (!corner)
          kind = (i == 0) ? 2 : (i == n) ? 3 : (j == 0) ? 4 : 5;
        movable[static_cast<size_t>(id)] = kind;
      }
    }
  movable.resize(pts.size(), 0);

  auto triangulate = [&]() {
    DelaunayTriangulator dt(pts);
    for (const auto& chain : chains)
      for (size_t i = 0; i + 1 < chain.size(); ++i)
        if (!dt.insert_constraint(chain[i], chain[i + 1]))
          throw MeshError("failed to recover fracture edge in triangulation");
    return dt.triangles();
  };

  // a few Lloyd-style smoothing passes on the movable background points keep
  // the TPFA distortion low near the constraints
  std::vector<std::array<int, 3>> tris;
  for (int pass = 0; pass < 3; ++pass) {
    tris = triangulate();
    if (pass == 2) break;
    std::vector<Vec2> sum(pts.size(), Vec2{0.0, 0.0});
    std::vector<int> cnt(pts.size(), 0);
    for (const auto& t : tris)
      for (int e = 0; e < 3; ++e) {
        int a = t[static_cast<size_t>(e)], b = t[static_cast<size_t>((e + 1) % 3)];
        sum[static_cast<size_t>(a)] = sum[static_cast<size_t>(a)] + pts[static_cast<size_t>(b)];
        sum[static_cast<size_t>(b)] = sum[static_cast<size_t>(b)] + pts[static_cast<size_t>(a)];
        ++cnt[static_cast<size_t>(a)];
        ++cnt[static_cast<size_t>(b)];
      }
    for (size_t v = 0; v < pts.size(); ++v) {
      if (!movable[v] || cnt[v] == 0) continue;
      Vec2 avg = sum[v] / static_cast<double>(cnt[v]);
      Vec2 cand = pts[v] * 0.3 + avg * 0.7;
      switch (movable[v]) {
        case 1:
          cand.x = std::min(1.0 - 0.2 * h, std::max(0.2 * h, cand.x));
          cand.y = std::min(1.0 - 0.2 * h, std::max(0.2 * h, cand.y));
          break;
        case 2: cand.x = 0.0; break;
        case 3: cand.x = 1.0; break;
        case 4: cand.y = 0.0; break;
        case 5: cand.y = 1.0; break;
        default: break;
      }
      if (movable[v] >= 2) {  // keep sliding points strictly between the corners
        cand.x = (movable[v] >= 4) ? std::min(1.0 - 0.3 * h, std::max(0.3 * h, cand.x)) : cand.x;
        cand.y = (movable[v] <= 3) ? std::min(1.0 - 0.3 * h, std::max(0.3 * h, cand.y)) : cand.y;
      }
      bool ok = true;
      for (int k = 0; k < n_rail_end && ok; ++k)
        if (dist(cand, pts[static_cast<size_t>(k)]) < 0.4 * h) ok = false;
      if (ok) pts[v] = cand;
    }
  }

  mesh.vertices = pts;
  for (const auto& t : tris) mesh.triangles.push_back({t});
  mesh.fracture_polylines = chains;
  detail::finalize_topology(mesh);
  detail::validate(mesh);
  return mesh;
}

}  // namespace fracsim
