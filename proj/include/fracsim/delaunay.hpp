// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <map>
#include <set>
#include <stdexcept>
#include <vector>

#include "fracsim/geometry.hpp"

namespace fracsim {

/// Incremental Bowyer-Watson Delaunay triangulation with constrained-edge
/// recovery by flipping (Sloan). Points are expected to be well separated
/// relative to the domain scale; predicates use a long double fallback.
class DelaunayTriangulator {
 public:
  explicit DelaunayTriangulator(const std::vector<Vec2>& points) : pts_(points), n_input_(static_cast<int>(points.size())) {
    if (points.size() < 3) throw std::invalid_argument("triangulation needs at least 3 points");
    build();
  }

  /// Force edge (a,b) to appear in the triangulation; returns false if it
  /// cannot be recovered (e.g. a third vertex lies on the open segment).
  bool insert_constraint(int a, int b) {
    for (int pass = 0; pass < 10000; ++pass) {
      if (has_edge(a, b)) return true;
      if (!flip_one_crossing(a, b)) return false;
    }
    return has_edge(a, b);
  }

  /// Triangles (CCW vertex ids) excluding any touching the super-triangle.
  std::vector<std::array<int, 3>> triangles() const {
    std::vector<std::array<int, 3>> out;
    for (const auto& t : tris_) {
      if (!t.alive) continue;
      if (t.v[0] >= n_input_ || t.v[1] >= n_input_ || t.v[2] >= n_input_) continue;
      out.push_back({t.v[0], t.v[1], t.v[2]});
    }
    return out;
  }

 private:
  struct Tri {
    std::array<int, 3> v;
    bool alive = true;
  };

  std::vector<Vec2> pts_;
  int n_input_ = 0;
  std::vector<Tri> tris_;
  // undirected edge -> alive triangle ids (1 or 2)
  std::map<std::pair<int, int>, std::vector<int>> edge_tris_;

  static std::pair<int, int> key(int a, int b) { return {std::min(a, b), std::max(a, b)}; }

  const Vec2& pt(int i) const { return pts_[static_cast<size_t>(i)]; }

  void link(int tid) {
    const auto& t = tris_[static_cast<size_t>(tid)];
    for (int e = 0; e < 3; ++e) edge_tris_[key(t.v[e], t.v[(e + 1) % 3])].push_back(tid);
  }

  void unlink(int tid) {
    const auto& t = tris_[static_cast<size_t>(tid)];
    for (int e = 0; e < 3; ++e) {
      auto& vec = edge_tris_[key(t.v[e], t.v[(e + 1) % 3])];
      vec.erase(std::remove(vec.begin(), vec.end(), tid), vec.end());
      if (vec.empty()) edge_tris_.erase(key(t.v[e], t.v[(e + 1) % 3]));
    }
  }

  int add_tri(int a, int b, int c) {
    if (orient2d(pt(a), pt(b), pt(c)) < 0) std::swap(b, c);
    tris_.push_back({{a, b, c}, true});
    int tid = static_cast<int>(tris_.size()) - 1;
    link(tid);
    return tid;
  }

  void remove_tri(int tid) {
    unlink(tid);
    tris_[static_cast<size_t>(tid)].alive = false;
  }

  void build() {
    double lo = 1e300, hi = -1e300;
    for (const auto& p : pts_) {
      lo = std::min({lo, p.x, p.y});
      hi = std::max({hi, p.x, p.y});
    }
    double span = std::max(hi - lo, 1.0);
    int s0 = static_cast<int>(pts_.size());
    pts_.push_back({lo - 37.0 * span, lo - 31.0 * span});
    pts_.push_back({hi + 41.0 * span, lo - 29.0 * span});
    pts_.push_back({0.5 * (lo + hi), hi + 43.0 * span});
    add_tri(s0, s0 + 1, s0 + 2);

    for (int i = 0; i < s0; ++i) insert_point(i);
  }

  void insert_point(int pi) {
    // collect all triangles whose circumcircle contains the point
    std::vector<int> bad;
    for (int tid = 0; tid < static_cast<int>(tris_.size()); ++tid) {
      const auto& t = tris_[static_cast<size_t>(tid)];
      if (!t.alive) continue;
      if (incircle(pt(t.v[0]), pt(t.v[1]), pt(t.v[2]), pt(pi)) > 0) bad.push_back(tid);
    }
    if (bad.empty()) throw std::runtime_error("Delaunay insertion failed: point outside all circumcircles");

    // boundary of the cavity = edges appearing exactly once among bad triangles
    std::map<std::pair<int, int>, std::pair<int, int>> edge_count;  // key -> (count, oriented a)
    for (int tid : bad) {
      const auto& t = tris_[static_cast<size_t>(tid)];
      for (int e = 0; e < 3; ++e) {
        int a = t.v[e], b = t.v[(e + 1) % 3];
        auto k = key(a, b);
        auto it = edge_count.find(k);
        if (it == edge_count.end())
          edge_count[k] = {1, a};
        else
          it->second.first++;
      }
    }
    for (int tid : bad) remove_tri(tid);
    for (const auto& [k, ca] : edge_count) {
      if (ca.first != 1) continue;
      int a = ca.second, b = (k.first == a) ? k.second : k.first;
      add_tri(a, b, pi);
    }
  }

  bool has_edge(int a, int b) const { return edge_tris_.count(key(a, b)) > 0; }

  // Flip the first flippable edge crossing segment a-b. Returns false when no
  // crossing edge exists or none is flippable (should not happen for a valid
  // PSLG without points on the open segment).
  bool flip_one_crossing(int a, int b) {
    const Vec2& pa = pt(a);
    const Vec2& pb = pt(b);
    std::vector<std::pair<int, int>> crossings;
    for (const auto& [k, ts] : edge_tris_) {
      int c = k.first, d = k.second;
      if (c == a || c == b || d == a || d == b) continue;
      if (ts.size() != 2) continue;  // hull or constrained boundary edge
      const Vec2& pc = pt(c);
      const Vec2& pd = pt(d);
      double o1 = orient2d(pa, pb, pc), o2 = orient2d(pa, pb, pd);
      double o3 = orient2d(pc, pd, pa), o4 = orient2d(pc, pd, pb);
      if (o1 * o2 < 0 && o3 * o4 < 0) crossings.push_back(k);
    }
    for (const auto& k : crossings) {
      if (try_flip(k.first, k.second)) return true;
    }
    return false;
  }

  // Flip edge (c,d) shared by two triangles into the opposite diagonal if the
  // union quadrilateral is strictly convex.
  bool try_flip(int c, int d) {
    auto it = edge_tris_.find(key(c, d));
    if (it == edge_tris_.end() || it->second.size() != 2) return false;
    int t0 = it->second[0], t1 = it->second[1];
    int e = opposite_vertex(t0, c, d);
    int f = opposite_vertex(t1, c, d);
    // convexity: e and f must be on opposite sides of (c,d) and the new edge
    // (e,f) must cross the old one
    if (orient2d(pt(e), pt(f), pt(c)) * orient2d(pt(e), pt(f), pt(d)) >= 0) return false;
    remove_tri(t0);
    remove_tri(t1);
    add_tri(e, f, c);
    add_tri(e, f, d);
    return true;
  }

  int opposite_vertex(int tid, int c, int d) const {
    for (int v : tris_[static_cast<size_t>(tid)].v)
      if (v != c && v != d) return v;
    throw std::logic_error("degenerate triangle in flip");
  }
};

}  // namespace fracsim
