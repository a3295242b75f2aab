// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "fracsim/mesh.hpp"
#include "fracsim/params.hpp"

namespace fracsim {

class SolverError : public std::runtime_error {
 public:
  explicit SolverError(const std::string& what) : std::runtime_error(what) {}
};

/// k(phi) = k_0 (phi/phi_0)^2
inline double matrix_permeability(double porosity, const FlowCoefficients& c) {
  if (!(porosity > 0.0)) throw std::invalid_argument("matrix permeability requires positive porosity");
  double r = porosity / c.matrix_porosity_ref;
  return c.matrix_permeability_ref * r * r;
}

/// (k_gamma, kappa_gamma) = reference * (eps/eps_0)^2; both vanish when the
/// fracture seals (eps = 0).
inline std::pair<double, double> fracture_permeabilities(double aperture, const FlowCoefficients& c) {
  if (aperture < 0.0) throw std::invalid_argument("fracture permeability requires nonnegative aperture");
  double r = aperture / c.aperture_ref;
  return {c.frac_permeability_ref * r * r, c.frac_normal_permeability_ref * r * r};
}

/// Mixed RT0/P0 solution of the coupled Darcy problem.
struct FlowSolution {
  std::vector<double> face_flux;     // integrated q.n per matrix face (stored face normal)
  std::vector<double> frac_flux;    // integrated tangential flux per fracture interface (out of cell_a)
  std::vector<double> p_matrix;     // P0 pressure per triangle
  std::vector<double> p_fracture;   // P0 pressure per fracture cell
  std::vector<double> p_intersection;
  std::vector<uint8_t> sealed;      // fracture cells treated as sealed in this solve

  /// Exchange flux into fracture cell c through the given side (+1/-1),
  /// integrated over the face. Positive = matrix feeds the fracture.
  double exchange_into_fracture(const MixedMesh& mesh, int cell, int side) const {
    const auto& fc = mesh.fracture_cells[static_cast<size_t>(cell)];
    return face_flux[static_cast<size_t>(side > 0 ? fc.face_plus : fc.face_minus)];
  }
};

namespace detail {

struct Rt0Local {
  // local mass matrix (mu/k weighted) in global face-dof ordering, and the
  // outward sign of each face relative to the triangle
  std::array<std::array<double, 3>, 3> M;
  std::array<int, 3> face;
  std::array<double, 3> sigma;
  std::array<Vec2, 3> basis_mean;  // cellwise mean of each basis function
};

inline Rt0Local rt0_local(const MixedMesh& mesh, const GeometryCache& geom, int tri, double mu_over_k) {
  Rt0Local loc{};
  const auto& tv = mesh.triangles[static_cast<size_t>(tri)].v;
  const double area = geom.tri_area[static_cast<size_t>(tri)];
  std::array<Vec2, 3> opp{};
  for (int i = 0; i < 3; ++i) {
    int f = mesh.cell_faces[static_cast<size_t>(tri)][static_cast<size_t>(i)];
    loc.face[static_cast<size_t>(i)] = f;
    const Face& face = mesh.faces[static_cast<size_t>(f)];
    loc.sigma[static_cast<size_t>(i)] = (face.left == tri) ? 1.0 : -1.0;
    for (int v : tv)
      if (v != face.v0 && v != face.v1) opp[static_cast<size_t>(i)] = mesh.vertices[static_cast<size_t>(v)];
  }
  // basis psi_i = sigma_i/(2A) (x - P_i); midpoint quadrature is exact here
  std::array<Vec2, 3> mids{};
  for (int e = 0; e < 3; ++e)
    mids[static_cast<size_t>(e)] = (mesh.vertices[static_cast<size_t>(tv[static_cast<size_t>(e)])] +
                                    mesh.vertices[static_cast<size_t>(tv[static_cast<size_t>((e + 1) % 3)])]) *
                                   0.5;
  for (int i = 0; i < 3; ++i) {
    Vec2 mean{0.0, 0.0};
    for (int q = 0; q < 3; ++q)
      mean = mean + (mids[static_cast<size_t>(q)] - opp[static_cast<size_t>(i)]) *
                        (loc.sigma[static_cast<size_t>(i)] / (2.0 * area) / 3.0);
    loc.basis_mean[static_cast<size_t>(i)] = mean;
    for (int j = 0; j < 3; ++j) {
      double acc = 0.0;
      for (int q = 0; q < 3; ++q)
        acc += dot(mids[static_cast<size_t>(q)] - opp[static_cast<size_t>(i)],
                   mids[static_cast<size_t>(q)] - opp[static_cast<size_t>(j)]) *
               (area / 3.0);
      loc.M[static_cast<size_t>(i)][static_cast<size_t>(j)] = mu_over_k * loc.sigma[static_cast<size_t>(i)] *
                                                              loc.sigma[static_cast<size_t>(j)] * acc /
                                                              (4.0 * area * area);
    }
  }
  return loc;
}

}  // namespace detail

/// Assembles and solves the mixed-dimensional Darcy problem.
///  - `porosity` per triangle, `aperture` per fracture cell (both lagged);
///  - `rate_source_matrix` is the discretized -d_t(phi) term per triangle
///    (empty = 0), `rate_source_frac` the -d_t(eps) analog per fracture cell;
///  - boundary faces carry Dirichlet pressure or no-flow per `bc`.
inline FlowSolution assemble_and_solve_darcy(const MixedMesh& mesh, const GeometryCache& geom,
                                             const std::vector<double>& porosity, const std::vector<double>& aperture,
                                             const std::vector<double>& rate_source_matrix,
                                             const std::vector<double>& rate_source_frac, const BoundaryConfig& bc,
                                             const FlowCoefficients& coeffs) {
  const int nF = mesh.n_face();
  const int nI = mesh.n_frac_iface();
  const int nT = mesh.n_tri();
  const int nC = mesh.n_frac_cell();
  const int nX = mesh.n_intersection();
  if (static_cast<int>(porosity.size()) != nT) throw std::invalid_argument("porosity field size mismatch");
  if (static_cast<int>(aperture.size()) != nC) throw std::invalid_argument("aperture field size mismatch");

  auto src_m = [&](int t) { return rate_source_matrix.empty() ? 0.0 : rate_source_matrix[static_cast<size_t>(t)]; };
  auto src_f = [&](int c) { return rate_source_frac.empty() ? 0.0 : rate_source_frac[static_cast<size_t>(c)]; };

  for (int t = 0; t < nT; ++t)
    if (!(porosity[static_cast<size_t>(t)] > 0.0 && porosity[static_cast<size_t>(t)] < 1.0) ||
        !std::isfinite(porosity[static_cast<size_t>(t)]) || !std::isfinite(src_m(t)))
      throw std::invalid_argument("non-finite or out-of-range porosity/source in Darcy solve");
  for (int c = 0; c < nC; ++c)
    if (aperture[static_cast<size_t>(c)] < 0.0 || !std::isfinite(aperture[static_cast<size_t>(c)]) ||
        !std::isfinite(src_f(c)))
      throw std::invalid_argument("non-finite or negative aperture/source in Darcy solve");

  const int off_qf = 0;
  const int off_qi = nF;
  const int off_pt = nF + nI;
  const int off_pc = off_pt + nT;
  const int off_px = off_pc + nC;
  const int n = off_px + nX;

  // sealed fracture cells exchange and transport nothing
  std::vector<uint8_t> sealed(static_cast<size_t>(nC), 0);
  std::vector<double> conductance(static_cast<size_t>(nC), 0.0);  // eps * k_gamma(eps)
  for (int c = 0; c < nC; ++c) {
    if (aperture[static_cast<size_t>(c)] < 1e-10 * coeffs.aperture_ref) sealed[static_cast<size_t>(c)] = 1;
    conductance[static_cast<size_t>(c)] =
        aperture[static_cast<size_t>(c)] * fracture_permeabilities(aperture[static_cast<size_t>(c)], coeffs).first;
  }
  const auto ends = fracture_cell_ends(mesh);

  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<size_t>(12 * nF));
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);

  bool any_dirichlet = false;
  std::vector<uint8_t> pinned(static_cast<size_t>(nF + nI), 0);

  // no-flow constraints and sealed exchange faces
  for (int f = 0; f < nF; ++f) {
    const Face& face = mesh.faces[static_cast<size_t>(f)];
    if (face.is_domain_boundary() && bc.flow_on(face.boundary).kind == FlowBC::Kind::noflow)
      pinned[static_cast<size_t>(f)] = 1;
    if (face.is_fracture_side()) {
      int c = face.fracture_cell;
      auto [kg, kap] = fracture_permeabilities(aperture[static_cast<size_t>(c)], coeffs);
      if (sealed[static_cast<size_t>(c)] || kap <= 0.0) pinned[static_cast<size_t>(f)] = 1;
    }
    if (face.is_domain_boundary() && bc.flow_on(face.boundary).kind == FlowBC::Kind::pressure) any_dirichlet = true;
  }
  auto cell_blocked = [&](int c) { return sealed[static_cast<size_t>(c)] || conductance[static_cast<size_t>(c)] <= 0.0; };
  for (int i = 0; i < nI; ++i) {
    const auto& fi = mesh.fracture_interfaces[static_cast<size_t>(i)];
    bool blocked = cell_blocked(fi.cell_a) || (fi.cell_b >= 0 && cell_blocked(fi.cell_b));
    if (fi.kind == FractureInterface::Kind::tip || blocked) pinned[static_cast<size_t>(nF + i)] = 1;
    if (fi.kind == FractureInterface::Kind::boundary && !pinned[static_cast<size_t>(nF + i)]) {
      if (bc.flow_on(fi.boundary).kind == FlowBC::Kind::noflow)
        pinned[static_cast<size_t>(nF + i)] = 1;
      else
        any_dirichlet = true;
    }
  }
  if (!any_dirichlet) throw SolverError("singular Darcy system: no pressure boundary condition anywhere");

  // --- matrix momentum rows (RT0) ---
  std::vector<uint8_t> row_written(static_cast<size_t>(nF), 0);
  for (int t = 0; t < nT; ++t) {
    double k = matrix_permeability(porosity[static_cast<size_t>(t)], coeffs);
    auto loc = detail::rt0_local(mesh, geom, t, coeffs.viscosity / k);
    for (int i = 0; i < 3; ++i) {
      int f = loc.face[static_cast<size_t>(i)];
      if (pinned[static_cast<size_t>(f)]) continue;
      for (int j = 0; j < 3; ++j) {
        int fj = loc.face[static_cast<size_t>(j)];
        if (pinned[static_cast<size_t>(fj)]) continue;
        trip.emplace_back(off_qf + f, off_qf + fj, loc.M[static_cast<size_t>(i)][static_cast<size_t>(j)]);
      }
      trip.emplace_back(off_qf + f, off_pt + t, -loc.sigma[static_cast<size_t>(i)]);
      // gravity: rhs += integral of rho g e_z . psi
      rhs[off_qf + f] += coeffs.fluid_density * coeffs.gravity * loc.basis_mean[static_cast<size_t>(i)].y *
                         geom.tri_area[static_cast<size_t>(t)];
      row_written[static_cast<size_t>(f)] = 1;
    }
  }
  for (int f = 0; f < nF; ++f) {
    const Face& face = mesh.faces[static_cast<size_t>(f)];
    if (pinned[static_cast<size_t>(f)]) {
      trip.emplace_back(off_qf + f, off_qf + f, 1.0);
      continue;
    }
    if (!row_written[static_cast<size_t>(f)]) throw SolverError("face without momentum row");
    if (face.is_domain_boundary()) {
      rhs[off_qf + f] -= bc.flow_on(face.boundary).pressure;
    } else if (face.is_fracture_side()) {
      int c = face.fracture_cell;
      auto [kg, kap] = fracture_permeabilities(aperture[static_cast<size_t>(c)], coeffs);
      double resistance =
          coeffs.viscosity * aperture[static_cast<size_t>(c)] / (kap * geom.face_length[static_cast<size_t>(f)]);
      trip.emplace_back(off_qf + f, off_qf + f, resistance);
      trip.emplace_back(off_qf + f, off_pc + c, 1.0);
    }
  }

  // --- matrix mass balance ---
  for (int t = 0; t < nT; ++t) {
    for (int f : mesh.cell_faces[static_cast<size_t>(t)]) {
      double sigma = (mesh.faces[static_cast<size_t>(f)].left == t) ? 1.0 : -1.0;
      trip.emplace_back(off_pt + t, off_qf + f, sigma);
    }
    rhs[off_pt + t] = (src_m(t) - coeffs.source_matrix) * geom.tri_area[static_cast<size_t>(t)];
  }

  // --- fracture momentum rows (1D RT0) ---
  for (int c = 0; c < nC; ++c) {
    if (cell_blocked(c)) continue;
    double L = geom.frac_length[static_cast<size_t>(c)];
    double a = coeffs.viscosity / conductance[static_cast<size_t>(c)];
    const auto& e = ends[static_cast<size_t>(c)];
    const double mref[2][2] = {{L / 3.0, L / 6.0}, {L / 6.0, L / 3.0}};
    for (int li = 0; li < 2; ++li) {
      int row = e.iface[static_cast<size_t>(li)];
      if (pinned[static_cast<size_t>(nF + row)]) continue;
      for (int lj = 0; lj < 2; ++lj) {
        int col = e.iface[static_cast<size_t>(lj)];
        if (pinned[static_cast<size_t>(nF + col)]) continue;
        trip.emplace_back(off_qi + row, off_qi + col,
                          a * e.sign[static_cast<size_t>(li)] * e.sign[static_cast<size_t>(lj)] *
                              mref[static_cast<size_t>(li)][static_cast<size_t>(lj)]);
      }
      // pressure term: -p_c for the v1-end dof, +p_c for the v0-end dof, in
      // the local (tangent-aligned) frame
      double pcoef = (li == 1) ? -1.0 : 1.0;
      trip.emplace_back(off_qi + row, off_pc + c, pcoef * e.sign[static_cast<size_t>(li)]);
    }
  }
  for (int i = 0; i < nI; ++i) {
    const auto& fi = mesh.fracture_interfaces[static_cast<size_t>(i)];
    if (pinned[static_cast<size_t>(nF + i)]) {
      trip.emplace_back(off_qi + i, off_qi + i, 1.0);
      continue;
    }
    // trace closure at ends: +p_hat in the out-of-cell orientation
    if (fi.kind == FractureInterface::Kind::boundary) {
      rhs[off_qi + i] -= bc.flow_on(fi.boundary).pressure;
    } else if (fi.kind == FractureInterface::Kind::intersection) {
      auto [kg, kap] = fracture_permeabilities(aperture[static_cast<size_t>(fi.cell_a)], coeffs);
      double rx = (kap > 0.0) ? coeffs.viscosity / (2.0 * kap) : 0.0;
      trip.emplace_back(off_qi + i, off_qi + i, rx);
      trip.emplace_back(off_qi + i, off_px + fi.intersection, 1.0);
    }
  }

  // --- fracture mass balance ---
  for (int c = 0; c < nC; ++c) {
    const auto& fc = mesh.fracture_cells[static_cast<size_t>(c)];
    double L = geom.frac_length[static_cast<size_t>(c)];
    if (sealed[static_cast<size_t>(c)]) {
      // no flow through a sealed cell; define its pressure as the side average
      trip.emplace_back(off_pc + c, off_pc + c, 1.0);
      trip.emplace_back(off_pc + c, off_pt + mesh.faces[static_cast<size_t>(fc.face_plus)].left, -0.5);
      trip.emplace_back(off_pc + c, off_pt + mesh.faces[static_cast<size_t>(fc.face_minus)].left, -0.5);
      continue;
    }
    const auto& e = ends[static_cast<size_t>(c)];
    // out-of-cell sign: +s at the v1 end, -s at the v0 end
    trip.emplace_back(off_pc + c, off_qi + e.iface[1], e.sign[1]);
    trip.emplace_back(off_pc + c, off_qi + e.iface[0], -e.sign[0]);
    trip.emplace_back(off_pc + c, off_qf + fc.face_plus, -1.0);
    trip.emplace_back(off_pc + c, off_qf + fc.face_minus, -1.0);
    rhs[off_pc + c] = (src_f(c) - aperture[static_cast<size_t>(c)] * coeffs.source_fracture) * L;
  }

  // --- intersection balance ---
  std::vector<int> x_deg(static_cast<size_t>(nX), 0);
  for (int i = 0; i < nI; ++i) {
    const auto& fi = mesh.fracture_interfaces[static_cast<size_t>(i)];
    if (fi.kind != FractureInterface::Kind::intersection) continue;
    if (pinned[static_cast<size_t>(nF + i)]) continue;
    trip.emplace_back(off_px + fi.intersection, off_qi + i, 1.0);
    x_deg[static_cast<size_t>(fi.intersection)]++;
  }
  for (int x = 0; x < nX; ++x)
    if (x_deg[static_cast<size_t>(x)] == 0) trip.emplace_back(off_px + x, off_px + x, 1.0);

  Eigen::SparseMatrix<double> A(n, n);
  A.setFromTriplets(trip.begin(), trip.end());
  A.makeCompressed();
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.analyzePattern(A);
  lu.factorize(A);
  if (lu.info() != Eigen::Success) throw SolverError("singular system in Darcy solve");
  Eigen::VectorXd x = lu.solve(rhs);
  if (lu.info() != Eigen::Success || !x.allFinite()) throw SolverError("Darcy solve failed");

  FlowSolution sol;
  sol.face_flux.assign(x.data() + off_qf, x.data() + off_qf + nF);
  sol.frac_flux.assign(x.data() + off_qi, x.data() + off_qi + nI);
  sol.p_matrix.assign(x.data() + off_pt, x.data() + off_pt + nT);
  sol.p_fracture.assign(x.data() + off_pc, x.data() + off_pc + nC);
  sol.p_intersection.assign(x.data() + off_px, x.data() + off_px + nX);
  sol.sealed = sealed;
  return sol;
}

/// Largest per-cell mass-balance residual (matrix and fracture cells),
/// normalized by the largest flux magnitude.
inline double max_conservation_residual(const MixedMesh& mesh, const GeometryCache& geom, const FlowSolution& sol,
                                        const std::vector<double>& rate_source_matrix,
                                        const std::vector<double>& rate_source_frac,
                                        const std::vector<double>& aperture, const FlowCoefficients& coeffs) {
  double scale = 1e-30;
  for (double q : sol.face_flux) scale = std::max(scale, std::abs(q));
  for (double q : sol.frac_flux) scale = std::max(scale, std::abs(q));

  double worst = 0.0;
  for (int t = 0; t < mesh.n_tri(); ++t) {
    double acc = 0.0;
    for (int f : mesh.cell_faces[static_cast<size_t>(t)]) {
      double sigma = (mesh.faces[static_cast<size_t>(f)].left == t) ? 1.0 : -1.0;
      acc += sigma * sol.face_flux[static_cast<size_t>(f)];
    }
    double src = rate_source_matrix.empty() ? 0.0 : rate_source_matrix[static_cast<size_t>(t)];
    acc -= (src - coeffs.source_matrix) * geom.tri_area[static_cast<size_t>(t)];
    worst = std::max(worst, std::abs(acc));
  }
  // per fracture cell: signed tangential fluxes at the two ends minus side inflows
  const auto ends = fracture_cell_ends(mesh);
  for (int c = 0; c < mesh.n_frac_cell(); ++c) {
    if (sol.sealed[static_cast<size_t>(c)]) continue;
    const auto& fc = mesh.fracture_cells[static_cast<size_t>(c)];
    const auto& e = ends[static_cast<size_t>(c)];
    double acc = e.sign[1] * sol.frac_flux[static_cast<size_t>(e.iface[1])] -
                 e.sign[0] * sol.frac_flux[static_cast<size_t>(e.iface[0])];
    acc -= sol.face_flux[static_cast<size_t>(fc.face_plus)] + sol.face_flux[static_cast<size_t>(fc.face_minus)];
    double src = rate_source_frac.empty() ? 0.0 : rate_source_frac[static_cast<size_t>(c)];
    acc -= (src - aperture[static_cast<size_t>(c)] * coeffs.source_fracture) * geom.frac_length[static_cast<size_t>(c)];
    worst = std::max(worst, std::abs(acc));
  }
  return worst / scale;
}

}  // namespace fracsim
