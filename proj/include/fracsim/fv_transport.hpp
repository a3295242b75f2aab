// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <array>
#include <cmath>
#include <vector>

#include "fracsim/darcy.hpp"
#include "fracsim/mesh.hpp"
#include "fracsim/params.hpp"

namespace fracsim {

/// A scalar unknown living on both dimensions plus the 0D intersections.
struct ScalarField {
  std::vector<double> matrix;
  std::vector<double> fracture;
  std::vector<double> intersection;

  static ScalarField constant(const MixedMesh& mesh, double v) {
    ScalarField f;
    f.matrix.assign(static_cast<size_t>(mesh.n_tri()), v);
    f.fracture.assign(static_cast<size_t>(mesh.n_frac_cell()), v);
    f.intersection.assign(static_cast<size_t>(mesh.n_intersection()), v);
    return f;
  }
};

namespace detail {

/// Coefficients of one implicit upwind/TPFA step, shared between the heat and
/// solute equations. Sources follow the paper's sign (+s is a sink).
struct ScalarStepCoeffs {
  std::vector<double> storage_matrix;      // multiplies (new-old)*area/dt
  std::vector<double> diffusivity_matrix;  // cellwise TPFA coefficient
  std::vector<double> sink_matrix;         // per-cell, integrated with area
  std::vector<double> storage_frac;
  std::vector<double> diffusivity_frac;  // along-fracture coefficient (eps-weighted)
  std::vector<double> exchange_coeff;    // wall exchange per unit length (2*Lambda_w/eps form)
  std::vector<double> sink_frac;
  double advect_density = 1.0;  // rho_w c_w for heat, 1 for solute
  std::array<ScalarBC, 4> bc{};
  double dt = 0.0;
};

inline double harmonic(double a, double b) {
  if (!(a > 0.0) || !(b > 0.0)) return 0.0;
  return 1.0 / (1.0 / a + 1.0 / b);
}

inline ScalarField advance_scalar(const MixedMesh& mesh, const GeometryCache& geom, const FlowSolution& flow,
                                  const ScalarField& old, const ScalarStepCoeffs& cf) {
  if (!(cf.dt > 0.0)) throw std::invalid_argument("time step must be positive");
  const int nT = mesh.n_tri();
  const int nC = mesh.n_frac_cell();
  const int nX = mesh.n_intersection();
  const int off_c = nT;
  const int off_x = nT + nC;
  const int n = nT + nC + nX;

  std::vector<Eigen::Triplet<double>> trip;
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
  const double rho = cf.advect_density;

  // storage and sinks
  for (int t = 0; t < nT; ++t) {
    double s = cf.storage_matrix[static_cast<size_t>(t)] * geom.tri_area[static_cast<size_t>(t)] / cf.dt;
    trip.emplace_back(t, t, s);
    rhs[t] += s * old.matrix[static_cast<size_t>(t)] - cf.sink_matrix[static_cast<size_t>(t)] * geom.tri_area[static_cast<size_t>(t)];
  }
  for (int c = 0; c < nC; ++c) {
    double s = cf.storage_frac[static_cast<size_t>(c)] * geom.frac_length[static_cast<size_t>(c)] / cf.dt;
    trip.emplace_back(off_c + c, off_c + c, s);
    rhs[off_c + c] +=
        s * old.fracture[static_cast<size_t>(c)] - cf.sink_frac[static_cast<size_t>(c)] * geom.frac_length[static_cast<size_t>(c)];
  }

  // upwind advective + TPFA diffusive flux between two rows; the flux leaves
  // `row_from` and enters `row_to`
  auto couple = [&](int row_from, int row_to, double q, double trans) {
    // advective part
    if (q >= 0.0) {
      trip.emplace_back(row_from, row_from, rho * q);
      if (row_to >= 0) trip.emplace_back(row_to, row_from, -rho * q);
    } else {
      trip.emplace_back(row_from, row_to, rho * q);
      if (row_to >= 0) trip.emplace_back(row_to, row_to, -rho * q);
    }
    // diffusive part
    trip.emplace_back(row_from, row_from, trans);
    trip.emplace_back(row_from, row_to, -trans);
    if (row_to >= 0) {
      trip.emplace_back(row_to, row_to, trans);
      trip.emplace_back(row_to, row_from, -trans);
    }
  };
  // variant with Dirichlet data instead of a second unknown
  auto couple_dirichlet = [&](int row, double q, double trans, double value) {
    if (q >= 0.0)
      trip.emplace_back(row, row, rho * q);
    else
      rhs[row] -= rho * q * value;
    trip.emplace_back(row, row, trans);
    rhs[row] += trans * value;
  };

  for (int f = 0; f < mesh.n_face(); ++f) {
    const Face& face = mesh.faces[static_cast<size_t>(f)];
    const double q = flow.face_flux[static_cast<size_t>(f)];
    const double len = geom.face_length[static_cast<size_t>(f)];
    if (face.is_interior()) {
      double tl = cf.diffusivity_matrix[static_cast<size_t>(face.left)] * len / geom.dist_left[static_cast<size_t>(f)];
      double tr = cf.diffusivity_matrix[static_cast<size_t>(face.right)] * len / geom.dist_right[static_cast<size_t>(f)];
      couple(face.left, face.right, q, harmonic(tl, tr));
    } else if (face.is_fracture_side()) {
      int c = face.fracture_cell;
      double tm = cf.diffusivity_matrix[static_cast<size_t>(face.left)] * len / geom.dist_left[static_cast<size_t>(f)];
      double tex = harmonic(tm, cf.exchange_coeff[static_cast<size_t>(c)] * len);
      couple(face.left, off_c + c, q, tex);
    } else {
      const ScalarBC& b = cf.bc[static_cast<size_t>(side_index(face.boundary))];
      if (b.dirichlet) {
        double tm = cf.diffusivity_matrix[static_cast<size_t>(face.left)] * len / geom.dist_left[static_cast<size_t>(f)];
        couple_dirichlet(face.left, q, tm, b.value);
      } else {
        // advective outflow: the boundary value rides on the interior state
        trip.emplace_back(face.left, face.left, rho * q);
      }
    }
  }

  // 1D tangential fluxes
  const auto ends = fracture_cell_ends(mesh);
  std::vector<char> x_coupled(static_cast<size_t>(nX), 0);
  for (int i = 0; i < mesh.n_frac_iface(); ++i) {
    const auto& fi = mesh.fracture_interfaces[static_cast<size_t>(i)];
    const int ca = fi.cell_a;
    const double la = geom.frac_length[static_cast<size_t>(ca)];
    const double ta = cf.diffusivity_frac[static_cast<size_t>(ca)] / (0.5 * la);
    // out-of-cell_a signed flux
    const auto& ea = ends[static_cast<size_t>(ca)];
    double out_sign = (ea.iface[1] == i) ? ea.sign[1] : -ea.sign[0];
    const double q = out_sign * flow.frac_flux[static_cast<size_t>(i)];
    switch (fi.kind) {
      case FractureInterface::Kind::inner: {
        const int cb = fi.cell_b;
        const double lb = geom.frac_length[static_cast<size_t>(cb)];
        const double tb = cf.diffusivity_frac[static_cast<size_t>(cb)] / (0.5 * lb);
        couple(off_c + ca, off_c + cb, q, harmonic(ta, tb));
        break;
      }
      case FractureInterface::Kind::boundary: {
        const ScalarBC& b = cf.bc[static_cast<size_t>(side_index(fi.boundary))];
        if (b.dirichlet)
          couple_dirichlet(off_c + ca, q, ta, b.value);
        else
          trip.emplace_back(off_c + ca, off_c + ca, rho * q);
        break;
      }
      case FractureInterface::Kind::tip:
        break;  // zero flux
      case FractureInterface::Kind::intersection: {
        couple(off_c + ca, off_x + fi.intersection, q, ta);
        if (std::abs(q) > 0.0 || ta > 0.0) x_coupled[static_cast<size_t>(fi.intersection)] = 1;
        break;
      }
    }
  }
  // 0D points have zero measure; an uncoupled one falls back to continuity
  // with its first incident cell
  for (int x = 0; x < nX; ++x) {
    if (x_coupled[static_cast<size_t>(x)]) continue;
    trip.emplace_back(off_x + x, off_x + x, 1.0);
    trip.emplace_back(off_x + x, off_c + mesh.intersections[static_cast<size_t>(x)].cells.at(0), -1.0);
  }

  Eigen::SparseMatrix<double> A(n, n);
  A.setFromTriplets(trip.begin(), trip.end());
  A.makeCompressed();
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.compute(A);
  if (lu.info() != Eigen::Success) throw SolverError("singular system in scalar transport step");
  Eigen::VectorXd sol = lu.solve(rhs);
  if (lu.info() != Eigen::Success || !sol.allFinite()) throw SolverError("scalar transport solve failed");

  ScalarField out;
  out.matrix.assign(sol.data(), sol.data() + nT);
  out.fracture.assign(sol.data() + off_c, sol.data() + off_c + nC);
  out.intersection.assign(sol.data() + off_x, sol.data() + off_x + nX);
  return out;
}

}  // namespace detail
}  // namespace fracsim
