// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>

#include "fracsim/fv_transport.hpp"

namespace fracsim {

/// Net precipitation rate r_w(u,w,theta): lambda(theta)(u^2/u_e^2 - 1) while
/// precipitate is present, lambda(theta) u^2/u_e^2 once it is exhausted
/// (dissolution shuts off at w = 0).
inline double reaction_rate(double u, double w, double temperature, const ChemistryCoefficients& chem) {
  const double lambda = chem.rate_factor(temperature);
  const double ue2 = chem.equilibrium_concentration * chem.equilibrium_concentration;
  if (w > 0.0) return lambda * (u * u / ue2 - 1.0);
  return lambda * u * u / ue2;
}

/// Implicit advection-diffusion step for the solute on both dimensions with
/// the chi exchange terms; the reaction is handled separately by react_cell.
inline ScalarField advance_solute_advection(const MixedMesh& mesh, const GeometryCache& geom, const FlowSolution& flow,
                                            const ScalarField& solute, const std::vector<double>& porosity,
                                            const std::vector<double>& aperture, double dt, const BoundaryConfig& bc,
                                            const ChemistryCoefficients& chem) {
  detail::ScalarStepCoeffs cf;
  cf.dt = dt;
  cf.advect_density = 1.0;
  cf.bc = bc.solute;
  const int nT = mesh.n_tri();
  const int nC = mesh.n_frac_cell();
  cf.storage_matrix.resize(static_cast<size_t>(nT));
  cf.diffusivity_matrix.resize(static_cast<size_t>(nT));
  cf.sink_matrix.assign(static_cast<size_t>(nT), 0.0);
  for (int t = 0; t < nT; ++t) {
    cf.storage_matrix[static_cast<size_t>(t)] = porosity[static_cast<size_t>(t)];
    cf.diffusivity_matrix[static_cast<size_t>(t)] = porosity[static_cast<size_t>(t)] * chem.diffusivity_matrix;
  }
  cf.storage_frac.resize(static_cast<size_t>(nC));
  cf.diffusivity_frac.resize(static_cast<size_t>(nC));
  cf.exchange_coeff.resize(static_cast<size_t>(nC));
  cf.sink_frac.assign(static_cast<size_t>(nC), 0.0);
  for (int c = 0; c < nC; ++c) {
    double eps = aperture[static_cast<size_t>(c)];
    cf.storage_frac[static_cast<size_t>(c)] = eps;
    cf.diffusivity_frac[static_cast<size_t>(c)] = eps * chem.diffusivity_fracture;
    cf.exchange_coeff[static_cast<size_t>(c)] = 2.0 * chem.normal_diffusivity / std::max(eps, 1e-300);
  }
  return detail::advance_scalar(mesh, geom, flow, solute, cf);
}

struct ReactResult {
  double u = 0.0;
  double w = 0.0;
  int substeps = 0;
};

/// Explicit sub-stepped integration of d_t u = -r_w, d_t w = +r_w at one
/// point, with event location of the w = 0 crossing: the crossing time is
/// found exactly (the rate is constant within a substep) and the remainder of
/// the substep switches to the w <= 0 branch. An exhausted, undersaturated
/// state (w = 0, u < u_e) is a fixed point of the switched system, so the
/// integrator holds it there instead of chattering across the surface.
/// Conserves u + w and never produces w < 0.
inline ReactResult react_cell(double u_star, double w_n, double temperature, double dt,
                              const ChemistryCoefficients& chem) {
  if (!(dt > 0.0)) throw std::invalid_argument("time step must be positive");
  const double lambda = chem.rate_factor(temperature);
  const double ue = chem.equilibrium_concentration;
  const double ue2 = ue * ue;
  double h_target = dt;
  if (lambda > 0.0) h_target = std::min(dt, 0.1 * ue2 / lambda);
  const int n = std::max(1, static_cast<int>(std::ceil(dt / h_target)));
  const double h = dt / n;

  auto rate = [&](double uu, double ww) {
    if (ww > 0.0) return lambda * (uu * uu / ue2 - 1.0);
    return (uu < ue) ? 0.0 : lambda * uu * uu / ue2;
  };

  double u = u_star, w = w_n;
  for (int i = 0; i < n; ++i) {
    double r = rate(u, w);
    double remaining = h;
    if (r < 0.0 && w + h * r < 0.0) {
      double t_cross = w / (-r);
      u -= w;  // exact mole exchange up to the crossing (delta w = -w)
      w = 0.0;
      remaining = h - t_cross;
      r = rate(u, w);
    }
    double delta = remaining * r;
    u -= delta;
    w += delta;
  }
  return {u, w, n};
}

/// Exact first integral of d_t phi = -eta d_t(phi w): phi (1 + eta w) is
/// invariant across the reaction step. Clamped to [phi_min, phi_max]; the
/// return value reports whether clamping occurred.
inline bool update_porosity(double& phi, double w_old, double w_new, double molar_volume, double phi_min = 1e-4,
                            double phi_max = 1.0 - 1e-12) {
  phi = phi * (1.0 + molar_volume * w_old) / (1.0 + molar_volume * w_new);
  if (phi < phi_min) {
    phi = phi_min;
    return true;
  }
  if (phi > phi_max) {
    phi = phi_max;
    return true;
  }
  return false;
}

/// Same invariant for the aperture: eps (1 + eta_gamma w) is conserved.
inline bool update_aperture(double& eps, double w_old, double w_new, double molar_volume) {
  eps = eps * (1.0 + molar_volume * w_old) / (1.0 + molar_volume * w_new);
  if (eps < 0.0) {
    eps = 0.0;
    return true;
  }
  return false;
}

}  // namespace fracsim
