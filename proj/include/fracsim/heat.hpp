// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>

#include "fracsim/fv_transport.hpp"

namespace fracsim {

/// c(phi) = phi rho_w c_w + (1-phi) rho_s c_s
inline double effective_capacity(double porosity, const ThermalCoefficients& c) {
  if (!(porosity >= 0.0 && porosity <= 1.0)) throw std::invalid_argument("porosity outside [0,1]");
  return porosity * c.density_fluid * c.capacity_fluid + (1.0 - porosity) * c.density_solid * c.capacity_solid;
}

/// Lambda(phi) = Lambda_w^phi Lambda_s^(1-phi)
inline double effective_conductivity(double porosity, const ThermalCoefficients& c) {
  if (!(porosity >= 0.0 && porosity <= 1.0)) throw std::invalid_argument("porosity outside [0,1]");
  if (!(c.conductivity_fluid > 0.0 && c.conductivity_solid > 0.0))
    throw std::invalid_argument("conductivities must be positive");
  return std::pow(c.conductivity_fluid, porosity) * std::pow(c.conductivity_solid, 1.0 - porosity);
}

/// One implicit-Euler step of the mixed-dimensional heat equation with
/// upwinded advection, TPFA diffusion and wall exchange on both fracture
/// sides. Capacities and conductivities are frozen at the given porosity.
inline ScalarField advance_heat(const MixedMesh& mesh, const GeometryCache& geom, const FlowSolution& flow,
                                const ScalarField& temperature, const std::vector<double>& porosity,
                                const std::vector<double>& aperture, double dt, const BoundaryConfig& bc,
                                const ThermalCoefficients& thermal) {
  detail::ScalarStepCoeffs cf;
  cf.dt = dt;
  cf.advect_density = thermal.density_fluid * thermal.capacity_fluid;
  cf.bc = bc.heat;
  const int nT = mesh.n_tri();
  const int nC = mesh.n_frac_cell();
  cf.storage_matrix.resize(static_cast<size_t>(nT));
  cf.diffusivity_matrix.resize(static_cast<size_t>(nT));
  cf.sink_matrix.assign(static_cast<size_t>(nT), thermal.heat_sink_matrix);
  for (int t = 0; t < nT; ++t) {
    cf.storage_matrix[static_cast<size_t>(t)] = effective_capacity(porosity[static_cast<size_t>(t)], thermal);
    cf.diffusivity_matrix[static_cast<size_t>(t)] = effective_conductivity(porosity[static_cast<size_t>(t)], thermal);
  }
  cf.storage_frac.resize(static_cast<size_t>(nC));
  cf.diffusivity_frac.resize(static_cast<size_t>(nC));
  cf.exchange_coeff.resize(static_cast<size_t>(nC));
  cf.sink_frac.assign(static_cast<size_t>(nC), thermal.heat_sink_fracture);
  for (int c = 0; c < nC; ++c) {
    double eps = aperture[static_cast<size_t>(c)];
    cf.storage_frac[static_cast<size_t>(c)] = thermal.density_fluid * thermal.capacity_fluid * eps;
    cf.diffusivity_frac[static_cast<size_t>(c)] = thermal.conductivity_fluid * eps;
    cf.exchange_coeff[static_cast<size_t>(c)] = 2.0 * thermal.conductivity_fluid / std::max(eps, 1e-300);
  }
  return detail::advance_scalar(mesh, geom, flow, temperature, cf);
}

}  // namespace fracsim
