// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cmath>
#include <stdexcept>

#include "fracsim/mesh.hpp"

namespace fracsim {

/// Darcy-flow coefficients. Defaults are the common data set of the
/// advection-reaction problem (nondimensional units).
struct FlowCoefficients {
  double viscosity = 1.0;                 // mu
  double fluid_density = 1.0;             // rho_w
  double gravity = 0.0;                   // g
  double matrix_permeability_ref = 1.0;   // k_{Omega,0}
  double matrix_porosity_ref = 0.2;       // phi_{Omega,0}
  double frac_permeability_ref = 1e2;     // k_{gamma,0} (tangential)
  double frac_normal_permeability_ref = 1e2;  // kappa_{gamma,0}
  double aperture_ref = 1e-2;             // eps_{gamma,0}
  double source_matrix = 0.0;             // f_Omega
  double source_fracture = 0.0;           // f_gamma

  void validate() const {
    if (!(viscosity > 0.0)) throw std::invalid_argument("viscosity must be positive");
    if (!(matrix_permeability_ref > 0.0)) throw std::invalid_argument("matrix reference permeability must be positive");
    if (!(matrix_porosity_ref > 0.0 && matrix_porosity_ref < 1.0))
      throw std::invalid_argument("reference porosity must lie in (0,1)");
    if (!(aperture_ref > 0.0)) throw std::invalid_argument("reference aperture must be positive");
    if (!(frac_normal_permeability_ref > 0.0))
      throw std::invalid_argument("reference normal fracture permeability must be positive");
  }
};

struct ThermalCoefficients {
  double capacity_fluid = 1.0;      // c_w
  double capacity_solid = 1.0;      // c_s
  double density_fluid = 1.0;       // rho_w
  double density_solid = 1.0;       // rho_s (not in the common data set; defaults to 1)
  double conductivity_fluid = 1.0;  // Lambda_w
  double conductivity_solid = 0.1;  // Lambda_s
  double heat_sink_matrix = 0.0;    // j (positive = sink)
  double heat_sink_fracture = 0.0;  // j_gamma

  void validate() const {
    if (!(capacity_fluid > 0.0 && capacity_solid > 0.0)) throw std::invalid_argument("capacities must be positive");
    if (!(density_fluid > 0.0 && density_solid > 0.0)) throw std::invalid_argument("densities must be positive");
    if (!(conductivity_fluid > 0.0 && conductivity_solid > 0.0))
      throw std::invalid_argument("conductivities must be positive");
  }
};

/// Single-solute / single-precipitate kinetics: rate factor
/// lambda(theta) = rate_prefactor * exp(-activation_energy / theta).
struct ChemistryCoefficients {
  double rate_prefactor = 10.0;
  double activation_energy = 4.0;        // E
  double equilibrium_concentration = 1.0;  // u_e
  double molar_volume_matrix = 0.5;      // eta
  double molar_volume_fracture = 2.0;    // eta_gamma
  double diffusivity_matrix = 0.1;       // d_Omega
  double diffusivity_fracture = 0.1;     // d_gamma
  double normal_diffusivity = 0.1;       // delta_gamma

  double rate_factor(double temperature) const {
    if (!(temperature > 0.0)) throw std::invalid_argument("rate factor requires positive temperature");
    return rate_prefactor * std::exp(-activation_energy / temperature);
  }

  void validate() const {
    if (!(equilibrium_concentration > 0.0)) throw std::invalid_argument("equilibrium concentration must be positive");
    if (molar_volume_matrix < 0.0 || molar_volume_fracture < 0.0)
      throw std::invalid_argument("molar volumes must be nonnegative");
    if (diffusivity_matrix < 0.0 || diffusivity_fracture < 0.0 || normal_diffusivity < 0.0)
      throw std::invalid_argument("diffusivities must be nonnegative");
  }
};

/// Per-side boundary condition for the flow problem.
struct FlowBC {
  enum class Kind { pressure, noflow };
  Kind kind = Kind::noflow;
  double pressure = 0.0;
};

/// Dirichlet data for an advected scalar; sides without a value get the
/// advective-outflow treatment.
struct ScalarBC {
  bool dirichlet = false;
  double value = 0.0;
};

inline int side_index(BoundarySide s) { return static_cast<int>(s) - 1; }

struct BoundaryConfig {
  std::array<FlowBC, 4> flow{};      // indexed by side_index(bottom,right,top,left)
  std::array<ScalarBC, 4> heat{};
  std::array<ScalarBC, 4> solute{};

  FlowBC& flow_on(BoundarySide s) { return flow[static_cast<size_t>(side_index(s))]; }
  const FlowBC& flow_on(BoundarySide s) const { return flow[static_cast<size_t>(side_index(s))]; }
  ScalarBC& heat_on(BoundarySide s) { return heat[static_cast<size_t>(side_index(s))]; }
  const ScalarBC& heat_on(BoundarySide s) const { return heat[static_cast<size_t>(side_index(s))]; }
  ScalarBC& solute_on(BoundarySide s) { return solute[static_cast<size_t>(side_index(s))]; }
  const ScalarBC& solute_on(BoundarySide s) const { return solute[static_cast<size_t>(side_index(s))]; }

  /// Common data of the reference scenarios: inflow at the bottom
  /// (p=1, theta=1.5, u=2), outflow at the top (p=0), no-flow walls.
  static BoundaryConfig reference() {
    BoundaryConfig bc;
    bc.flow_on(BoundarySide::bottom) = {FlowBC::Kind::pressure, 1.0};
    bc.flow_on(BoundarySide::top) = {FlowBC::Kind::pressure, 0.0};
    bc.heat_on(BoundarySide::bottom) = {true, 1.5};
    bc.solute_on(BoundarySide::bottom) = {true, 2.0};
    return bc;
  }
};

/// Spatially uniform initial state.
struct InitialConditions {
  double temperature = 0.0;   // theta_0
  double solute = 0.0;        // u_0
  double precipitate = 0.3;   // w_0
  double porosity = 0.2;      // phi_{Omega,0}
  double aperture = 1e-2;     // eps_{gamma,0}
};

struct PhysicalParams {
  FlowCoefficients flow;
  ThermalCoefficients thermal;
  ChemistryCoefficients chem;
  InitialConditions initial;

  void validate() const {
    flow.validate();
    thermal.validate();
    chem.validate();
    if (!(initial.porosity > 0.0 && initial.porosity < 1.0))
      throw std::invalid_argument("initial porosity must lie in (0,1)");
    if (initial.aperture < 0.0) throw std::invalid_argument("initial aperture must be nonnegative");
    if (initial.precipitate < 0.0 || initial.solute < 0.0)
      throw std::invalid_argument("initial concentrations must be nonnegative");
  }
};

}  // namespace fracsim
