// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <functional>
#include <string>
#include <vector>

#include "fracsim/darcy.hpp"
#include "fracsim/heat.hpp"
#include "fracsim/mesh.hpp"
#include "fracsim/params.hpp"
#include "fracsim/transport.hpp"

namespace fracsim {

/// All primal fields at one time level, plus the porosity/aperture history
/// needed by the extrapolation of the flow source.
struct SimState {
  double time = 0.0;
  FlowSolution flow;
  ScalarField temperature;
  ScalarField solute;
  std::vector<double> precipitate_matrix;
  std::vector<double> precipitate_frac;
  std::vector<double> porosity;       // phi^n per triangle
  std::vector<double> porosity_prev;  // phi^{n-1}
  std::vector<double> aperture;       // eps^n per fracture cell
  std::vector<double> aperture_prev;  // eps^{n-1}

  // diagnostics
  long reaction_substeps = 0;
  long clamp_events = 0;
  int max_substeps_last_step = 0;
};

struct TimeConfig {
  double dt = 0.01;
  double final_time = 1.0;
  int substep_limit = 100;  // halve dt for subsequent steps when exceeded
  int snapshot_every = 0;   // 0 = only the mandatory snapshots
};

struct ScenarioConfig {
  PhysicalParams params;
  BoundaryConfig bc = BoundaryConfig::reference();
  TimeConfig time;

  void validate() const {
    params.validate();
    if (!(time.final_time > 0.0)) throw std::invalid_argument("final time must be positive");
    if (!(time.dt > 0.0 && time.dt <= time.final_time)) throw std::invalid_argument("dt must lie in (0, T]");
  }
};

inline SimState initial_state(const MixedMesh& mesh, const PhysicalParams& p) {
  SimState s;
  s.temperature = ScalarField::constant(mesh, p.initial.temperature);
  s.solute = ScalarField::constant(mesh, p.initial.solute);
  s.precipitate_matrix.assign(static_cast<size_t>(mesh.n_tri()), p.initial.precipitate);
  s.precipitate_frac.assign(static_cast<size_t>(mesh.n_frac_cell()), p.initial.precipitate);
  s.porosity.assign(static_cast<size_t>(mesh.n_tri()), p.initial.porosity);
  s.porosity_prev = s.porosity;
  s.aperture.assign(static_cast<size_t>(mesh.n_frac_cell()), p.initial.aperture);
  s.aperture_prev = s.aperture;
  return s;
}

/// phi* = 2 phi^n - phi^{n-1}, clamped to (0,1).
inline double extrapolate_porosity(double phi_n, double phi_prev) {
  double phi = 2.0 * phi_n - phi_prev;
  return std::min(1.0 - 1e-12, std::max(1e-12, phi));
}

/// One step of the non-iterative splitting: (1) Darcy with the extrapolated
/// porosity-rate source and lagged aperture, (2) implicit heat, (3a) implicit
/// solute advection, (3b) explicit reaction with event location, (4) porosity
/// and aperture update. Solver failures are rethrown with the stage name.
inline SimState step(const MixedMesh& mesh, const GeometryCache& geom, const SimState& state,
                     const ScenarioConfig& cfg, double dt) {
  SimState next = state;
  const int nT = mesh.n_tri();
  const int nC = mesh.n_frac_cell();
  const auto& p = cfg.params;

  auto stage = [&](const char* name, auto&& fn) {
    try {
      fn();
    } catch (const SolverError& e) {
      throw SolverError(std::string(name) + ": " + e.what());
    }
  };

  // (1) Darcy
  std::vector<double> rate_m(static_cast<size_t>(nT));
  std::vector<double> rate_f(static_cast<size_t>(nC));
  for (int t = 0; t < nT; ++t) {
    double phi_star = extrapolate_porosity(state.porosity[static_cast<size_t>(t)], state.porosity_prev[static_cast<size_t>(t)]);
    rate_m[static_cast<size_t>(t)] = -(phi_star - state.porosity[static_cast<size_t>(t)]) / dt;
  }
  for (int c = 0; c < nC; ++c) {
    double eps_star =
        std::max(0.0, 2.0 * state.aperture[static_cast<size_t>(c)] - state.aperture_prev[static_cast<size_t>(c)]);
    rate_f[static_cast<size_t>(c)] = -(eps_star - state.aperture[static_cast<size_t>(c)]) / dt;
  }
  stage("darcy", [&] {
    next.flow = assemble_and_solve_darcy(mesh, geom, state.porosity, state.aperture, rate_m, rate_f, cfg.bc, p.flow);
  });

  // (2) heat
  stage("heat", [&] {
    next.temperature =
        advance_heat(mesh, geom, next.flow, state.temperature, state.porosity, state.aperture, dt, cfg.bc, p.thermal);
  });

  // (3a) solute advection-diffusion
  stage("solute", [&] {
    next.solute =
        advance_solute_advection(mesh, geom, next.flow, state.solute, state.porosity, state.aperture, dt, cfg.bc, p.chem);
  });

  // (3b) reaction with event location, (4) porosity/aperture/permeability update
  next.max_substeps_last_step = 0;
  stage("reaction", [&] {
    for (int t = 0; t < nT; ++t) {
      auto res = react_cell(next.solute.matrix[static_cast<size_t>(t)], state.precipitate_matrix[static_cast<size_t>(t)],
                            next.temperature.matrix[static_cast<size_t>(t)], dt, p.chem);
      next.solute.matrix[static_cast<size_t>(t)] = res.u;
      next.precipitate_matrix[static_cast<size_t>(t)] = res.w;
      next.reaction_substeps += res.substeps;
      next.max_substeps_last_step = std::max(next.max_substeps_last_step, res.substeps);
      if (update_porosity(next.porosity[static_cast<size_t>(t)], state.precipitate_matrix[static_cast<size_t>(t)], res.w,
                          p.chem.molar_volume_matrix))
        ++next.clamp_events;
    }
    for (int c = 0; c < nC; ++c) {
      auto res = react_cell(next.solute.fracture[static_cast<size_t>(c)], state.precipitate_frac[static_cast<size_t>(c)],
                            next.temperature.fracture[static_cast<size_t>(c)], dt, p.chem);
      next.solute.fracture[static_cast<size_t>(c)] = res.u;
      next.precipitate_frac[static_cast<size_t>(c)] = res.w;
      next.reaction_substeps += res.substeps;
      next.max_substeps_last_step = std::max(next.max_substeps_last_step, res.substeps);
      if (update_aperture(next.aperture[static_cast<size_t>(c)], state.precipitate_frac[static_cast<size_t>(c)], res.w,
                          p.chem.molar_volume_fracture))
        ++next.clamp_events;
    }
  });

  next.porosity_prev = state.porosity;
  next.aperture_prev = state.aperture;
  next.time = state.time + dt;
  return next;
}

struct Snapshot {
  double time = 0.0;
  SimState state;
};

/// Runs the scenario from t = 0 to T. Snapshots always include t = 0, the
/// first step reaching 0.1 T, and t = T; `snapshot_every` adds periodic ones.
/// The callback (when set) observes every accepted step.
inline std::vector<Snapshot> run(const MixedMesh& mesh, const GeometryCache& geom, const ScenarioConfig& cfg,
                                 const std::function<void(const SimState&)>& on_step = {}) {
  cfg.validate();
  SimState state = initial_state(mesh, cfg.params);
  std::vector<Snapshot> out;
  out.push_back({0.0, state});

  double dt = cfg.time.dt;
  const double T = cfg.time.final_time;
  bool took_t1 = false;
  int k = 0;
  while (state.time < T - 1e-12) {
    double step_dt = std::min(dt, T - state.time);
    SimState next = step(mesh, geom, state, cfg, step_dt);
    if (next.max_substeps_last_step > cfg.time.substep_limit) dt *= 0.5;
    state = std::move(next);
    ++k;
    if (on_step) on_step(state);
    bool want = false;
    if (!took_t1 && state.time >= 0.1 * T - 1e-12) {
      want = true;
      took_t1 = true;
    }
    if (cfg.time.snapshot_every > 0 && k % cfg.time.snapshot_every == 0) want = true;
    if (state.time >= T - 1e-12) want = true;
    if (want) out.push_back({state.time, state});
  }
  return out;
}

}  // namespace fracsim
