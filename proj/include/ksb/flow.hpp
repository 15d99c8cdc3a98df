#pragma once

/// @file flow.hpp
/// @brief Stokes–Boussinesq stepping in vorticity–stream-function form and the
///        numerical Stokes eigenbasis.
///
/// Convention: omega = Lap_h psi, u = (-d_y psi, d_x psi). No-slip enters
/// through Thom's wall-vorticity formula, applied lagged: wall values computed
/// from the stream function after each step feed the next step's implicit
/// diffusion solve as boundary data. With that closure Lap_h psi = omega holds
/// exactly at every interior node after each step.

#include <vector>

#include "ksb/grid.hpp"

namespace ksb {

struct FlowState {
  ScalarField psi;
  ScalarField omega;
  VectorField u;
  double t = 0.0;
  // Thom wall vorticity, cached per wall for the next implicit solve.
  std::vector<double> wall_left, wall_right;  // size ny
  std::vector<double> wall_bottom, wall_top;  // size nx
};

struct StokesEigenpair {
  double eta = 0.0;
  ScalarField psi;  // clamped stream function of the mode
  VectorField w;    // perp gradient of psi, L2-normalized
};

/// Dense generalized eigensolve cap; the matrices are size()^2.
inline constexpr int max_stokes_modes = 256;

/// Safety factor for the lagged wall closure's stability bound. The closure is
/// explicit in the wall data, so the step is stable only up to roughly
/// 1.2 min(h)^2; half of that observed margin is kept.
inline constexpr double flow_dt_safety = 0.6;

/// Largest dt for which step_flow's lagged wall treatment stays stable:
/// flow_dt_safety * min(hx, hy)^2.
double flow_stable_dt(const Grid& g);

/// Zero flow at rest.
FlowState make_flow_state(const Grid& g);

/// State consistent with a given stream function: omega = Lap_h psi, Thom wall
/// values, recovered velocity. Used to seed decay tests from eigenmodes.
FlowState flow_state_from_psi(const ScalarField& psi);

/// g * d_x rho, the 2D curl of the buoyancy force g rho e_z.
ScalarField buoyancy_curl(const ScalarField& rho, double g);

/// u = (-d_y psi, d_x psi), centered; centered divergence vanishes identically.
VectorField velocity_from_streamfunction(const ScalarField& psi);

/// One IMEX step of d_t omega = Lap omega + g d_x rho: explicit buoyancy and
/// lagged Thom wall data, implicit diffusion, then psi, wall and u updates.
/// Callers must keep dt within flow_stable_dt(grid); the primitive itself does
/// not check, so decay tests can probe the unstable regime deliberately.
FlowState step_flow(const FlowState& s, const ScalarField& rho, double g, double dt);

/// First m Stokes eigenpairs, ascending eta, from the clamped stream-function
/// generalized eigenproblem. Throws std::invalid_argument for m out of range,
/// std::runtime_error if the dense solver fails.
std::vector<StokesEigenpair> stokes_eigenbasis(const Grid& grid, int m);

}  // namespace ksb
