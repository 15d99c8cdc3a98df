#pragma once

/// @file chemotaxis.hpp
/// @brief Density stepping for the chemotaxis equation and the coupled
///        density–flow macro step.
///
/// The density update is conservative: a face-centered upwind flux for the
/// combined drift (chemoattractant gradient plus fluid velocity), explicit
/// divergence, then implicit diffusion through the Helmholtz solve. Under the
/// advective CFL bound the scheme preserves nonnegativity and never increases
/// total mass.

#include <stdexcept>
#include <vector>

#include "ksb/flow.hpp"
#include "ksb/grid.hpp"

namespace ksb {

/// Raised when a step detects NaN/Inf or the density ceiling; the caller's
/// state is untouched and holds the last valid time.
struct blowup_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct StepOptions {
  double cfl = 0.4;
  bool chemotaxis = true;
  bool advection = true;
  double linf_ceiling = 1e8;
  double eps_speed = 1e-12;  // CFL denominator floor for drift-free fields
};

struct DensityState {
  ScalarField rho;
  ScalarField c;  // solve_poisson(rho), refreshed after every update
  double t = 0.0;
};

struct CoupledState {
  DensityState density;
  FlowState flow;
  double t = 0.0;
};

/// Face-centered flux. fx[i*ny+j] lives on the x-face between nodes (i-1,j)
/// and (i,j); fy[i*(ny+1)+j] analogously; wall faces carry outflow only.
struct FaceFlux {
  Grid grid;
  std::vector<double> fx;
  std::vector<double> fy;
};

DensityState make_density_state(const ScalarField& rho0);
CoupledState make_coupled_state(const ScalarField& rho0, const ScalarField& psi0);

/// Smooth bump A exp(-((x-x0)^2+(y-y0)^2)/sigma^2) sin(pi x/Lx) sin(pi y/Ly)
/// with A chosen so the total mass is m0.
ScalarField gaussian_initial_data(const Grid& g, double m0, double x0, double y0,
                                  double sigma);

FaceFlux chemo_flux(const ScalarField& rho, const ScalarField& c, const VectorField& u,
                    const StepOptions& opt = {});

/// Largest stable dt for the current drift field: cfl*min(h)/max(speed, eps).
double cfl_limit(const DensityState& s, const VectorField& u, const StepOptions& opt = {});

/// One conservative upwind + implicit-diffusion step. Throws
/// std::invalid_argument on a CFL violation and blowup_error on NaN/ceiling.
DensityState step_density(const DensityState& s, const VectorField& u, double dt,
                          const StepOptions& opt = {});

/// One Lie-split macro step, flow first, then density with the updated
/// velocity; dt shrinks below dt_target until the CFL bound holds for the
/// velocity actually used.
CoupledState step_coupled(const CoupledState& s, double g, double dt_target,
                          const StepOptions& opt = {});

}  // namespace ksb
