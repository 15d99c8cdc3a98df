#include "ksb/chemotaxis.hpp"

#include <algorithm>
#include <cmath>

#include "ksb/kernels.hpp"
#include "ksb/spectral.hpp"

namespace ksb {

namespace {

bool all_finite(const std::vector<double>& v) {
  for (double x : v)
    if (!std::isfinite(x)) return false;
  return true;
}

}  // namespace

DensityState make_density_state(const ScalarField& rho0) {
  DensityState s;
  s.rho = rho0;
  s.c = solve_poisson(rho0);
  return s;
}

CoupledState make_coupled_state(const ScalarField& rho0, const ScalarField& psi0) {
  CoupledState s;
  s.density = make_density_state(rho0);
  s.flow = flow_state_from_psi(psi0);
  s.t = 0.0;
  return s;
}

ScalarField gaussian_initial_data(const Grid& g, double m0, double x0, double y0,
                                  double sigma) {
  if (sigma <= 0.0) throw std::invalid_argument("gaussian_initial_data: sigma must be positive");
  if (m0 < 0.0) throw std::invalid_argument("gaussian_initial_data: mass must be nonnegative");
  ScalarField f(g);
  if (m0 == 0.0) return f;
  f = sample(g, [&](double x, double y) {
    const double r2 = (x - x0) * (x - x0) + (y - y0) * (y - y0);
    return std::exp(-r2 / (sigma * sigma)) * std::sin(M_PI * x / g.domain.Lx) *
           std::sin(M_PI * y / g.domain.Ly);
  });
  const double mass = integrate(f);
  if (mass <= 0.0) throw std::invalid_argument("gaussian_initial_data: bump not resolved by grid");
  const double scale = m0 / mass;
  for (double& v : f.values) v *= scale;
  return f;
}

FaceFlux chemo_flux(const ScalarField& rho, const ScalarField& c, const VectorField& u,
                    const StepOptions& opt) {
  const Grid& g = rho.grid;
  FaceFlux F;
  F.grid = g;
  F.fx.assign(static_cast<size_t>(g.nx + 1) * g.ny, 0.0);
  F.fy.assign(static_cast<size_t>(g.nx) * (g.ny + 1), 0.0);
  kern::upwind_flux(g.nx, g.ny, g.hx, g.hy, rho.data(), c.data(), u.ux.data(),
                    u.uy.data(), opt.chemotaxis, opt.advection, F.fx.data(),
                    F.fy.data());
  return F;
}

double cfl_limit(const DensityState& s, const VectorField& u, const StepOptions& opt) {
  const Grid& g = s.rho.grid;
  const double speed =
      kern::max_face_speed(g.nx, g.ny, g.hx, g.hy, s.c.data(), u.ux.data(),
                           u.uy.data(), opt.chemotaxis, opt.advection);
  return opt.cfl * std::min(g.hx, g.hy) / std::max(speed, opt.eps_speed);
}

DensityState step_density(const DensityState& s, const VectorField& u, double dt,
                          const StepOptions& opt) {
  if (dt <= 0.0) throw std::invalid_argument("step_density: dt must be positive");
  const Grid& g = s.rho.grid;
  if (!u.grid.same_as(g)) throw std::invalid_argument("step_density: grid mismatch");
  if (dt > cfl_limit(s, u, opt) * (1.0 + 1e-9))
    throw std::invalid_argument("step_density: dt violates the advective CFL bound");

  FaceFlux F = chemo_flux(s.rho, s.c, u, opt);
  ScalarField div(g);
  kern::face_divergence(g.nx, g.ny, g.hx, g.hy, F.fx.data(), F.fy.data(), div.data());

  ScalarField star(g);
  for (int q = 0; q < g.size(); ++q)
    star.values[q] = s.rho.values[q] - dt * div.values[q];

  DensityState out;
  out.rho = solve_helmholtz(star, dt);
  if (!all_finite(out.rho.values))
    throw blowup_error("step_density: non-finite density");
  if (kern::max_abs(g.size(), out.rho.data()) > opt.linf_ceiling)
    throw blowup_error("step_density: density exceeded the ceiling");
  out.c = solve_poisson(out.rho);
  out.t = s.t + dt;
  return out;
}

CoupledState step_coupled(const CoupledState& s, double g, double dt_target,
                          const StepOptions& opt) {
  if (dt_target <= 0.0) throw std::invalid_argument("step_coupled: dt_target must be positive");
  const double flow_cap = flow_stable_dt(s.density.rho.grid);
  double dt = std::min({dt_target, flow_cap, cfl_limit(s.density, s.flow.u, opt)});
  for (int tries = 0; tries < 60; ++tries) {
    FlowState fnew = step_flow(s.flow, s.density.rho, g, dt);
    const double lim = std::min(flow_cap, cfl_limit(s.density, fnew.u, opt));
    if (dt <= lim * (1.0 + 1e-9)) {
      CoupledState out;
      out.flow = std::move(fnew);
      out.density = step_density(s.density, out.flow.u, dt, opt);
      out.t = out.density.t;
      return out;
    }
    dt = lim;
  }
  throw std::runtime_error("step_coupled: CFL control failed to settle");
}

}  // namespace ksb
