/// @file test_chemotaxis.cpp
/// @brief Density stepping: initial data normalization, heat-kernel decay,
///        positivity and mass monotonicity, CFL policing, blow-up errors, and
///        the coupled macro step's dt selection.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "ksb/chemotaxis.hpp"
#include "ksb/flow.hpp"
#include "ksb/grid.hpp"
#include "ksb/kernels.hpp"
#include "ksb/spectral.hpp"

using namespace ksb;

namespace {
constexpr double pi = 3.14159265358979323846;
}

TEST_CASE("gaussian initial data hits the requested mass exactly") {
  Grid g = build_grid(pi, pi, 64, 64);
  for (double m0 : {0.5, 8.0, 40.0}) {
    ScalarField rho = gaussian_initial_data(g, m0, pi / 2, pi / 2, 0.3);
    CHECK(integrate(rho) == doctest::Approx(m0).epsilon(1e-13));
    CHECK(min_value(rho) >= 0.0);
  }
  // Off-center placement moves the peak.
  ScalarField off = gaussian_initial_data(g, 1.0, 0.8, 2.3, 0.25);
  int imax = 0, jmax = 0;
  double best = -1.0;
  for (int i = 0; i < g.nx; ++i)
    for (int j = 0; j < g.ny; ++j)
      if (off.at(i, j) > best) {
        best = off.at(i, j);
        imax = i;
        jmax = j;
      }
  CHECK(std::fabs(g.x(imax) - 0.8) <= 2 * g.hx);
  CHECK(std::fabs(g.y(jmax) - 2.3) <= 2 * g.hy);
}

TEST_CASE("pure diffusion reproduces the heat decay of the ground mode") {
  Grid g = build_grid(pi, pi, 65, 65);
  ScalarField rho0 = sample(g, [](double x, double y) {
    return (2.0 / pi) * std::sin(x) * std::sin(y);
  });
  DensityState s = make_density_state(rho0);
  VectorField u(g);
  StepOptions opt;
  opt.chemotaxis = false;
  opt.advection = false;
  const double dt = 1e-3;
  const double n0 = l2_norm(s.rho);
  for (int k = 0; k < 500; ++k) s = step_density(s, u, dt, opt);
  const double ratio = l2_norm(s.rho) / n0;
  CHECK(ratio == doctest::Approx(std::exp(-1.0)).epsilon(0.01));
  CHECK(s.t == doctest::Approx(0.5));
}

TEST_CASE("pure diffusion mass change telescopes to the discrete flux") {
  Grid g = build_grid(pi, pi, 48, 48);
  DensityState s = make_density_state(gaussian_initial_data(g, 3.0, pi / 2, pi / 2, 0.4));
  VectorField u(g);
  StepOptions opt;
  opt.chemotaxis = false;
  opt.advection = false;
  const double dt = 5e-4;
  DensityState s1 = step_density(s, u, dt, opt);
  ScalarField lap = laplacian(s1.rho);
  const double predicted = integrate(s.rho) + dt * integrate(lap);
  CHECK(integrate(s1.rho) == doctest::Approx(predicted).epsilon(1e-12));
}

TEST_CASE("chemotactic aggregation keeps density nonnegative and mass nonincreasing") {
  Grid g = build_grid(pi, pi, 64, 64);
  DensityState s = make_density_state(gaussian_initial_data(g, 40.0, pi / 2, pi / 2, 0.3));
  VectorField u(g);
  double mass_prev = integrate(s.rho);
  const double mass0 = mass_prev;
  for (int k = 0; k < 120; ++k) {
    const double dt = std::min(2e-4, cfl_limit(s, u));
    s = step_density(s, u, dt, {});
    const double m = integrate(s.rho);
    CHECK(min_value(s.rho) >= -1e-10);
    CHECK(m <= mass_prev + 1e-12);
    mass_prev = m;
  }
  // Interior aggregation barely touches the walls this early: mass is close
  // to conserved, and the peak has grown.
  CHECK(mass_prev >= 0.999 * mass0);
  CHECK(max_abs(s.rho) > max_abs(gaussian_initial_data(g, 40.0, pi / 2, pi / 2, 0.3)));
}

TEST_CASE("cfl_limit reflects the measured face speed") {
  Grid g = build_grid(pi, pi, 32, 32);
  DensityState s = make_density_state(gaussian_initial_data(g, 10.0, pi / 2, pi / 2, 0.5));
  VectorField u(g);
  for (int k = 0; k < g.size(); ++k) u.ux[k] = 0.7;
  StepOptions opt;
  const double speed = kern::max_face_speed(g.nx, g.ny, g.hx, g.hy, s.c.data(),
                                            u.ux.data(), u.uy.data(), opt.chemotaxis,
                                            opt.advection);
  CHECK(cfl_limit(s, u, opt) ==
        doctest::Approx(opt.cfl * std::min(g.hx, g.hy) / speed).epsilon(1e-12));

  // A drift-free state is limited only by the epsilon floor.
  DensityState z = make_density_state(ScalarField(g));
  VectorField zu(g);
  CHECK(cfl_limit(z, zu, opt) == doctest::Approx(opt.cfl * std::min(g.hx, g.hy) / opt.eps_speed));
}

TEST_CASE("step_density rejects CFL violations without touching the state") {
  Grid g = build_grid(pi, pi, 48, 48);
  DensityState s = make_density_state(gaussian_initial_data(g, 20.0, pi / 2, pi / 2, 0.3));
  VectorField u(g);
  const double bad_dt = 10.0 * cfl_limit(s, u);
  ScalarField before = s.rho;
  CHECK_THROWS_AS(step_density(s, u, bad_dt, {}), std::invalid_argument);
  for (int k = 0; k < g.size(); ++k) CHECK(s.rho.values[k] == before.values[k]);
}

TEST_CASE("a density ceiling or NaN raises blowup_error") {
  Grid g = build_grid(pi, pi, 32, 32);
  DensityState s = make_density_state(gaussian_initial_data(g, 5.0, pi / 2, pi / 2, 0.4));
  VectorField u(g);
  StepOptions tight;
  tight.linf_ceiling = 1e-3;  // far below the current peak
  CHECK_THROWS_AS(step_density(s, u, 1e-5, tight), blowup_error);

  DensityState nan_state = s;
  nan_state.rho.at(3, 3) = std::nan("");
  CHECK_THROWS_AS(step_density(nan_state, u, 1e-5, {}), blowup_error);
}

TEST_CASE("the coupled macro step clamps dt to the wall-closure bound") {
  Grid g = build_grid(pi, pi, 33, 33);
  CoupledState s = make_coupled_state(gaussian_initial_data(g, 0.5, pi / 2, pi / 2, 0.5),
                                      ScalarField(g));
  const double cap = flow_stable_dt(g);
  CoupledState s1 = step_coupled(s, 5.0, 10 * cap, {});
  CHECK(s1.t == doctest::Approx(cap).epsilon(1e-12));
  CHECK(s1.density.t == doctest::Approx(s1.t));
  CHECK(s1.flow.t == doctest::Approx(s1.t));

  // A dt_target below every limit is taken verbatim.
  CoupledState s2 = step_coupled(s, 5.0, 1e-4, {});
  CHECK(s2.t == doctest::Approx(1e-4).epsilon(1e-12));

  // The induced flow reacts to the buoyancy torque immediately.
  CHECK(max_abs(s1.flow.omega) > 0.0);
  CHECK(integrate(s1.density.rho) <= integrate(s.density.rho) + 1e-12);
}

TEST_CASE("a zero coupled state stays identically zero") {
  Grid g = build_grid(pi, pi, 17, 17);
  CoupledState s = make_coupled_state(ScalarField(g), ScalarField(g));
  CoupledState s1 = step_coupled(s, 100.0, 1e-3, {});
  CHECK(max_abs(s1.density.rho) == 0.0);
  CHECK(max_abs(s1.flow.psi) == 0.0);
  CHECK(max_abs(s1.flow.omega) == 0.0);
  CHECK(s1.t > 0.0);
}
