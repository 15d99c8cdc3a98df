#include "ksb/config.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "ksb/chemotaxis.hpp"

namespace ksb {

void validate_config(const RunConfig& cfg) {
  auto fail = [](const std::string& msg) { throw std::invalid_argument("config: " + msg); };
  if (cfg.Lx <= 0.0 || cfg.Ly <= 0.0) fail("domain extents must be positive");
  if (cfg.nx < 3 || cfg.ny < 3) fail("grid must have at least 3 nodes per axis");
  if (cfg.backend != "fd" && cfg.backend != "galerkin")
    fail("backend must be 'fd' or 'galerkin'");
  if (cfg.backend == "galerkin" && (cfg.n_modes < 1 || cfg.m_modes < 0))
    fail("mode counts must be positive");
  if (cfg.rho0_family != "gaussian" && cfg.rho0_family != "zero")
    fail("rho0_family must be 'gaussian' or 'zero'");
  if (cfg.psi0_family != "zero" && cfg.psi0_family != "clamped-sine")
    fail("psi0_family must be 'zero' or 'clamped-sine'");
  if (cfg.rho0_family == "gaussian") {
    if (cfg.mass < 0.0) fail("mass must be nonnegative");
    if (cfg.sigma <= 0.0) fail("sigma must be positive");
  }
  if (cfg.g < 0.0) fail("g must be nonnegative");
  if (cfg.t_end <= 0.0) fail("t_end must be positive");
  if (cfg.dt_target <= 0.0) fail("dt_target must be positive");
  if (cfg.cfl <= 0.0 || cfg.cfl > 0.9) fail("cfl must lie in (0, 0.9]");
  if (cfg.snapshot_stride < 1) fail("snapshot_stride must be at least 1");
  if (cfg.linf_ceiling <= 0.0) fail("linf_ceiling must be positive");
  if (cfg.eps_quench <= 0.0) fail("eps_quench must be positive");
}

Grid grid_from_config(const RunConfig& cfg) {
  return build_grid(cfg.Lx, cfg.Ly, cfg.nx, cfg.ny);
}

Grid galerkin_grid_from_config(const RunConfig& cfg) {
  return build_grid(cfg.Lx, cfg.Ly, std::min(cfg.nx, 64), std::min(cfg.ny, 64));
}

ScalarField initial_rho(const RunConfig& cfg, const Grid& grid) {
  if (cfg.rho0_family == "zero" || cfg.mass == 0.0) return ScalarField(grid);
  const double x0 = cfg.x0 < 0.0 ? 0.5 * cfg.Lx : cfg.x0;
  const double y0 = cfg.y0 < 0.0 ? 0.5 * cfg.Ly : cfg.y0;
  return gaussian_initial_data(grid, cfg.mass, x0, y0, cfg.sigma);
}

ScalarField initial_psi(const RunConfig& cfg, const Grid& grid) {
  if (cfg.psi0_family == "zero" || cfg.psi0_amp == 0.0) return ScalarField(grid);
  const double pi = 3.14159265358979323846;
  return sample(grid, [&](double x, double y) {
    const double sx = std::sin(pi * x / grid.domain.Lx);
    const double sy = std::sin(pi * y / grid.domain.Ly);
    return cfg.psi0_amp * sx * sx * sy * sy;
  });
}

}  // namespace ksb
