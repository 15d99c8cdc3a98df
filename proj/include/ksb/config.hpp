#pragma once

/// @file config.hpp
/// @brief Run configuration shared by the harness and the backend-comparison
///        entry point, plus the initial-data builders it describes.

#include <string>
#include <vector>

#include "ksb/grid.hpp"

namespace ksb {

struct RunConfig {
  double Lx = 3.14159265358979323846;
  double Ly = 3.14159265358979323846;
  int nx = 128;
  int ny = 128;
  std::string backend = "fd";  // fd | galerkin

  int n_modes = 32;  // galerkin backend only
  int m_modes = 32;

  std::string rho0_family = "gaussian";  // gaussian | zero
  double mass = 10.0;
  double x0 = -1.0;  // negative means domain center
  double y0 = -1.0;
  double sigma = 0.3;
  std::string psi0_family = "zero";  // zero | clamped-sine
  double psi0_amp = 0.0;

  double g = 0.0;
  std::vector<double> g_list;  // sweep subcommand only
  double t_end = 1.0;
  double dt_target = 1e-3;
  double cfl = 0.4;
  int snapshot_stride = 10;

  double linf_ceiling = 1e8;
  double eps_quench = 0.01;
  bool chemotaxis = true;
  bool advection = true;
  bool frozen_rho = false;  // density held fixed; the flow sees a constant force
  bool dump_fields = false;
  std::string out_dir = "out";
};

/// Throws std::invalid_argument on out-of-range fields.
void validate_config(const RunConfig& cfg);

Grid grid_from_config(const RunConfig& cfg);
/// Quadrature/eigenbasis grid for the galerkin backend: the run grid capped at
/// 64 nodes per axis (the Stokes eigensolve is dense).
Grid galerkin_grid_from_config(const RunConfig& cfg);

ScalarField initial_rho(const RunConfig& cfg, const Grid& grid);
ScalarField initial_psi(const RunConfig& cfg, const Grid& grid);

}  // namespace ksb
