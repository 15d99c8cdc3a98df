#pragma once

/// @file galerkin.hpp
/// @brief Two-basis Galerkin backend: coefficient tensors over the Laplacian
///        and Stokes eigenbases, the modal ODE system, projection and
///        reconstruction, and cross-validation against the grid backend.

#include <string>
#include <vector>

#include "ksb/config.hpp"
#include "ksb/flow.hpp"
#include "ksb/grid.hpp"
#include "ksb/spectral.hpp"

namespace ksb {

struct GalerkinBasis {
  std::vector<LaplaceEigenpair> laplace;
  std::vector<StokesEigenpair> stokes;
  Grid grid;  // quadrature grid shared by both families

  int n() const { return static_cast<int>(laplace.size()); }
  int m() const { return static_cast<int>(stokes.size()); }
};

/// n Laplacian modes and m Stokes modes on one grid; m = 0 skips the dense
/// eigensolve.
GalerkinBasis build_galerkin_basis(const Grid& grid, int n, int m);

struct CoefficientTensors {
  int n = 0;
  int m = 0;
  std::vector<double> C;       // advection, C[(l*m + j)*n + k]
  std::vector<double> D;       // chemotaxis, D[(l*n + j)*n + k]
  std::vector<double> B;       // buoyancy coupling, B[k*m + l]
  std::vector<double> lambda;  // n Laplacian eigenvalues
  std::vector<double> eta;     // m Stokes eigenvalues

  double c_at(int l, int j, int k) const { return C[(static_cast<size_t>(l) * m + j) * n + k]; }
  double d_at(int l, int j, int k) const { return D[(static_cast<size_t>(l) * n + j) * n + k]; }
  double b_at(int k, int l) const { return B[static_cast<size_t>(k) * m + l]; }
};

struct GalerkinState {
  std::vector<double> rho_modes;
  std::vector<double> u_modes;
  double t = 0.0;
};

/// Quadrature assembly of all tensors. The advection tensor is stored in
/// explicitly skew-symmetrized form so the modal advection term conserves
/// energy to roundoff.
CoefficientTensors assemble_tensors(const GalerkinBasis& basis);

/// Leading (n2, m2) block of T, same layouts.
CoefficientTensors truncate_tensors(const CoefficientTensors& T, int n2, int m2);

void galerkin_rhs(const GalerkinState& s, const CoefficientTensors& T, double g,
                  std::vector<double>& drho, std::vector<double>& du);

/// Linear-stiffness step bound 1/(2 max(lambda, eta)) for the RK4 integrator.
double galerkin_stable_dt(const CoefficientTensors& T);

struct GalerkinTrajectory {
  std::vector<GalerkinState> samples;
  bool blowup_suspected = false;
};

/// Fixed-step RK4 to t_end, sampling every stride steps (plus start and end).
/// Integration stops with blowup_suspected once any mode leaves [-1e10, 1e10].
GalerkinTrajectory integrate_galerkin(const GalerkinState& s0, const CoefficientTensors& T,
                                      double g, double t_end, double dt, int stride = 1);

GalerkinState project_initial_data(const ScalarField& rho0, const ScalarField& psi0,
                                   const GalerkinBasis& basis);

void reconstruct(const GalerkinState& s, const GalerkinBasis& basis, ScalarField& rho,
                 VectorField& u);

/// Binary tensor cache: one ASCII header line "GALTEN n m nx ny Lx Ly", then
/// C, D, B, lambda, eta as little-endian 8-byte reals in declared order.
void save_tensors(const std::string& path, const CoefficientTensors& T, const Grid& grid);
/// True and fills T when the file exists and its header matches grid and n, m.
bool load_tensors(const std::string& path, const Grid& grid, int n, int m,
                  CoefficientTensors& T);

struct CompareReport {
  double rel_l2_rho = 0.0;
  double rel_l2_u = 0.0;
  double t = 0.0;
  std::string verdict = "ok";  // ok | blowup-suspected
};

/// Runs the fd and galerkin backends from identical initial data to
/// config.t_end and reports relative L2 differences.
CompareReport compare_backends(const RunConfig& config);

}  // namespace ksb
