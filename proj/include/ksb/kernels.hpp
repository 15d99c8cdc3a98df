#pragma once

/// @file kernels.hpp
/// @brief Low-level array kernels: stencils, reductions, face fluxes.
///
/// Every kernel has an OpenMP-parallel entry point (namespace ksb::kern) and a
/// serial reference twin (ksb::kern::serial) with identical semantics. The two
/// are required to produce bitwise-identical output for any thread count:
/// elementwise kernels trivially, reductions via a fixed block-summation order
/// (per-block partials accumulated serially in block index order).
///
/// Interior-node convention: arrays hold nx*ny values, index (i,j) -> i*ny + j,
/// node (i,j) at ((i+1)hx, (j+1)hy). Off-array neighbors are Dirichlet zeros.

namespace ksb::kern {

/// Block length for fixed-order reductions. Chosen once; never tune per run,
/// the summation order is part of the reproducibility contract.
inline constexpr int reduce_block = 256;

void laplacian(int nx, int ny, double hx, double hy, const double* f, double* out);
void grad_x(int nx, int ny, double hx, const double* f, double* out);
void grad_y(int nx, int ny, double hy, const double* f, double* out);

double sum(int n, const double* a);
double dot(int n, const double* a, const double* b);
double sum_sq(int n, const double* a);
double max_abs(int n, const double* a);
double min_value(int n, const double* a);

/// Face-centered upwind flux of the combined drift field V = chemo*grad(c) + advect*u.
/// fx has (nx+1)*ny entries, fx[i*ny+j] = flux through the x-face between node
/// (i-1,j) and node (i,j) (i = 0 and i = nx are wall faces); fy has nx*(ny+1)
/// entries indexed fy[i*(ny+1)+j] analogously. Upwinding picks the donor cell
/// in the transport direction; outside the domain the donor value is zero.
void upwind_flux(int nx, int ny, double hx, double hy, const double* rho,
                 const double* c, const double* ux, const double* uy,
                 bool chemo, bool advect, double* fx, double* fy);

/// Divergence of a face flux back onto nodes: out = (dFx/dx + dFy/dy).
void face_divergence(int nx, int ny, double hx, double hy, const double* fx,
                     const double* fy, double* out);

/// Max face-normal transport speed |V| over all faces (the CFL speed).
double max_face_speed(int nx, int ny, double hx, double hy, const double* c,
                      const double* ux, const double* uy, bool chemo, bool advect);

namespace serial {
void laplacian(int nx, int ny, double hx, double hy, const double* f, double* out);
void grad_x(int nx, int ny, double hx, const double* f, double* out);
void grad_y(int nx, int ny, double hy, const double* f, double* out);
double sum(int n, const double* a);
double dot(int n, const double* a, const double* b);
double sum_sq(int n, const double* a);
double max_abs(int n, const double* a);
double min_value(int n, const double* a);
void upwind_flux(int nx, int ny, double hx, double hy, const double* rho,
                 const double* c, const double* ux, const double* uy,
                 bool chemo, bool advect, double* fx, double* fy);
void face_divergence(int nx, int ny, double hx, double hy, const double* fx,
                     const double* fy, double* out);
double max_face_speed(int nx, int ny, double hx, double hy, const double* c,
                      const double* ux, const double* uy, bool chemo, bool advect);
}  // namespace serial

}  // namespace ksb::kern
