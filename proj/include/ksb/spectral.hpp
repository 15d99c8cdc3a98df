#pragma once

/// @file spectral.hpp
/// @brief Sine-transform machinery on the interior grid: the DST-I pair that
///        diagonalizes the 5-point Dirichlet Laplacian, spectrally exact
///        Poisson and Helmholtz solves, and the analytic Laplacian eigenbasis.

#include <vector>

#include "ksb/grid.hpp"

namespace ksb {

struct SpectralCoeffs {
  Grid grid;
  std::vector<double> coeffs;  // mode (k1,k2) at (k1-1)*ny + (k2-1)
};

/// Orthogonal DST-I pair. Normalization ties Parseval to the grid quadrature:
/// sum(coeffs^2) equals the squared L2 norm of the field.
SpectralCoeffs dst_forward(const ScalarField& f);
ScalarField dst_inverse(const SpectralCoeffs& c);

/// Eigenvalue of the 5-point -Laplacian on discrete sine mode (k1,k2), k >= 1.
double lambda_discrete(const Grid& g, int k1, int k2);
/// Continuum Dirichlet eigenvalue pi^2 (k1^2/Lx^2 + k2^2/Ly^2).
double lambda_continuous(const Grid& g, int k1, int k2);

/// c with -Lap_h c = f, c = 0 on the boundary; exact for the stencil.
ScalarField solve_poisson(const ScalarField& f);
/// w with (I + a (-Lap_h)) w = f, a >= 0.
ScalarField solve_helmholtz(const ScalarField& f, double a);

/// Evaluates the discrete sine interpolant of f at the nodes of target (same
/// domain, any resolution). Exact when target equals the source grid.
ScalarField resample(const ScalarField& f, const Grid& target);

struct LaplaceEigenpair {
  int k1 = 0, k2 = 0;
  double lam_continuous = 0.0;
  double lam_discrete = 0.0;
  ScalarField v;  // L2-normalized sine product sampled on the grid
};

/// First n pairs by ascending continuum eigenvalue, (k1,k2)-lexicographic ties.
std::vector<LaplaceEigenpair> laplace_eigenbasis(const Grid& g, int n);

}  // namespace ksb
