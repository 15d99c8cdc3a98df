#include "ksb/spectral.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>
#include <tuple>

namespace ksb {

namespace {

// Plan creation is not thread-safe in FFTW; execution through the new-array
// interface is. Plans are cached per grid shape, created once under a lock
// with FFTW_ESTIMATE (deterministic plan choice) and FFTW_UNALIGNED (no
// alignment contract on caller buffers).
std::mutex plan_mutex;
std::map<std::pair<int, int>, fftw_plan> plan_cache;

fftw_plan dst_plan(int nx, int ny) {
  std::lock_guard<std::mutex> lock(plan_mutex);
  auto it = plan_cache.find({nx, ny});
  if (it != plan_cache.end()) return it->second;
  std::vector<double> in(static_cast<size_t>(nx) * ny), out(in.size());
  fftw_plan p = fftw_plan_r2r_2d(nx, ny, in.data(), out.data(), FFTW_RODFT00,
                                 FFTW_RODFT00, FFTW_ESTIMATE | FFTW_UNALIGNED);
  if (!p) throw std::runtime_error("dst_plan: fftw plan creation failed");
  plan_cache.emplace(std::pair<int, int>{nx, ny}, p);
  return p;
}

// Unnormalized 2D DST-I; applying it twice multiplies by 4(nx+1)(ny+1).
void dst_raw(const Grid& g, const double* in, double* out) {
  fftw_plan p = dst_plan(g.nx, g.ny);
  fftw_execute_r2r(p, const_cast<double*>(in), out);
}

std::vector<double> lambda_axis(int n, double h, double L) {
  std::vector<double> lam(n);
  for (int k = 1; k <= n; ++k)
    lam[k - 1] = (2.0 - 2.0 * std::cos(k * M_PI * h / L)) / (h * h);
  return lam;
}

}  // namespace

double lambda_discrete(const Grid& g, int k1, int k2) {
  const double sx = 2.0 - 2.0 * std::cos(k1 * M_PI / (g.nx + 1));
  const double sy = 2.0 - 2.0 * std::cos(k2 * M_PI / (g.ny + 1));
  return sx / (g.hx * g.hx) + sy / (g.hy * g.hy);
}

double lambda_continuous(const Grid& g, int k1, int k2) {
  const double pi2 = M_PI * M_PI;
  return pi2 * (k1 * (double)k1 / (g.domain.Lx * g.domain.Lx) +
                k2 * (double)k2 / (g.domain.Ly * g.domain.Ly));
}

SpectralCoeffs dst_forward(const ScalarField& f) {
  SpectralCoeffs c{f.grid, std::vector<double>(static_cast<size_t>(f.grid.size()))};
  dst_raw(f.grid, f.data(), c.coeffs.data());
  const double a =
      0.5 * std::sqrt(f.grid.hx * f.grid.hy / ((f.grid.nx + 1.0) * (f.grid.ny + 1.0)));
  for (double& v : c.coeffs) v *= a;
  return c;
}

ScalarField dst_inverse(const SpectralCoeffs& c) {
  ScalarField f(c.grid);
  dst_raw(c.grid, c.coeffs.data(), f.data());
  const double b =
      1.0 / (2.0 * std::sqrt(c.grid.hx * c.grid.hy * (c.grid.nx + 1.0) * (c.grid.ny + 1.0)));
  for (double& v : f.values) v *= b;
  return f;
}

ScalarField solve_poisson(const ScalarField& f) {
  const Grid& g = f.grid;
  ScalarField out(g);
  std::vector<double> t(static_cast<size_t>(g.size()));
  dst_raw(g, f.data(), t.data());
  const auto lx = lambda_axis(g.nx, g.hx, g.domain.Lx);
  const auto ly = lambda_axis(g.ny, g.hy, g.domain.Ly);
  const double norm = 1.0 / (4.0 * (g.nx + 1.0) * (g.ny + 1.0));
#pragma omp parallel for
  for (int k1 = 0; k1 < g.nx; ++k1)
    for (int k2 = 0; k2 < g.ny; ++k2)
      t[k1 * g.ny + k2] *= norm / (lx[k1] + ly[k2]);
  dst_raw(g, t.data(), out.data());
  return out;
}

ScalarField solve_helmholtz(const ScalarField& f, double a) {
  if (a < 0.0) throw std::invalid_argument("solve_helmholtz: a must be nonnegative");
  const Grid& g = f.grid;
  ScalarField out(g);
  std::vector<double> t(static_cast<size_t>(g.size()));
  dst_raw(g, f.data(), t.data());
  const auto lx = lambda_axis(g.nx, g.hx, g.domain.Lx);
  const auto ly = lambda_axis(g.ny, g.hy, g.domain.Ly);
  const double norm = 1.0 / (4.0 * (g.nx + 1.0) * (g.ny + 1.0));
#pragma omp parallel for
  for (int k1 = 0; k1 < g.nx; ++k1)
    for (int k2 = 0; k2 < g.ny; ++k2)
      t[k1 * g.ny + k2] *= norm / (1.0 + a * (lx[k1] + ly[k2]));
  dst_raw(g, t.data(), out.data());
  return out;
}

ScalarField resample(const ScalarField& f, const Grid& target) {
  const Grid& s = f.grid;
  if (s.domain.Lx != target.domain.Lx || s.domain.Ly != target.domain.Ly)
    throw std::invalid_argument("resample: domains differ");
  if (target.same_as(s)) return f;
  SpectralCoeffs c = dst_forward(f);
  // Separable evaluation: out = Sx * C * Sy with sine sample matrices.
  std::vector<double> sx(static_cast<size_t>(target.nx) * s.nx);
  for (int i = 0; i < target.nx; ++i)
    for (int k = 1; k <= s.nx; ++k)
      sx[static_cast<size_t>(i) * s.nx + (k - 1)] =
          std::sin(k * M_PI * target.x(i) / s.domain.Lx);
  std::vector<double> sy(static_cast<size_t>(s.ny) * target.ny);
  for (int k = 1; k <= s.ny; ++k)
    for (int j = 0; j < target.ny; ++j)
      sy[static_cast<size_t>(k - 1) * target.ny + j] =
          std::sin(k * M_PI * target.y(j) / s.domain.Ly);
  std::vector<double> mid(static_cast<size_t>(target.nx) * s.ny, 0.0);
  for (int i = 0; i < target.nx; ++i)
    for (int k1 = 0; k1 < s.nx; ++k1) {
      const double w = sx[static_cast<size_t>(i) * s.nx + k1];
      if (w == 0.0) continue;
      const double* row = &c.coeffs[static_cast<size_t>(k1) * s.ny];
      double* out = &mid[static_cast<size_t>(i) * s.ny];
      for (int k2 = 0; k2 < s.ny; ++k2) out[k2] += w * row[k2];
    }
  ScalarField out(target);
  for (int i = 0; i < target.nx; ++i)
    for (int j = 0; j < target.ny; ++j) {
      double acc = 0.0;
      const double* row = &mid[static_cast<size_t>(i) * s.ny];
      for (int k2 = 0; k2 < s.ny; ++k2)
        acc += row[k2] * sy[static_cast<size_t>(k2) * target.ny + j];
      out.at(i, j) = acc;
    }
  // Coefficients are in the grid-orthonormal basis whose continuum form is
  // (2/sqrt(LxLy)) sin(k1 pi x/Lx) sin(k2 pi y/Ly).
  const double scale = 2.0 / std::sqrt(s.domain.Lx * s.domain.Ly);
  for (double& v : out.values) v *= scale;
  return out;
}

std::vector<LaplaceEigenpair> laplace_eigenbasis(const Grid& g, int n) {
  if (n < 1 || n > g.size())
    throw std::invalid_argument("laplace_eigenbasis: n out of range");
  std::vector<std::tuple<double, int, int>> modes;
  modes.reserve(static_cast<size_t>(g.size()));
  for (int k1 = 1; k1 <= g.nx; ++k1)
    for (int k2 = 1; k2 <= g.ny; ++k2)
      modes.emplace_back(lambda_continuous(g, k1, k2), k1, k2);
  std::sort(modes.begin(), modes.end());

  const double amp = 2.0 / std::sqrt(g.domain.Lx * g.domain.Ly);
  std::vector<LaplaceEigenpair> basis(n);
  for (int q = 0; q < n; ++q) {
    auto [lam, k1, k2] = modes[q];
    LaplaceEigenpair& p = basis[q];
    p.k1 = k1;
    p.k2 = k2;
    p.lam_continuous = lam;
    p.lam_discrete = lambda_discrete(g, k1, k2);
    p.v = sample(g, [&](double x, double y) {
      return amp * std::sin(k1 * M_PI * x / g.domain.Lx) * std::sin(k2 * M_PI * y / g.domain.Ly);
    });
  }
  return basis;
}

}  // namespace ksb
