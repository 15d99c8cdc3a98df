#include "ksb/flow.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "ksb/kernels.hpp"
#include "ksb/spectral.hpp"

namespace ksb {

namespace {

void thom_walls(const ScalarField& psi, std::vector<double>& left,
                std::vector<double>& right, std::vector<double>& bottom,
                std::vector<double>& top) {
  const Grid& g = psi.grid;
  left.resize(g.ny);
  right.resize(g.ny);
  bottom.resize(g.nx);
  top.resize(g.nx);
  const double cx = 2.0 / (g.hx * g.hx), cy = 2.0 / (g.hy * g.hy);
  for (int j = 0; j < g.ny; ++j) {
    left[j] = cx * psi.at(0, j);
    right[j] = cx * psi.at(g.nx - 1, j);
  }
  for (int i = 0; i < g.nx; ++i) {
    bottom[i] = cy * psi.at(i, 0);
    top[i] = cy * psi.at(i, g.ny - 1);
  }
}

}  // namespace

FlowState make_flow_state(const Grid& g) {
  FlowState s;
  s.psi = ScalarField(g);
  s.omega = ScalarField(g);
  s.u = VectorField(g);
  s.wall_left.assign(g.ny, 0.0);
  s.wall_right.assign(g.ny, 0.0);
  s.wall_bottom.assign(g.nx, 0.0);
  s.wall_top.assign(g.nx, 0.0);
  return s;
}

FlowState flow_state_from_psi(const ScalarField& psi) {
  FlowState s;
  s.psi = psi;
  s.omega = laplacian(psi);
  s.u = velocity_from_streamfunction(psi);
  thom_walls(psi, s.wall_left, s.wall_right, s.wall_bottom, s.wall_top);
  return s;
}

ScalarField buoyancy_curl(const ScalarField& rho, double g) {
  ScalarField out = grad_x(rho);
  for (double& v : out.values) v *= g;
  return out;
}

double flow_stable_dt(const Grid& g) {
  const double h = std::min(g.hx, g.hy);
  return flow_dt_safety * h * h;
}

VectorField velocity_from_streamfunction(const ScalarField& psi) {
  const Grid& g = psi.grid;
  VectorField u(g);
  kern::grad_y(g.nx, g.ny, g.hy, psi.data(), u.ux.data());
  for (double& v : u.ux) v = -v;
  kern::grad_x(g.nx, g.ny, g.hx, psi.data(), u.uy.data());
  return u;
}

FlowState step_flow(const FlowState& s, const ScalarField& rho, double g, double dt) {
  if (dt <= 0.0) throw std::invalid_argument("step_flow: dt must be positive");
  const Grid& gr = s.omega.grid;
  if (!rho.grid.same_as(gr)) throw std::invalid_argument("step_flow: grid mismatch");

  ScalarField rhs = buoyancy_curl(rho, g);
  for (int q = 0; q < gr.size(); ++q)
    rhs.values[q] = s.omega.values[q] + dt * rhs.values[q];
  // Lagged Thom wall vorticity enters the implicit solve as Dirichlet data,
  // folded into the right-hand side at the wall-adjacent ring.
  const double ax = dt / (gr.hx * gr.hx), ay = dt / (gr.hy * gr.hy);
  for (int j = 0; j < gr.ny; ++j) {
    rhs.at(0, j) += ax * s.wall_left[j];
    rhs.at(gr.nx - 1, j) += ax * s.wall_right[j];
  }
  for (int i = 0; i < gr.nx; ++i) {
    rhs.at(i, 0) += ay * s.wall_bottom[i];
    rhs.at(i, gr.ny - 1) += ay * s.wall_top[i];
  }

  FlowState out;
  out.omega = solve_helmholtz(rhs, dt);
  ScalarField neg(gr);
  for (int q = 0; q < gr.size(); ++q) neg.values[q] = -out.omega.values[q];
  out.psi = solve_poisson(neg);
  out.u = velocity_from_streamfunction(out.psi);
  thom_walls(out.psi, out.wall_left, out.wall_right, out.wall_bottom, out.wall_top);
  out.t = s.t + dt;
  return out;
}

std::vector<StokesEigenpair> stokes_eigenbasis(const Grid& grid, int m) {
  const int N = grid.size();
  if (m < 1 || m > max_stokes_modes || m > N)
    throw std::invalid_argument("stokes_eigenbasis: m out of range");

  const int nx = grid.nx, ny = grid.ny;
  const double hx = grid.hx, hy = grid.hy;
  std::vector<double> t1(static_cast<size_t>(N)), t2(static_cast<size_t>(N));

  // B = Lap_h^2 + T, the clamped biharmonic with Thom's closure folded into a
  // diagonal term 2/h^4 at each wall-adjacent node.
  auto apply_biharmonic = [&](const double* f, double* out) {
    kern::serial::laplacian(nx, ny, hx, hy, f, t1.data());
    kern::serial::laplacian(nx, ny, hx, hy, t1.data(), out);
    const double tx = 2.0 / (hx * hx * hx * hx), ty = 2.0 / (hy * hy * hy * hy);
    for (int j = 0; j < ny; ++j) {
      out[j] += tx * f[j];
      out[(nx - 1) * ny + j] += tx * f[(nx - 1) * ny + j];
    }
    for (int i = 0; i < nx; ++i) {
      out[i * ny] += ty * f[i * ny];
      out[i * ny + ny - 1] += ty * f[i * ny + ny - 1];
    }
  };

  // Gradient-energy metric: psi' (Dx^T Dx + Dy^T Dy) psi equals the plain dot
  // product of the centered perp gradients, so eigenvectors come out with an
  // exactly diagonal velocity Gram matrix.
  auto apply_gradient_metric = [&](const double* f, double* out) {
    kern::serial::grad_x(nx, ny, hx, f, t1.data());
    kern::serial::grad_x(nx, ny, hx, t1.data(), out);
    kern::serial::grad_y(nx, ny, hy, f, t1.data());
    kern::serial::grad_y(nx, ny, hy, t1.data(), t2.data());
    for (int q = 0; q < N; ++q) out[q] = -(out[q] + t2[q]);
  };

  // The metric is singular (checkerboard kernel), so solve the inverted pencil
  // M psi = mu B psi with B positive definite; the largest m values mu = 1/eta
  // give the smallest Stokes eigenvalues and the spurious kernel stays at mu=0.
  std::vector<double> metric_mat(static_cast<size_t>(N) * N);
  std::vector<double> biharm_mat(static_cast<size_t>(N) * N);
  std::vector<double> unit(static_cast<size_t>(N), 0.0);
  for (int q = 0; q < N; ++q) {
    unit[q] = 1.0;
    apply_gradient_metric(unit.data(), &metric_mat[static_cast<size_t>(q) * N]);
    apply_biharmonic(unit.data(), &biharm_mat[static_cast<size_t>(q) * N]);
    unit[q] = 0.0;
  }

  std::vector<double> mu(static_cast<size_t>(N));
  std::vector<double> z(static_cast<size_t>(N) * m);
  std::vector<lapack_int> ifail(static_cast<size_t>(N));
  lapack_int found = 0;
  lapack_int info = LAPACKE_dsygvx(
      LAPACK_COL_MAJOR, 1, 'V', 'I', 'L', N, metric_mat.data(), N,
      biharm_mat.data(), N, 0.0, 0.0, N - m + 1, N, 2.0 * LAPACKE_dlamch('S'),
      &found, mu.data(), z.data(), N, ifail.data());
  if (info != 0 || found != m)
    throw std::runtime_error("stokes_eigenbasis: dsygvx failed, info=" +
                             std::to_string(info) + ", found=" + std::to_string(found) +
                             " of " + std::to_string(m) + " modes");

  std::vector<StokesEigenpair> basis;
  basis.reserve(static_cast<size_t>(m));
  for (int q = m - 1; q >= 0; --q) {
    if (!(mu[q] > 0.0))
      throw std::runtime_error("stokes_eigenbasis: nonpositive pencil eigenvalue " +
                               std::to_string(mu[q]) + "; increase the grid or reduce m");
    StokesEigenpair p;
    p.eta = 1.0 / mu[q];
    p.psi = ScalarField(grid);
    std::copy_n(&z[static_cast<size_t>(q) * N], N, p.psi.values.begin());

    const double amax = kern::serial::max_abs(N, p.psi.data());
    for (int r = 0; r < N; ++r) {
      if (std::abs(p.psi.values[r]) > 1e-12 * amax) {
        if (p.psi.values[r] < 0.0)
          for (double& v : p.psi.values) v = -v;
        break;
      }
    }

    p.w = velocity_from_streamfunction(p.psi);
    const double nrm = std::sqrt(hx * hy * (kern::serial::sum_sq(N, p.w.ux.data()) +
                                            kern::serial::sum_sq(N, p.w.uy.data())));
    if (!(nrm > 0.0)) throw std::runtime_error("stokes_eigenbasis: degenerate mode");
    for (double& v : p.psi.values) v /= nrm;
    for (double& v : p.w.ux) v /= nrm;
    for (double& v : p.w.uy) v /= nrm;
    basis.push_back(std::move(p));
  }

  std::stable_sort(basis.begin(), basis.end(),
                   [](const StokesEigenpair& a, const StokesEigenpair& b) {
                     if (a.eta != b.eta) return a.eta < b.eta;
                     return std::lexicographical_compare(
                         a.psi.values.begin(), a.psi.values.end(),
                         b.psi.values.begin(), b.psi.values.end());
                   });
  return basis;
}

}  // namespace ksb
