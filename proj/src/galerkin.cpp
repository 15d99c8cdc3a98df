#include "ksb/galerkin.hpp"

#include <cblas.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include "ksb/chemotaxis.hpp"
#include "ksb/kernels.hpp"

namespace ksb {

GalerkinBasis build_galerkin_basis(const Grid& grid, int n, int m) {
  GalerkinBasis b;
  b.grid = grid;
  b.laplace = laplace_eigenbasis(grid, n);
  if (m > 0) b.stokes = stokes_eigenbasis(grid, m);
  return b;
}

CoefficientTensors assemble_tensors(const GalerkinBasis& basis) {
  const Grid& g = basis.grid;
  const int n = basis.n(), m = basis.m(), N = g.size();
  if (n < 1) throw std::invalid_argument("assemble_tensors: empty Laplacian basis");
  const double hxhy = g.hx * g.hy;

  CoefficientTensors T;
  T.n = n;
  T.m = m;
  T.C.assign(static_cast<size_t>(n) * m * n, 0.0);
  T.D.assign(static_cast<size_t>(n) * n * n, 0.0);
  T.B.assign(static_cast<size_t>(n) * m, 0.0);
  T.lambda.resize(n);
  T.eta.resize(m);
  for (int l = 0; l < n; ++l) T.lambda[l] = basis.laplace[l].lam_continuous;
  for (int j = 0; j < m; ++j) T.eta[j] = basis.stokes[j].eta;

  // Mode values and analytic gradients, one column per mode.
  std::vector<double> V(static_cast<size_t>(N) * n);
  std::vector<double> Gx(static_cast<size_t>(N) * n);
  std::vector<double> Gy(static_cast<size_t>(N) * n);
  const double amp = 2.0 / std::sqrt(g.domain.Lx * g.domain.Ly);
  for (int k = 0; k < n; ++k) {
    const auto& mode = basis.laplace[k];
    std::copy(mode.v.values.begin(), mode.v.values.end(), V.begin() + static_cast<size_t>(k) * N);
    const double ax = mode.k1 * M_PI / g.domain.Lx;
    const double ay = mode.k2 * M_PI / g.domain.Ly;
    for (int i = 0; i < g.nx; ++i) {
      const double sx = std::sin(ax * g.x(i)), cx = std::cos(ax * g.x(i));
      for (int j2 = 0; j2 < g.ny; ++j2) {
        const double sy = std::sin(ay * g.y(j2)), cy = std::cos(ay * g.y(j2));
        const size_t p = static_cast<size_t>(k) * N + g.idx(i, j2);
        Gx[p] = amp * ax * cx * sy;
        Gy[p] = amp * ay * sx * cy;
      }
    }
  }

  std::vector<double> S(static_cast<size_t>(N) * n);
  std::vector<double> M(static_cast<size_t>(n) * n);

  // Advection: quadrature of (w_j . grad v_k, v_l), stored skew-symmetrized in
  // (l, k) so the modal energy identity holds to roundoff.
  for (int j = 0; j < m; ++j) {
    const double* wx = basis.stokes[j].w.ux.data();
    const double* wy = basis.stokes[j].w.uy.data();
    for (int k = 0; k < n; ++k) {
      const double* gx = &Gx[static_cast<size_t>(k) * N];
      const double* gy = &Gy[static_cast<size_t>(k) * N];
      double* sk = &S[static_cast<size_t>(k) * N];
      for (int p = 0; p < N; ++p) sk[p] = wx[p] * gx[p] + wy[p] * gy[p];
    }
    cblas_dgemm(CblasColMajor, CblasTrans, CblasNoTrans, n, n, N, hxhy, V.data(),
                N, S.data(), N, 0.0, M.data(), n);
    for (int l = 0; l < n; ++l)
      for (int k = 0; k < n; ++k)
        T.C[(static_cast<size_t>(l) * m + j) * n + k] =
            0.5 * (M[static_cast<size_t>(k) * n + l] - M[static_cast<size_t>(l) * n + k]);
  }

  // Chemotaxis: D_ljk = -(v_k grad c_j, grad v_l) after integrating the
  // divergence by parts; c_j is an exact stencil eigenfunction, so grad c_j is
  // the analytic mode gradient scaled by 1/lambda_discrete.
  for (int j = 0; j < n; ++j) {
    const double sj = 1.0 / basis.laplace[j].lam_discrete;
    const double* gxj = &Gx[static_cast<size_t>(j) * N];
    const double* gyj = &Gy[static_cast<size_t>(j) * N];
    for (int l = 0; l < n; ++l) {
      const double* gxl = &Gx[static_cast<size_t>(l) * N];
      const double* gyl = &Gy[static_cast<size_t>(l) * N];
      double* sl = &S[static_cast<size_t>(l) * N];
      for (int p = 0; p < N; ++p) sl[p] = gxj[p] * gxl[p] + gyj[p] * gyl[p];
    }
    cblas_dgemm(CblasColMajor, CblasTrans, CblasNoTrans, n, n, N, -hxhy * sj,
                V.data(), N, S.data(), N, 0.0, M.data(), n);
    for (int l = 0; l < n; ++l)
      for (int k = 0; k < n; ++k)
        T.D[(static_cast<size_t>(l) * n + j) * n + k] = M[static_cast<size_t>(l) * n + k];
  }

  // Buoyancy coupling: B_kl = (v_k, vertical component of w_l).
  if (m > 0) {
    std::vector<double> Wy(static_cast<size_t>(N) * m);
    std::vector<double> MB(static_cast<size_t>(n) * m);
    for (int j = 0; j < m; ++j)
      std::copy(basis.stokes[j].w.uy.begin(), basis.stokes[j].w.uy.end(),
                Wy.begin() + static_cast<size_t>(j) * N);
    cblas_dgemm(CblasColMajor, CblasTrans, CblasNoTrans, n, m, N, hxhy, V.data(),
                N, Wy.data(), N, 0.0, MB.data(), n);
    for (int k = 0; k < n; ++k)
      for (int l = 0; l < m; ++l)
        T.B[static_cast<size_t>(k) * m + l] = MB[static_cast<size_t>(l) * n + k];
  }

  return T;
}

CoefficientTensors truncate_tensors(const CoefficientTensors& T, int n2, int m2) {
  if (n2 < 1 || n2 > T.n || m2 < 0 || m2 > T.m)
    throw std::invalid_argument("truncate_tensors: sizes out of range");
  CoefficientTensors R;
  R.n = n2;
  R.m = m2;
  R.C.assign(static_cast<size_t>(n2) * m2 * n2, 0.0);
  R.D.assign(static_cast<size_t>(n2) * n2 * n2, 0.0);
  R.B.assign(static_cast<size_t>(n2) * m2, 0.0);
  R.lambda.assign(T.lambda.begin(), T.lambda.begin() + n2);
  R.eta.assign(T.eta.begin(), T.eta.begin() + m2);
  for (int l = 0; l < n2; ++l)
    for (int j = 0; j < m2; ++j)
      for (int k = 0; k < n2; ++k)
        R.C[(static_cast<size_t>(l) * m2 + j) * n2 + k] = T.c_at(l, j, k);
  for (int l = 0; l < n2; ++l)
    for (int j = 0; j < n2; ++j)
      for (int k = 0; k < n2; ++k)
        R.D[(static_cast<size_t>(l) * n2 + j) * n2 + k] = T.d_at(l, j, k);
  for (int k = 0; k < n2; ++k)
    for (int l = 0; l < m2; ++l) R.B[static_cast<size_t>(k) * m2 + l] = T.b_at(k, l);
  return R;
}

void galerkin_rhs(const GalerkinState& s, const CoefficientTensors& T, double g,
                  std::vector<double>& drho, std::vector<double>& du) {
  const int n = T.n, m = T.m;
  if (static_cast<int>(s.rho_modes.size()) != n || static_cast<int>(s.u_modes.size()) != m)
    throw std::invalid_argument("galerkin_rhs: dimension mismatch");
  drho.assign(static_cast<size_t>(n), 0.0);
  du.assign(static_cast<size_t>(m), 0.0);
  for (int l = 0; l < n; ++l) {
    double adv = 0.0;
    for (int j = 0; j < m; ++j) {
      const double uj = s.u_modes[j];
      if (uj == 0.0) continue;
      const double* Cl = &T.C[(static_cast<size_t>(l) * m + j) * n];
      double acc = 0.0;
      for (int k = 0; k < n; ++k) acc += Cl[k] * s.rho_modes[k];
      adv += uj * acc;
    }
    double chem = 0.0;
    for (int j = 0; j < n; ++j) {
      const double rj = s.rho_modes[j];
      if (rj == 0.0) continue;
      const double* Dl = &T.D[(static_cast<size_t>(l) * n + j) * n];
      double acc = 0.0;
      for (int k = 0; k < n; ++k) acc += Dl[k] * s.rho_modes[k];
      chem += rj * acc;
    }
    drho[l] = -adv - T.lambda[l] * s.rho_modes[l] + chem;
  }
  for (int l = 0; l < m; ++l) {
    double f = 0.0;
    for (int k = 0; k < n; ++k) f += T.B[static_cast<size_t>(k) * m + l] * s.rho_modes[k];
    du[l] = -T.eta[l] * s.u_modes[l] + g * f;
  }
}

double galerkin_stable_dt(const CoefficientTensors& T) {
  double mx = 0.0;
  for (double v : T.lambda) mx = std::max(mx, v);
  for (double v : T.eta) mx = std::max(mx, v);
  return mx > 0.0 ? 0.5 / mx : 1.0;
}

GalerkinTrajectory integrate_galerkin(const GalerkinState& s0, const CoefficientTensors& T,
                                      double g, double t_end, double dt, int stride) {
  if (dt <= 0.0) throw std::invalid_argument("integrate_galerkin: dt must be positive");
  if (stride < 1) stride = 1;
  GalerkinTrajectory traj;
  traj.samples.push_back(s0);
  const double span = t_end - s0.t;
  if (span <= 0.0) return traj;
  const long nsteps = std::max<long>(1, static_cast<long>(std::ceil(span / dt - 1e-9)));
  const double h = span / static_cast<double>(nsteps);
  const int n = T.n, m = T.m;

  GalerkinState s = s0;
  GalerkinState tmp;
  tmp.rho_modes.resize(n);
  tmp.u_modes.resize(m);
  std::vector<double> k1r, k1u, k2r, k2u, k3r, k3u, k4r, k4u;
  auto stage = [&](const GalerkinState& base, double a, const std::vector<double>& kr,
                   const std::vector<double>& ku) {
    for (int i = 0; i < n; ++i) tmp.rho_modes[i] = base.rho_modes[i] + a * kr[i];
    for (int i = 0; i < m; ++i) tmp.u_modes[i] = base.u_modes[i] + a * ku[i];
  };
  auto bounded = [](const std::vector<double>& v) {
    for (double x : v)
      if (!std::isfinite(x) || std::abs(x) > 1e10) return false;
    return true;
  };

  for (long step = 1; step <= nsteps; ++step) {
    const GalerkinState prev = s;
    galerkin_rhs(s, T, g, k1r, k1u);
    stage(s, 0.5 * h, k1r, k1u);
    galerkin_rhs(tmp, T, g, k2r, k2u);
    stage(s, 0.5 * h, k2r, k2u);
    galerkin_rhs(tmp, T, g, k3r, k3u);
    stage(s, h, k3r, k3u);
    galerkin_rhs(tmp, T, g, k4r, k4u);
    for (int i = 0; i < n; ++i)
      s.rho_modes[i] += h / 6.0 * (k1r[i] + 2.0 * k2r[i] + 2.0 * k3r[i] + k4r[i]);
    for (int i = 0; i < m; ++i)
      s.u_modes[i] += h / 6.0 * (k1u[i] + 2.0 * k2u[i] + 2.0 * k3u[i] + k4u[i]);
    s.t = s0.t + step * h;
    if (!bounded(s.rho_modes) || !bounded(s.u_modes)) {
      if (traj.samples.back().t != prev.t) traj.samples.push_back(prev);
      traj.blowup_suspected = true;
      return traj;
    }
    if (step % stride == 0 || step == nsteps) traj.samples.push_back(s);
  }
  return traj;
}

GalerkinState project_initial_data(const ScalarField& rho0, const ScalarField& psi0,
                                   const GalerkinBasis& basis) {
  if (!rho0.grid.same_as(basis.grid))
    throw std::invalid_argument("project_initial_data: rho0 grid mismatch");
  GalerkinState s;
  const int n = basis.n(), m = basis.m();
  s.rho_modes.assign(static_cast<size_t>(n), 0.0);
  s.u_modes.assign(static_cast<size_t>(m), 0.0);
  for (int l = 0; l < n; ++l) s.rho_modes[l] = inner(rho0, basis.laplace[l].v);
  if (m > 0 && !psi0.values.empty()) {
    if (!psi0.grid.same_as(basis.grid))
      throw std::invalid_argument("project_initial_data: psi0 grid mismatch");
    const VectorField u0 = velocity_from_streamfunction(psi0);
    const int N = basis.grid.size();
    for (int j = 0; j < m; ++j) {
      const auto& w = basis.stokes[j].w;
      s.u_modes[j] = basis.grid.hx * basis.grid.hy *
                     (kern::dot(N, u0.ux.data(), w.ux.data()) +
                      kern::dot(N, u0.uy.data(), w.uy.data()));
    }
  }
  return s;
}

void reconstruct(const GalerkinState& s, const GalerkinBasis& basis, ScalarField& rho,
                 VectorField& u) {
  const int n = basis.n(), m = basis.m();
  if (static_cast<int>(s.rho_modes.size()) != n || static_cast<int>(s.u_modes.size()) != m)
    throw std::invalid_argument("reconstruct: dimension mismatch");
  const Grid& g = basis.grid;
  rho = ScalarField(g);
  u = VectorField(g);
  for (int l = 0; l < n; ++l) {
    const double a = s.rho_modes[l];
    if (a == 0.0) continue;
    const double* v = basis.laplace[l].v.data();
    for (int p = 0; p < g.size(); ++p) rho.values[p] += a * v[p];
  }
  for (int j = 0; j < m; ++j) {
    const double a = s.u_modes[j];
    if (a == 0.0) continue;
    const auto& w = basis.stokes[j].w;
    for (int p = 0; p < g.size(); ++p) {
      u.ux[p] += a * w.ux[p];
      u.uy[p] += a * w.uy[p];
    }
  }
}

void save_tensors(const std::string& path, const CoefficientTensors& T, const Grid& grid) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw std::runtime_error("save_tensors: cannot open " + path);
  char header[160];
  std::snprintf(header, sizeof(header), "GALTEN %d %d %d %d %.17g %.17g\n", T.n, T.m,
                grid.nx, grid.ny, grid.domain.Lx, grid.domain.Ly);
  os << header;
  auto put = [&](const std::vector<double>& v) {
    os.write(reinterpret_cast<const char*>(v.data()),
             static_cast<std::streamsize>(v.size() * sizeof(double)));
  };
  put(T.C);
  put(T.D);
  put(T.B);
  put(T.lambda);
  put(T.eta);
  if (!os) throw std::runtime_error("save_tensors: write failed for " + path);
}

bool load_tensors(const std::string& path, const Grid& grid, int n, int m,
                  CoefficientTensors& T) {
  std::ifstream is(path, std::ios::binary);
  if (!is) return false;
  std::string header;
  if (!std::getline(is, header)) return false;
  int fn = 0, fm = 0, fnx = 0, fny = 0;
  double flx = 0.0, fly = 0.0;
  if (std::sscanf(header.c_str(), "GALTEN %d %d %d %d %lg %lg", &fn, &fm, &fnx, &fny,
                  &flx, &fly) != 6)
    return false;
  if (fn != n || fm != m || fnx != grid.nx || fny != grid.ny ||
      flx != grid.domain.Lx || fly != grid.domain.Ly)
    return false;
  CoefficientTensors R;
  R.n = n;
  R.m = m;
  R.C.resize(static_cast<size_t>(n) * m * n);
  R.D.resize(static_cast<size_t>(n) * n * n);
  R.B.resize(static_cast<size_t>(n) * m);
  R.lambda.resize(static_cast<size_t>(n));
  R.eta.resize(static_cast<size_t>(m));
  auto get = [&](std::vector<double>& v) {
    is.read(reinterpret_cast<char*>(v.data()),
            static_cast<std::streamsize>(v.size() * sizeof(double)));
    return static_cast<size_t>(is.gcount()) == v.size() * sizeof(double);
  };
  if (!get(R.C) || !get(R.D) || !get(R.B) || !get(R.lambda) || !get(R.eta)) return false;
  T = std::move(R);
  return true;
}

CompareReport compare_backends(const RunConfig& config) {
  RunConfig cfg = config;
  validate_config(cfg);
  CompareReport rep;
  rep.t = cfg.t_end;

  StepOptions opt;
  opt.cfl = cfg.cfl;
  opt.chemotaxis = cfg.chemotaxis;
  opt.advection = cfg.advection;
  opt.linf_ceiling = cfg.linf_ceiling;

  const Grid fg = grid_from_config(cfg);
  CoupledState st = make_coupled_state(initial_rho(cfg, fg), initial_psi(cfg, fg));
  bool fd_ok = true;
  try {
    while (st.t < cfg.t_end - 1e-12 * cfg.t_end) {
      st = step_coupled(st, cfg.g, std::min(cfg.dt_target, cfg.t_end - st.t), opt);
    }
  } catch (const blowup_error&) {
    fd_ok = false;
  }

  const Grid gg = galerkin_grid_from_config(cfg);
  const GalerkinBasis basis = build_galerkin_basis(gg, cfg.n_modes, cfg.m_modes);
  const CoefficientTensors T = assemble_tensors(basis);
  const GalerkinState s0 =
      project_initial_data(initial_rho(cfg, gg), initial_psi(cfg, gg), basis);
  const double dt = std::min(cfg.dt_target, galerkin_stable_dt(T));
  const GalerkinTrajectory traj =
      integrate_galerkin(s0, T, cfg.g, cfg.t_end, dt, 1 << 30);

  if (!fd_ok || traj.blowup_suspected) {
    rep.verdict = "blowup-suspected";
    return rep;
  }
  const GalerkinState& sf = traj.samples.back();

  // Density difference, evaluated on the fd grid: the scalar modes are known
  // analytically everywhere.
  const std::vector<LaplaceEigenpair> fd_modes = laplace_eigenbasis(fg, cfg.n_modes);
  ScalarField rho_gal(fg);
  for (int l = 0; l < cfg.n_modes; ++l) {
    const double a = sf.rho_modes[l];
    if (a == 0.0) continue;
    const double* v = fd_modes[l].v.data();
    for (int p = 0; p < fg.size(); ++p) rho_gal.values[p] += a * v[p];
  }
  ScalarField drho(fg);
  for (int p = 0; p < fg.size(); ++p)
    drho.values[p] = st.density.rho.values[p] - rho_gal.values[p];
  const double denr = std::max(l2_norm(st.density.rho), l2_norm(rho_gal));
  rep.rel_l2_rho = denr > 0.0 ? l2_norm(drho) / denr : 0.0;

  // Velocity difference on the galerkin grid, fd side moved over by sine
  // interpolation.
  ScalarField rec_rho;
  VectorField u_gal;
  reconstruct(sf, basis, rec_rho, u_gal);
  ScalarField fdux(fg), fduy(fg);
  fdux.values = st.flow.u.ux;
  fduy.values = st.flow.u.uy;
  const ScalarField rux = resample(fdux, gg);
  const ScalarField ruy = resample(fduy, gg);
  double num = 0.0, den_fd = 0.0, den_gal = 0.0;
  for (int p = 0; p < gg.size(); ++p) {
    const double dx = rux.values[p] - u_gal.ux[p];
    const double dy = ruy.values[p] - u_gal.uy[p];
    num += dx * dx + dy * dy;
    den_fd += rux.values[p] * rux.values[p] + ruy.values[p] * ruy.values[p];
    den_gal += u_gal.ux[p] * u_gal.ux[p] + u_gal.uy[p] * u_gal.uy[p];
  }
  const double den = std::sqrt(std::max(den_fd, den_gal));
  rep.rel_l2_u = den > 0.0 ? std::sqrt(num) / den : 0.0;
  return rep;
}

}  // namespace ksb
