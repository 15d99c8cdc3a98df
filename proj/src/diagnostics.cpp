#include "ksb/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

#include "ksb/kernels.hpp"
#include "ksb/spectral.hpp"

namespace ksb {

namespace {

double weighted_y_moment(const ScalarField& rho) {
  const Grid& g = rho.grid;
  double acc = 0.0;
  for (int j = 0; j < g.ny; ++j) {
    const double w = g.y(j) - g.domain.Ly;
    double col = 0.0;
    for (int i = 0; i < g.nx; ++i) col += rho.at(i, j);
    acc += w * col;
  }
  return g.hx * g.hy * acc;
}

// Contour integral of (y - Ly) times the outward normal derivative, one-sided
// second-order like boundary_flux; the top wall weight vanishes.
double weighted_boundary_flux(const ScalarField& f) {
  const Grid& g = f.grid;
  double acc = 0.0;
  for (int i = 0; i < g.nx; ++i) {
    const double dn = -(4.0 * f.at(i, 0) - f.at(i, 1)) / (2.0 * g.hy);
    acc += g.hx * (0.0 - g.domain.Ly) * dn;
  }
  for (int j = 0; j < g.ny; ++j) {
    const double w = g.y(j) - g.domain.Ly;
    const double dl = -(4.0 * f.at(0, j) - f.at(1, j)) / (2.0 * g.hx);
    const double dr = -(4.0 * f.at(g.nx - 1, j) - f.at(g.nx - 2, j)) / (2.0 * g.hx);
    acc += g.hy * w * (dl + dr);
  }
  return acc;
}

double vector_l2(const VectorField& u) {
  const int N = u.grid.size();
  return std::sqrt(u.grid.hx * u.grid.hy *
                   (kern::sum_sq(N, u.ux.data()) + kern::sum_sq(N, u.uy.data())));
}

double vector_h1(const VectorField& u) {
  const Grid& g = u.grid;
  const int N = g.size();
  std::vector<double> d(static_cast<size_t>(N));
  double acc = 0.0;
  kern::grad_x(g.nx, g.ny, g.hx, u.ux.data(), d.data());
  acc += kern::sum_sq(N, d.data());
  kern::grad_y(g.nx, g.ny, g.hy, u.ux.data(), d.data());
  acc += kern::sum_sq(N, d.data());
  kern::grad_x(g.nx, g.ny, g.hx, u.uy.data(), d.data());
  acc += kern::sum_sq(N, d.data());
  kern::grad_y(g.nx, g.ny, g.hy, u.uy.data(), d.data());
  acc += kern::sum_sq(N, d.data());
  return std::sqrt(g.hx * g.hy * acc);
}

}  // namespace

double flow_energy(const FlowState& flow) {
  return -0.5 * inner(flow.psi, flow.omega);
}

double flow_dissipation(const FlowState& flow) {
  const Grid& g = flow.psi.grid;
  double wall_x = 0.0;
  for (int j = 0; j < g.ny; ++j)
    wall_x += flow.psi.at(0, j) * flow.wall_left[j] +
              flow.psi.at(g.nx - 1, j) * flow.wall_right[j];
  double wall_y = 0.0;
  for (int i = 0; i < g.nx; ++i)
    wall_y += flow.psi.at(i, 0) * flow.wall_bottom[i] +
              flow.psi.at(i, g.ny - 1) * flow.wall_top[i];
  return inner(flow.omega, flow.omega) +
         g.hx * g.hy * (wall_x / (g.hx * g.hx) + wall_y / (g.hy * g.hy));
}

DiagnosticsRecord snapshot(const CoupledState& state, double g,
                           const DiagnosticsRecord* prev,
                           const CoupledState* prev_state) {
  const ScalarField& rho = state.density.rho;
  const Grid& gr = rho.grid;
  const int N = gr.size();
  DiagnosticsRecord r;
  r.t = state.t;
  r.mass = integrate(rho);
  r.l2_rho = l2_norm(rho);
  {
    std::vector<double> d(static_cast<size_t>(N));
    double acc = 0.0;
    kern::grad_x(gr.nx, gr.ny, gr.hx, rho.data(), d.data());
    acc += kern::sum_sq(N, d.data());
    kern::grad_y(gr.nx, gr.ny, gr.hy, rho.data(), d.data());
    acc += kern::sum_sq(N, d.data());
    r.h1_rho = std::sqrt(gr.hx * gr.hy * acc);
  }
  r.linf_rho = max_abs(rho);
  r.min_rho = min_value(rho);
  r.l2_u = vector_l2(state.flow.u);
  r.h1_u = vector_h1(state.flow.u);
  r.flux = boundary_flux(rho);
  r.moment = weighted_y_moment(rho);
  if (prev) {
    const double dt = r.t - prev->t;
    r.criterion_integral = prev->criterion_integral +
                           0.5 * (prev->l2_rho * prev->l2_rho + r.l2_rho * r.l2_rho) *
                               std::max(dt, 0.0);
    if (dt > 0.0 && prev_state) {
      const double ek = flow_energy(state.flow);
      const double ekm = flow_energy(prev_state->flow);
      const double work = g * gr.hx * gr.hy *
                          kern::dot(N, rho.data(), state.flow.u.uy.data());
      r.energy_residual = (ek - ekm) / dt + flow_dissipation(state.flow) - work;
    }
  }
  return r;
}

double weighted_moment_identity_residual(const std::vector<CoupledState>& states) {
  if (states.size() < 3)
    throw std::invalid_argument("weighted_moment_identity_residual: need >= 3 snapshots");
  const double dt = states[1].t - states[0].t;
  if (dt <= 0.0)
    throw std::invalid_argument("weighted_moment_identity_residual: nonincreasing times");
  for (size_t k = 1; k < states.size(); ++k) {
    const double step = states[k].t - states[k - 1].t;
    if (std::abs(step - dt) > 1e-9 * std::max(1.0, dt))
      throw std::invalid_argument("weighted_moment_identity_residual: nonuniform spacing");
  }
  double worst = 0.0;
  for (size_t k = 1; k + 1 < states.size(); ++k) {
    const ScalarField& rho = states[k].density.rho;
    const Grid& g = rho.grid;
    const int N = g.size();
    const double lhs =
        g.hx * g.hy * kern::dot(N, rho.data(), states[k].flow.u.uy.data());
    const double ddt = (weighted_y_moment(states[k + 1].density.rho) -
                        weighted_y_moment(states[k - 1].density.rho)) /
                       (2.0 * dt);
    const ScalarField dy_rho = grad_y(rho);
    const double int_dy = integrate(dy_rho);
    const double bdry = weighted_boundary_flux(rho);
    const ScalarField dy_c = grad_y(states[k].density.c);
    const double chem = g.hx * g.hy * kern::dot(N, rho.data(), dy_c.data());
    const double rhs = ddt + int_dy - bdry - chem;
    worst = std::max(worst, std::abs(lhs - rhs));
  }
  return worst;
}

BlowupVerdict detect_blowup(const std::vector<DiagnosticsRecord>& traj,
                            const BlowupCeilings& ceilings) {
  if (traj.empty()) throw std::invalid_argument("detect_blowup: empty trajectory");
  for (const DiagnosticsRecord& r : traj) {
    const double probe[] = {r.t,     r.mass,   r.l2_rho, r.h1_rho,
                            r.linf_rho, r.min_rho, r.l2_u,   r.h1_u,
                            r.flux,  r.moment, r.energy_residual, r.criterion_integral};
    for (double v : probe)
      if (!std::isfinite(v)) return BlowupVerdict::suspected;
    if (r.linf_rho > ceilings.linf_ceiling) return BlowupVerdict::suspected;
  }
  const size_t K = traj.size();
  if (K >= 10) {
    const size_t w = std::max<size_t>(2, K / 10);
    const auto rate = [&](size_t a, size_t b) {
      const double span = traj[b].t - traj[a].t;
      if (span <= 0.0) return 0.0;
      return (traj[b].criterion_integral - traj[a].criterion_integral) / span;
    };
    const double early = rate(0, w - 1);
    const double late = rate(K - w, K - 1);
    if (early > 0.0 && late >= ceilings.accel_factor * early)
      return BlowupVerdict::suspected;
  }
  return BlowupVerdict::alive;
}

QuenchFit fit_quench_rate(const std::vector<DiagnosticsRecord>& traj, double eps_quench) {
  QuenchFit f;
  if (eps_quench <= 0.0) throw std::invalid_argument("fit_quench_rate: eps_quench must be positive");
  size_t k0 = traj.size();
  for (size_t k = 0; k < traj.size(); ++k) {
    if (traj[k].l2_rho * traj[k].l2_rho < eps_quench) {
      k0 = k;
      break;
    }
  }
  if (k0 == traj.size()) return f;
  f.entered = true;
  f.t_enter = traj[k0].t;

  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  int cnt = 0;
  for (size_t k = k0; k < traj.size(); ++k) {
    const double v = traj[k].l2_rho * traj[k].l2_rho;
    if (v <= 0.0) continue;
    const double x = traj[k].t, y = std::log(v);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++cnt;
  }
  f.samples = cnt;
  if (cnt < 2) return f;
  const double det = cnt * sxx - sx * sx;
  if (det == 0.0) return f;
  const double slope = (cnt * sxy - sx * sy) / det;
  const double icept = (sy - slope * sx) / cnt;
  f.rate = -slope;
  double ss_res = 0.0, ss_tot = 0.0;
  const double mean = sy / cnt;
  for (size_t k = k0; k < traj.size(); ++k) {
    const double v = traj[k].l2_rho * traj[k].l2_rho;
    if (v <= 0.0) continue;
    const double y = std::log(v);
    const double e = y - (icept + slope * traj[k].t);
    ss_res += e * e;
    ss_tot += (y - mean) * (y - mean);
  }
  f.r2 = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
  f.valid = f.samples >= 20 && f.r2 >= 0.99;
  return f;
}

GScalingReport g_scaling_report(const std::vector<GScalingPoint>& points) {
  std::vector<GScalingPoint> used;
  for (const GScalingPoint& p : points)
    if (p.g > 0.0 && p.int_l2u2 > 0.0 && p.int_h1u2 > 0.0) used.push_back(p);
  if (used.size() < 4)
    throw std::invalid_argument("g_scaling_report: need >= 4 positive data points");
  double gmin = used.front().g, gmax = used.front().g;
  for (const GScalingPoint& p : used) {
    gmin = std::min(gmin, p.g);
    gmax = std::max(gmax, p.g);
  }
  if (gmax < 99.99 * gmin)
    throw std::invalid_argument("g_scaling_report: g values must span two decades");

  const auto slope_of = [&](auto value) {
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    const int cnt = static_cast<int>(used.size());
    for (const GScalingPoint& p : used) {
      const double x = std::log(p.g), y = std::log(value(p));
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
    }
    return (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
  };
  GScalingReport rep;
  rep.slope_l2 = slope_of([](const GScalingPoint& p) { return p.int_l2u2; });
  rep.slope_h1 = slope_of([](const GScalingPoint& p) { return p.int_h1u2; });
  rep.points_used = static_cast<int>(used.size());
  return rep;
}

double moser_partial_product(int n, int d) {
  if (n < 0) throw std::invalid_argument("moser_partial_product: n must be nonnegative");
  if (d != 2 && d != 3) throw std::invalid_argument("moser_partial_product: d must be 2 or 3");
  double prod = 1.0;
  for (int j = 1; j <= n; ++j) {
    const double p = std::ldexp(1.0, j + 2);
    prod *= (p - d) / (p - 2.0 * d);
  }
  return prod;
}

double moser_closed_form(int n, int d) {
  if (n < 0) throw std::invalid_argument("moser_closed_form: n must be nonnegative");
  if (d != 2 && d != 3) throw std::invalid_argument("moser_closed_form: d must be 2 or 3");
  return (4.0 - std::ldexp(static_cast<double>(d), -n)) / (4.0 - d);
}

const char* const diagnostics_csv_header =
    "t,mass,l2_rho,h1_rho,linf_rho,min_rho,l2_u,h1_u,flux,moment,energy_residual,"
    "criterion_integral";

void write_csv(std::ostream& os, const std::vector<DiagnosticsRecord>& records) {
  os << diagnostics_csv_header << '\n';
  char buf[64];
  for (const DiagnosticsRecord& r : records) {
    const double vals[] = {r.t,     r.mass,   r.l2_rho, r.h1_rho,
                           r.linf_rho, r.min_rho, r.l2_u,   r.h1_u,
                           r.flux,  r.moment, r.energy_residual, r.criterion_integral};
    for (size_t i = 0; i < 12; ++i) {
      std::snprintf(buf, sizeof(buf), "%.17g", vals[i]);
      os << buf << (i + 1 < 12 ? "," : "");
    }
    os << '\n';
  }
}

}  // namespace ksb
