#include "ksb/grid.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

#include "ksb/kernels.hpp"

namespace ksb {

Grid build_grid(double Lx, double Ly, int nx, int ny) {
  if (!(Lx > 0.0) || !(Ly > 0.0)) throw std::invalid_argument("build_grid: extents must be positive");
  if (nx < 3 || ny < 3) throw std::invalid_argument("build_grid: need at least 3 interior nodes per axis");
  Grid g;
  g.domain = {Lx, Ly};
  g.nx = nx;
  g.ny = ny;
  g.hx = Lx / (nx + 1);
  g.hy = Ly / (ny + 1);
  return g;
}

ScalarField laplacian(const ScalarField& f) {
  ScalarField out(f.grid);
  kern::laplacian(f.grid.nx, f.grid.ny, f.grid.hx, f.grid.hy, f.data(), out.data());
  return out;
}

ScalarField grad_x(const ScalarField& f) {
  ScalarField out(f.grid);
  kern::grad_x(f.grid.nx, f.grid.ny, f.grid.hx, f.data(), out.data());
  return out;
}

ScalarField grad_y(const ScalarField& f) {
  ScalarField out(f.grid);
  kern::grad_y(f.grid.nx, f.grid.ny, f.grid.hy, f.data(), out.data());
  return out;
}

ScalarField apply_operator(const ScalarField& f, Op op) {
  switch (op) {
    case Op::laplacian: return laplacian(f);
    case Op::grad_x: return grad_x(f);
    case Op::grad_y: return grad_y(f);
  }
  throw std::invalid_argument("apply_operator: unknown op");
}

double integrate(const ScalarField& f) {
  return f.grid.hx * f.grid.hy * kern::sum(f.grid.size(), f.data());
}

double inner(const ScalarField& a, const ScalarField& b) {
  return a.grid.hx * a.grid.hy * kern::dot(a.grid.size(), a.data(), b.data());
}

double l2_norm(const ScalarField& f) {
  return std::sqrt(f.grid.hx * f.grid.hy * kern::sum_sq(f.grid.size(), f.data()));
}

double max_abs(const ScalarField& f) { return kern::max_abs(f.grid.size(), f.data()); }

double min_value(const ScalarField& f) { return kern::min_value(f.grid.size(), f.data()); }

double boundary_flux(const ScalarField& f) {
  const Grid& g = f.grid;
  const int nx = g.nx, ny = g.ny;
  // One-sided second-order normal derivative at a wall: with f = 0 on the wall
  // and interior values f1 (adjacent) and f2 (next), f'(wall, into domain)
  // = (4 f1 - f2) / (2h); the outward normal flips the sign on the near walls.
  double fx = 0.0;
  for (int j = 0; j < ny; ++j) {
    const double left = -(4.0 * f.at(0, j) - f.at(1, j)) / (2.0 * g.hx);
    const double right = (f.at(nx - 2, j) - 4.0 * f.at(nx - 1, j)) / (2.0 * g.hx);
    fx += left + right;
  }
  double fy = 0.0;
  for (int i = 0; i < nx; ++i) {
    const double bottom = -(4.0 * f.at(i, 0) - f.at(i, 1)) / (2.0 * g.hy);
    const double top = (f.at(i, ny - 2) - 4.0 * f.at(i, ny - 1)) / (2.0 * g.hy);
    fy += bottom + top;
  }
  return g.hy * fx + g.hx * fy;
}

void dump_field(std::ostream& os, const ScalarField& f, double t, const std::string& name) {
  char buf[96];
  os << "FIELD " << f.grid.nx << ' ' << f.grid.ny << ' ';
  std::snprintf(buf, sizeof buf, "%.17g %.17g %.17g", f.grid.domain.Lx, f.grid.domain.Ly, t);
  os << buf << ' ' << name << '\n';
  for (int i = 0; i < f.grid.nx; ++i) {
    for (int j = 0; j < f.grid.ny; ++j) {
      std::snprintf(buf, sizeof buf, "%.17g", f.at(i, j));
      os << buf << (j + 1 < f.grid.ny ? " " : "");
    }
    os << '\n';
  }
}

}  // namespace ksb
