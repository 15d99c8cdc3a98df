#pragma once

/// @file grid.hpp
/// @brief Rectangle domain, uniform interior grid, Dirichlet fields, discrete
///        calculus (stencil operators, quadrature, boundary flux) and dumps.
///
/// All fields store interior nodes only; the homogeneous Dirichlet boundary is
/// implicit. Node (i,j), 0 <= i < nx, 0 <= j < ny, sits at ((i+1)hx, (j+1)hy)
/// with hx = Lx/(nx+1), hy = Ly/(ny+1). Storage is row-major with j fastest.

#include <iosfwd>
#include <string>
#include <vector>

namespace ksb {

struct Domain {
  double Lx = 0.0;
  double Ly = 0.0;
};

struct Grid {
  Domain domain;
  int nx = 0, ny = 0;
  double hx = 0.0, hy = 0.0;

  int size() const { return nx * ny; }
  int idx(int i, int j) const { return i * ny + j; }
  double x(int i) const { return (i + 1) * hx; }
  double y(int j) const { return (j + 1) * hy; }
  bool same_as(const Grid& o) const {
    return nx == o.nx && ny == o.ny && domain.Lx == o.domain.Lx && domain.Ly == o.domain.Ly;
  }
};

/// Throws std::invalid_argument on non-positive extents or counts < 3.
Grid build_grid(double Lx, double Ly, int nx, int ny);

struct ScalarField {
  Grid grid;
  std::vector<double> values;

  ScalarField() = default;
  explicit ScalarField(const Grid& g) : grid(g), values(static_cast<size_t>(g.size()), 0.0) {}

  double& at(int i, int j) { return values[grid.idx(i, j)]; }
  double at(int i, int j) const { return values[grid.idx(i, j)]; }
  double* data() { return values.data(); }
  const double* data() const { return values.data(); }
};

struct VectorField {
  Grid grid;
  std::vector<double> ux, uy;

  VectorField() = default;
  explicit VectorField(const Grid& g)
      : grid(g),
        ux(static_cast<size_t>(g.size()), 0.0),
        uy(static_cast<size_t>(g.size()), 0.0) {}
};

/// Samples fn(x, y) at the interior nodes.
template <typename Fn>
ScalarField sample(const Grid& g, Fn&& fn) {
  ScalarField f(g);
  for (int i = 0; i < g.nx; ++i)
    for (int j = 0; j < g.ny; ++j) f.at(i, j) = fn(g.x(i), g.y(j));
  return f;
}

enum class Op { laplacian, grad_x, grad_y };

/// Second-order centered stencils with implicit Dirichlet zeros off-grid.
ScalarField apply_operator(const ScalarField& f, Op op);

ScalarField laplacian(const ScalarField& f);
ScalarField grad_x(const ScalarField& f);
ScalarField grad_y(const ScalarField& f);

/// Quadrature: hx*hy*sum(values). Exact for the implied piecewise rule since
/// Dirichlet fields contribute zero on the boundary.
double integrate(const ScalarField& f);
/// Quadrature inner product hx*hy*<a,b>.
double inner(const ScalarField& a, const ScalarField& b);
double l2_norm(const ScalarField& f);
double max_abs(const ScalarField& f);
double min_value(const ScalarField& f);

/// Contour integral of the outward normal derivative, one-sided second-order
/// at each wall face using the wall zero and two interior values.
double boundary_flux(const ScalarField& f);

/// Writes "FIELD nx ny Lx Ly t name" then the values row-major, %.17g.
void dump_field(std::ostream& os, const ScalarField& f, double t, const std::string& name);

}  // namespace ksb
