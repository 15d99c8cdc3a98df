#include "ksb/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace ksb::kern {

// Stencils. Off-grid neighbors are Dirichlet zeros; the (i,j) -> i*ny+j layout
// makes j the fast axis, so rows i parallelize cleanly.

void laplacian(int nx, int ny, double hx, double hy, const double* f, double* out) {
  const double ax = 1.0 / (hx * hx), ay = 1.0 / (hy * hy);
#pragma omp parallel for
  for (int i = 0; i < nx; ++i) {
    for (int j = 0; j < ny; ++j) {
      const double fc = f[i * ny + j];
      const double fl = (i > 0) ? f[(i - 1) * ny + j] : 0.0;
      const double fr = (i < nx - 1) ? f[(i + 1) * ny + j] : 0.0;
      const double fb = (j > 0) ? f[i * ny + j - 1] : 0.0;
      const double ft = (j < ny - 1) ? f[i * ny + j + 1] : 0.0;
      out[i * ny + j] = ax * (fl - 2.0 * fc + fr) + ay * (fb - 2.0 * fc + ft);
    }
  }
}

void grad_x(int nx, int ny, double hx, const double* f, double* out) {
  const double s = 1.0 / (2.0 * hx);
#pragma omp parallel for
  for (int i = 0; i < nx; ++i) {
    for (int j = 0; j < ny; ++j) {
      const double fl = (i > 0) ? f[(i - 1) * ny + j] : 0.0;
      const double fr = (i < nx - 1) ? f[(i + 1) * ny + j] : 0.0;
      out[i * ny + j] = s * (fr - fl);
    }
  }
}

void grad_y(int nx, int ny, double hy, const double* f, double* out) {
  const double s = 1.0 / (2.0 * hy);
#pragma omp parallel for
  for (int i = 0; i < nx; ++i) {
    for (int j = 0; j < ny; ++j) {
      const double fb = (j > 0) ? f[i * ny + j - 1] : 0.0;
      const double ft = (j < ny - 1) ? f[i * ny + j + 1] : 0.0;
      out[i * ny + j] = s * (ft - fb);
    }
  }
}

// Reductions: fixed-order blocked summation. Block partials are independent of
// the thread schedule and are combined serially in block index order, so the
// result is bitwise identical for any thread count (and to the serial twin).

double sum(int n, const double* a) {
  const int nb = (n + reduce_block - 1) / reduce_block;
  std::vector<double> partial(nb);
#pragma omp parallel for
  for (int b = 0; b < nb; ++b) {
    const int lo = b * reduce_block, hi = std::min(n, lo + reduce_block);
    double s = 0.0;
    for (int k = lo; k < hi; ++k) s += a[k];
    partial[b] = s;
  }
  double total = 0.0;
  for (int b = 0; b < nb; ++b) total += partial[b];
  return total;
}

double dot(int n, const double* a, const double* b) {
  const int nb = (n + reduce_block - 1) / reduce_block;
  std::vector<double> partial(nb);
#pragma omp parallel for
  for (int p = 0; p < nb; ++p) {
    const int lo = p * reduce_block, hi = std::min(n, lo + reduce_block);
    double s = 0.0;
    for (int k = lo; k < hi; ++k) s += a[k] * b[k];
    partial[p] = s;
  }
  double total = 0.0;
  for (int p = 0; p < nb; ++p) total += partial[p];
  return total;
}

double sum_sq(int n, const double* a) { return dot(n, a, a); }

double max_abs(int n, const double* a) {
  double m = 0.0;
#pragma omp parallel for reduction(max : m)
  for (int k = 0; k < n; ++k) {
    const double v = std::fabs(a[k]);
    if (v > m) m = v;
  }
  return m;
}

double min_value(int n, const double* a) {
  double m = a[0];
#pragma omp parallel for reduction(min : m)
  for (int k = 0; k < n; ++k) {
    if (a[k] < m) m = a[k];
  }
  return m;
}

// Face drift velocity shared by flux assembly and the CFL speed. The x-face i
// sits between nodes i-1 and i; donor values outside the wall are zero.

static inline double face_speed_x(int nx, int ny, int i, int j, double hx,
                                  const double* c, const double* ux, bool chemo,
                                  bool advect) {
  double v = 0.0;
  if (chemo) {
    const double cl = (i > 0) ? c[(i - 1) * ny + j] : 0.0;
    const double cr = (i < nx) ? c[i * ny + j] : 0.0;
    v += (cr - cl) / hx;
  }
  if (advect) {
    const double ul = (i > 0) ? ux[(i - 1) * ny + j] : 0.0;
    const double ur = (i < nx) ? ux[i * ny + j] : 0.0;
    v += 0.5 * (ul + ur);
  }
  return v;
}

static inline double face_speed_y(int nx, int ny, int i, int j, double hy,
                                  const double* c, const double* uy, bool chemo,
                                  bool advect) {
  (void)nx;
  double v = 0.0;
  if (chemo) {
    const double cb = (j > 0) ? c[i * ny + j - 1] : 0.0;
    const double ct = (j < ny) ? c[i * ny + j] : 0.0;
    v += (ct - cb) / hy;
  }
  if (advect) {
    const double ub = (j > 0) ? uy[i * ny + j - 1] : 0.0;
    const double ut = (j < ny) ? uy[i * ny + j] : 0.0;
    v += 0.5 * (ub + ut);
  }
  return v;
}

void upwind_flux(int nx, int ny, double hx, double hy, const double* rho,
                 const double* c, const double* ux, const double* uy,
                 bool chemo, bool advect, double* fx, double* fy) {
#pragma omp parallel for
  for (int i = 0; i <= nx; ++i) {
    for (int j = 0; j < ny; ++j) {
      const double v = face_speed_x(nx, ny, i, j, hx, c, ux, chemo, advect);
      const double donor = (v >= 0.0) ? ((i > 0) ? rho[(i - 1) * ny + j] : 0.0)
                                      : ((i < nx) ? rho[i * ny + j] : 0.0);
      fx[i * ny + j] = donor * v;
    }
  }
#pragma omp parallel for
  for (int i = 0; i < nx; ++i) {
    for (int j = 0; j <= ny; ++j) {
      const double v = face_speed_y(nx, ny, i, j, hy, c, uy, chemo, advect);
      const double donor = (v >= 0.0) ? ((j > 0) ? rho[i * ny + j - 1] : 0.0)
                                      : ((j < ny) ? rho[i * ny + j] : 0.0);
      fy[i * (ny + 1) + j] = donor * v;
    }
  }
}

void face_divergence(int nx, int ny, double hx, double hy, const double* fx,
                     const double* fy, double* out) {
#pragma omp parallel for
  for (int i = 0; i < nx; ++i) {
    for (int j = 0; j < ny; ++j) {
      out[i * ny + j] = (fx[(i + 1) * ny + j] - fx[i * ny + j]) / hx +
                        (fy[i * (ny + 1) + j + 1] - fy[i * (ny + 1) + j]) / hy;
    }
  }
}

double max_face_speed(int nx, int ny, double hx, double hy, const double* c,
                      const double* ux, const double* uy, bool chemo, bool advect) {
  double m = 0.0;
#pragma omp parallel for reduction(max : m)
  for (int i = 0; i <= nx; ++i) {
    for (int j = 0; j < ny; ++j) {
      const double v = std::fabs(face_speed_x(nx, ny, i, j, hx, c, ux, chemo, advect));
      if (v > m) m = v;
    }
  }
#pragma omp parallel for reduction(max : m)
  for (int i = 0; i < nx; ++i) {
    for (int j = 0; j <= ny; ++j) {
      const double v = std::fabs(face_speed_y(nx, ny, i, j, hy, c, uy, chemo, advect));
      if (v > m) m = v;
    }
  }
  return m;
}

namespace serial {

void laplacian(int nx, int ny, double hx, double hy, const double* f, double* out) {
  const double ax = 1.0 / (hx * hx), ay = 1.0 / (hy * hy);
  for (int i = 0; i < nx; ++i) {
    for (int j = 0; j < ny; ++j) {
      const double fc = f[i * ny + j];
      const double fl = (i > 0) ? f[(i - 1) * ny + j] : 0.0;
      const double fr = (i < nx - 1) ? f[(i + 1) * ny + j] : 0.0;
      const double fb = (j > 0) ? f[i * ny + j - 1] : 0.0;
      const double ft = (j < ny - 1) ? f[i * ny + j + 1] : 0.0;
      out[i * ny + j] = ax * (fl - 2.0 * fc + fr) + ay * (fb - 2.0 * fc + ft);
    }
  }
}

void grad_x(int nx, int ny, double hx, const double* f, double* out) {
  const double s = 1.0 / (2.0 * hx);
  for (int i = 0; i < nx; ++i) {
    for (int j = 0; j < ny; ++j) {
      const double fl = (i > 0) ? f[(i - 1) * ny + j] : 0.0;
      const double fr = (i < nx - 1) ? f[(i + 1) * ny + j] : 0.0;
      out[i * ny + j] = s * (fr - fl);
    }
  }
}

void grad_y(int nx, int ny, double hy, const double* f, double* out) {
  const double s = 1.0 / (2.0 * hy);
  for (int i = 0; i < nx; ++i) {
    for (int j = 0; j < ny; ++j) {
      const double fb = (j > 0) ? f[i * ny + j - 1] : 0.0;
      const double ft = (j < ny - 1) ? f[i * ny + j + 1] : 0.0;
      out[i * ny + j] = s * (ft - fb);
    }
  }
}

double sum(int n, const double* a) {
  const int nb = (n + reduce_block - 1) / reduce_block;
  std::vector<double> partial(nb);
  for (int b = 0; b < nb; ++b) {
    const int lo = b * reduce_block, hi = std::min(n, lo + reduce_block);
    double s = 0.0;
    for (int k = lo; k < hi; ++k) s += a[k];
    partial[b] = s;
  }
  double total = 0.0;
  for (int b = 0; b < nb; ++b) total += partial[b];
  return total;
}

double dot(int n, const double* a, const double* b) {
  const int nb = (n + reduce_block - 1) / reduce_block;
  std::vector<double> partial(nb);
  for (int p = 0; p < nb; ++p) {
    const int lo = p * reduce_block, hi = std::min(n, lo + reduce_block);
    double s = 0.0;
    for (int k = lo; k < hi; ++k) s += a[k] * b[k];
    partial[p] = s;
  }
  double total = 0.0;
  for (int p = 0; p < nb; ++p) total += partial[p];
  return total;
}

double sum_sq(int n, const double* a) { return serial::dot(n, a, a); }

double max_abs(int n, const double* a) {
  double m = 0.0;
  for (int k = 0; k < n; ++k) {
    const double v = std::fabs(a[k]);
    if (v > m) m = v;
  }
  return m;
}

double min_value(int n, const double* a) {
  double m = a[0];
  for (int k = 0; k < n; ++k) {
    if (a[k] < m) m = a[k];
  }
  return m;
}

void upwind_flux(int nx, int ny, double hx, double hy, const double* rho,
                 const double* c, const double* ux, const double* uy,
                 bool chemo, bool advect, double* fx, double* fy) {
  for (int i = 0; i <= nx; ++i) {
    for (int j = 0; j < ny; ++j) {
      const double v = face_speed_x(nx, ny, i, j, hx, c, ux, chemo, advect);
      const double donor = (v >= 0.0) ? ((i > 0) ? rho[(i - 1) * ny + j] : 0.0)
                                      : ((i < nx) ? rho[i * ny + j] : 0.0);
      fx[i * ny + j] = donor * v;
    }
  }
  for (int i = 0; i < nx; ++i) {
    for (int j = 0; j <= ny; ++j) {
      const double v = face_speed_y(nx, ny, i, j, hy, c, uy, chemo, advect);
      const double donor = (v >= 0.0) ? ((j > 0) ? rho[i * ny + j - 1] : 0.0)
                                      : ((j < ny) ? rho[i * ny + j] : 0.0);
      fy[i * (ny + 1) + j] = donor * v;
    }
  }
}

void face_divergence(int nx, int ny, double hx, double hy, const double* fx,
                     const double* fy, double* out) {
  for (int i = 0; i < nx; ++i) {
    for (int j = 0; j < ny; ++j) {
      out[i * ny + j] = (fx[(i + 1) * ny + j] - fx[i * ny + j]) / hx +
                        (fy[i * (ny + 1) + j + 1] - fy[i * (ny + 1) + j]) / hy;
    }
  }
}

double max_face_speed(int nx, int ny, double hx, double hy, const double* c,
                      const double* ux, const double* uy, bool chemo, bool advect) {
  double m = 0.0;
  for (int i = 0; i <= nx; ++i) {
    for (int j = 0; j < ny; ++j) {
      const double v = std::fabs(face_speed_x(nx, ny, i, j, hx, c, ux, chemo, advect));
      if (v > m) m = v;
    }
  }
  for (int i = 0; i < nx; ++i) {
    for (int j = 0; j <= ny; ++j) {
      const double v = std::fabs(face_speed_y(nx, ny, i, j, hy, c, uy, chemo, advect));
      if (v > m) m = v;
    }
  }
  return m;
}

}  // namespace serial

}  // namespace ksb::kern
