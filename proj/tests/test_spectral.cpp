/// @file test_spectral.cpp
/// @brief Sine-transform layer: round trips, Parseval, mode isolation, exact
///        Poisson/Helmholtz solves, resampling, and the Laplacian eigenbasis.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <random>

#include "doctest.h"
#include "ksb/grid.hpp"
#include "ksb/spectral.hpp"

using namespace ksb;

namespace {

constexpr double pi = 3.14159265358979323846;

ScalarField random_field(const Grid& g, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  ScalarField f(g);
  for (double& v : f.values) v = d(rng);
  return f;
}

double sup_diff(const ScalarField& a, const ScalarField& b) {
  double m = 0.0;
  for (size_t k = 0; k < a.values.size(); ++k)
    m = std::max(m, std::fabs(a.values[k] - b.values[k]));
  return m;
}

}  // namespace

TEST_CASE("forward/inverse transform round-trips on a non-square grid") {
  Grid g = build_grid(2.5, 1.25, 64, 48);
  ScalarField f = random_field(g, 101u);
  ScalarField back = dst_inverse(dst_forward(f));
  CHECK(sup_diff(back, f) <= 1e-12);
}

TEST_CASE("transform satisfies Parseval against the grid quadrature") {
  Grid g = build_grid(1.7, 3.1, 33, 57);
  ScalarField f = random_field(g, 55u);
  SpectralCoeffs c = dst_forward(f);
  double sum_sq = 0.0;
  for (double v : c.coeffs) sum_sq += v * v;
  CHECK(sum_sq == doctest::Approx(l2_norm(f) * l2_norm(f)).epsilon(1e-12));
}

TEST_CASE("the normalized ground mode transforms to a unit coefficient") {
  Grid g = build_grid(pi, pi, 40, 40);
  ScalarField v1 = sample(g, [&](double x, double y) {
    return (2.0 / pi) * std::sin(x) * std::sin(y);
  });
  SpectralCoeffs c = dst_forward(v1);
  CHECK(std::fabs(c.coeffs[0] - 1.0) <= 1e-13);
  double off = 0.0;
  for (size_t k = 1; k < c.coeffs.size(); ++k) off = std::max(off, std::fabs(c.coeffs[k]));
  CHECK(off <= 1e-13);
}

TEST_CASE("discrete eigenvalues approach the continuum from below") {
  Grid g = build_grid(pi, pi, 127, 127);
  for (auto [k1, k2] : {std::pair{1, 1}, {2, 3}, {5, 1}}) {
    const double ld = lambda_discrete(g, k1, k2);
    const double lc = lambda_continuous(g, k1, k2);
    CHECK(ld < lc);
    CHECK(ld == doctest::Approx(lc).epsilon(2e-3));
  }
  CHECK(lambda_continuous(g, 1, 1) == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("poisson solve is exact for the stencil on random data") {
  Grid g = build_grid(pi, pi, 128, 128);
  ScalarField f = random_field(g, 7u);
  ScalarField c = solve_poisson(f);
  ScalarField lap = laplacian(c);
  double resid = 0.0;
  for (size_t k = 0; k < f.values.size(); ++k)
    resid = std::max(resid, std::fabs(-lap.values[k] - f.values[k]));
  CHECK(resid / max_abs(f) <= 1e-11);
}

TEST_CASE("poisson solve divides a sine mode by its discrete eigenvalue") {
  Grid g = build_grid(2.0, 1.0, 31, 45);
  ScalarField v = sample(g, [&](double x, double y) {
    return std::sin(2 * pi * x / 2.0) * std::sin(3 * pi * y / 1.0);
  });
  ScalarField c = solve_poisson(v);
  const double lam = lambda_discrete(g, 2, 3);
  double err = 0.0;
  for (size_t k = 0; k < v.values.size(); ++k)
    err = std::max(err, std::fabs(c.values[k] * lam - v.values[k]));
  CHECK(err <= 1e-12);
}

TEST_CASE("helmholtz solve is exact for the stencil") {
  Grid g = build_grid(pi, pi, 128, 128);
  ScalarField f = random_field(g, 31u);
  const double a = 0.0371;
  ScalarField w = solve_helmholtz(f, a);
  ScalarField lap = laplacian(w);
  double resid = 0.0;
  for (size_t k = 0; k < f.values.size(); ++k)
    resid = std::max(resid, std::fabs(w.values[k] - a * lap.values[k] - f.values[k]));
  CHECK(resid / max_abs(f) <= 1e-11);
  // a = 0 degenerates to the identity.
  CHECK(sup_diff(solve_helmholtz(f, 0.0), f) <= 1e-13);
}

TEST_CASE("resample is the identity on the source grid and exact on pure modes") {
  Grid g = build_grid(pi, pi, 33, 33);
  ScalarField f = random_field(g, 13u);
  CHECK(sup_diff(resample(f, g), f) <= 1e-12);

  auto mode = [](const Grid& gg) {
    return sample(gg, [](double x, double y) { return std::sin(x) * std::sin(2 * y); });
  };
  Grid fine = build_grid(pi, pi, 65, 65);
  CHECK(sup_diff(resample(mode(g), fine), mode(fine)) <= 1e-12);
  // Downsampling a fine single mode is exact as well.
  CHECK(sup_diff(resample(mode(fine), g), mode(g)) <= 1e-12);
}

TEST_CASE("laplace eigenbasis is ordered, normalized, and diagonalizes the stencil") {
  Grid g = build_grid(pi, pi, 48, 48);
  auto basis = laplace_eigenbasis(g, 6);
  REQUIRE(basis.size() == 6);

  // Continuum eigenvalues on the unit-pi square: 2, 5, 5, 8, 10, 10 with
  // (k1,k2)-lexicographic tie order.
  CHECK(basis[0].k1 == 1);
  CHECK(basis[0].k2 == 1);
  CHECK(basis[0].lam_continuous == doctest::Approx(2.0));
  CHECK(basis[1].k1 == 1);
  CHECK(basis[1].k2 == 2);
  CHECK(basis[2].k1 == 2);
  CHECK(basis[2].k2 == 1);
  CHECK(basis[3].lam_continuous == doctest::Approx(8.0));
  CHECK(basis[4].lam_continuous == doctest::Approx(10.0));

  for (const auto& p : basis) {
    CHECK(l2_norm(p.v) == doctest::Approx(1.0).epsilon(1e-12));
    ScalarField lap = laplacian(p.v);
    double err = 0.0;
    for (size_t k = 0; k < lap.values.size(); ++k)
      err = std::max(err, std::fabs(-lap.values[k] - p.lam_discrete * p.v.values[k]));
    CHECK(err <= 1e-10);
  }

  // Orthonormal family under the grid inner product.
  for (size_t a = 0; a < basis.size(); ++a)
    for (size_t b = a + 1; b < basis.size(); ++b)
      CHECK(std::fabs(inner(basis[a].v, basis[b].v)) <= 1e-12);
}
