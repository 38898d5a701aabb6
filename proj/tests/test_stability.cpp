#include <doctest.h>

#include "okdroplet/stability.hpp"

#include <random>

using namespace okd;

namespace {

// int_0^{2pi} -log(2r|sin(t/2)|)/(2pi) cos(l t) dt on geometrically graded panels
double circle_layer_quadrature(int l, double r) {
  std::vector<double> gx, gw;
  gauss_legendre(20, gx, gw);
  auto f = [&](double t) { return -std::log(2.0 * r * std::sin(0.5 * t)) / (2.0 * pi) * std::cos(l * t); };
  double sum = 0.0, a = 0.0, b = 1e-14;
  std::vector<std::pair<double, double>> panels{{0.0, b}};
  while (b < pi) {
    a = b;
    b = std::min(pi, 2.0 * b);
    panels.push_back({a, b});
  }
  for (auto [lo, hi] : panels)
    for (size_t q = 0; q < gx.size(); ++q) sum += 0.5 * (hi - lo) * gw[q] * f(lo + 0.5 * (hi - lo) * (gx[q] + 1.0));
  return 2.0 * r * sum;  // both halves; per unit L^2 the factor is r
}

// Funk-Hecke for 1/(4pi|x-y|): the substitution 1 - cos = s^2 removes the singularity
double sphere_layer_quadrature(int l, double r) {
  std::vector<double> gx, gw;
  gauss_legendre(40, gx, gw);
  double sum = 0.0;
  const double top = std::sqrt(2.0);
  for (size_t q = 0; q < gx.size(); ++q) {
    const double s = 0.5 * top * (gx[q] + 1.0);
    const double c = 1.0 - s * s;
    double p0 = 1.0, p1 = c;
    for (int k = 2; k <= l; ++k) {
      const double p2 = ((2.0 * k - 1.0) * c * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    sum += 0.5 * top * gw[q] * (l == 0 ? 1.0 : p1) * std::sqrt(2.0);
  }
  return r / (4.0 * pi) * 2.0 * pi * sum;
}

// second derivative of F along the volume-preserving curve c = eps a / r^{(n-1)/2}
double energy_second_difference(const Domain& d, const ModelParams& p, int L, const VecX& a, double eps) {
  const int n = d.dim;
  const double r = p.r_m;
  DropletFunctional fn(d, L);
  auto tab = basis_table(fn.grid(), L);
  const QuadratureGrid& g = fn.grid();
  auto value = [&](double e) {
    DropletShape s = DropletShape::ball(n, Vec::Zero(), r, L);
    s.coeffs = e * a / std::pow(r, 0.5 * (n - 1));
    for (int k = 0; k < 4; ++k) {
      VecX phi = tab->Y * s.coeffs;
      double dv = 0.0, dd = 0.0;
      for (int i = 0; i < g.size(); ++i) {
        dv += g.weights[i] * pow_diff(r, phi[i], n) / n;
        dd += g.weights[i] * std::pow(r + phi[i], n - 1) * tab->Y(i, 0);
      }
      s.coeffs[0] -= dv / dd;
    }
    FunctionalValue fv = fn.evaluate(s, false);
    return fv.d_per + p.gamma * fv.d_nl;
  };
  return (value(eps) + value(-eps) - 2.0 * value(0.0)) / (eps * eps);
}

}  // namespace

TEST_CASE("perimeter Hessian values") {
  auto h3 = perimeter_hessian_diag(1.0, 3, 4);
  CHECK(h3[1] == doctest::Approx(0.0));
  CHECK(h3[2] == doctest::Approx(4.0));
  auto h2 = perimeter_hessian_diag(0.5, 2, 3);
  CHECK(std::abs(h2[1]) < 1e-14);
  CHECK_THROWS_AS(perimeter_hessian_diag(1.0, 3, 0), Error);
}

TEST_CASE("single layer eigenvalues match singular quadrature") {
  for (int l : {0, 1, 2, 5}) {
    const double r = 0.07;
    CHECK(sphere_single_layer(3, l, r) == doctest::Approx(sphere_layer_quadrature(l, r)).epsilon(1e-12));
    CHECK(sphere_single_layer(2, l, r) == doctest::Approx(circle_layer_quadrature(l, r)).epsilon(1e-10));
  }
}

TEST_CASE("gamma = 0 reproduces the Laplace-Beltrami spectrum") {
  for (int n : {2, 3}) {
    Domain d = Domain::ball(n, 1.0);
    const double r = 0.1;
    const int L = n == 2 ? 8 : 5;
    StabilitySpectrum s = second_variation_matrix(d, ModelParams::with_radius(d, 0.0, r), r, Vec::Zero(), L);
    auto diag = perimeter_hessian_diag(r, n, L);
    // quadrature Dirichlet form against the closed-form eigenvalues
    for (int i = 0; i < s.perimeter.rows(); ++i)
      for (int j = 0; j < s.perimeter.cols(); ++j) {
        const double want = i == j ? diag[basis_degree(n, j)] : 0.0;
        CHECK(std::abs(s.perimeter(i, j) - want) < 1e-10 * diag[L]);
      }
    for (int k = 0; k < s.translation_values.size(); ++k) CHECK(std::abs(s.translation_values[k]) < 1e-8);
    CHECK(s.min_nontrivial == doctest::Approx(diag[2]).epsilon(1e-10));
    CHECK(s.projector_error < 1e-12);
    CHECK(s.symmetry_error < 1e-10 * diag[L]);
    // multiplets of the sphere: 2 per degree (n=2), 2l+1 (n=3)
    int count = 0;
    for (const Multiplet& m : s.multiplets) {
      const int l = int(std::lround(0.5 * (-(n - 2.0) + std::sqrt((n - 2.0) * (n - 2.0) + 4.0 * (m.value * r * r + n - 1)))));
      CHECK(m.multiplicity == (n == 2 ? 2 : 2 * l + 1));
      ++count;
    }
    CHECK(count == L);
    StabilityCheck c = strict_stability_check(d, ModelParams::with_radius(d, 0.0, r), L);
    CHECK_FALSE(c.stable);
  }
}

TEST_CASE("normal derivative of the centered potential") {
  for (int n : {2, 3}) {
    Domain d = Domain::ball(n, 1.0);
    const double r = 0.08, gamma = 3.0;
    ModelParams p = ModelParams::with_radius(d, gamma, r);
    StabilitySpectrum s = second_variation_matrix(d, p, r, Vec::Zero(), n == 2 ? 6 : 4);
    for (int j = 0; j < s.normal_derivative.size(); ++j)
      CHECK(s.normal_derivative[j] == doctest::Approx(-(1.0 - p.mass) * r / n).epsilon(1e-10));
    CHECK(s.nonlocal_min_eig > 0.0);
  }
}

TEST_CASE("translation block equals |B|^2 D^2h(0) on the centered ball") {
  for (int n : {2, 3}) {
    Domain d = Domain::ball(n, 1.0);
    const double r = 0.1, gamma = 2.0;
    StabilitySpectrum s = second_variation_matrix(d, ModelParams::with_radius(d, gamma, r), r, Vec::Zero(), 4);
    const double vol = omega(n) * std::pow(r, n);
    // D^2h(0) from the closed-form Robin function of the unit ball
    const double d2h = n == 2 ? 2.0 / pi : 3.0 / (2.0 * pi);
    const double want = gamma * vol * vol * d2h / (omega(n) * std::pow(r, n - 1));
    for (int k = 0; k < n; ++k) CHECK(s.translation_values[k] == doctest::Approx(want).epsilon(1e-9));
  }
}

TEST_CASE("torus translations are marginal") {
  Domain d = Domain::torus(2);
  StabilitySpectrum s = second_variation_matrix(d, ModelParams::with_radius(d, 5.0, 0.1), 0.1, Vec(0.2, 0.1, 0.0), 6);
  for (int k = 0; k < 2; ++k) CHECK(std::abs(s.translation_values[k]) < 1e-9);
  CHECK(s.min_nontrivial > 0.0);
}

TEST_CASE("assembled form matches the energy's second difference") {
  std::mt19937 rng(19);
  std::normal_distribution<double> nd;
  for (int n : {2, 3}) {
    Domain d = Domain::ball(n, 1.0);
    const double r = 0.1;
    const int L = n == 2 ? 6 : 4;
    ModelParams p = ModelParams::with_radius(d, 20.0, r);
    StabilitySpectrum s = second_variation_matrix(d, p, r, Vec::Zero(), L);
    for (int trial = 0; trial < 4; ++trial) {
      VecX a = VecX::Zero(s.form.rows());
      for (int j = 1; j < a.size(); ++j) a[j] = nd(rng) / (1 + basis_degree(n, j));
      const double q = a.dot(s.form * a);
      const double fd = energy_second_difference(d, p, L, a, 1e-4 * r);
      CHECK(fd == doctest::Approx(q).epsilon(1e-4));
    }
  }
}

TEST_CASE("strict stability in the small regime and its loss") {
  Domain d = Domain::ball(2, 1.0);
  StabilityCheck c = strict_stability_check(d, ModelParams::with_radius(d, 1.0, 0.05), 8);
  CHECK(c.stable);
  CHECK(c.c0 > 0.0);
  StabilityThreshold t = instability_threshold(d, 0.1, 6, 1.0, 1e5);
  CHECK(t.gamma_unstable > t.gamma_stable);
  StabilitySpectrum below = second_variation_matrix(d, ModelParams::with_radius(d, t.gamma_stable, 0.1), 0.1, Vec::Zero(), 6);
  StabilitySpectrum above = second_variation_matrix(d, ModelParams::with_radius(d, t.gamma_unstable, 0.1), 0.1, Vec::Zero(), 6);
  CHECK(below.min_nontrivial > 0.0);
  CHECK(above.min_nontrivial < 0.0);
  CHECK_THROWS_AS(instability_threshold(d, 0.1, 6, 1.0, 2.0), Error);
}

TEST_CASE("containment is enforced") {
  Domain d = Domain::ball(2, 1.0);
  CHECK_THROWS_AS(second_variation_matrix(d, ModelParams::with_radius(d, 1.0, 0.1), 0.1, Vec(0.95, 0.0, 0.0), 4), Error);
  CHECK_THROWS_AS(strict_stability_check(Domain::torus(2), ModelParams::with_radius(Domain::torus(2), 1.0, 0.1), 4), Error);
}
