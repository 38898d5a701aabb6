#include <doctest.h>

#include "okdroplet/greens.hpp"

#include <random>

using namespace okd;

namespace {

Vec rand_in_ball(int dim, double a, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (;;) {
    Vec v(u(rng), u(rng), dim == 3 ? u(rng) : 0.0);
    if (v.norm() < 1.0) return a * v;
  }
}

// closed forms of the Neumann ball regular part
double ball_R_closed(int dim, double a, const Vec& x, const Vec& y) {
  const double vol = omega(dim) * std::pow(a, dim);
  double cn = dim == 3 ? -a * a / 2 : 0.5 * a * a * (std::log(a) - 0.5);
  double c0 = (cn - a * a / (2.0 * (dim + 2))) / vol;
  double base = (x.squaredNorm() + y.squaredNorm()) / (2.0 * dim * vol) + c0;
  double nx = x.norm(), ny = y.norm();
  if (nx == 0 || ny == 0) return base;
  double t = nx * ny / (a * a), c = x.dot(y) / (nx * ny);
  double q = std::sqrt(1 - 2 * t * c + t * t);
  if (dim == 2) return base - std::log(q * q) / (4 * pi);
  return base + (1 / q - 1 + std::log(2 / (1 - t * c + q))) / (4 * pi * a);
}

// Integral over the torus cell of a function with an integrable point
// singularity at the origin; Duffy-collapsed Gauss-Legendre on each corner
// simplex.
double torus_integral(int dim, const std::function<double(const Vec&)>& f, int m) {
  std::vector<double> x, w;
  gauss_legendre(m, x, w);
  for (auto& v : x) v = 0.5 * (v + 1);
  for (auto& v : w) v *= 0.5;
  double tot = 0.0;
  const double h = 0.5;
  if (dim == 2) {
    // quadrant [0,h]^2 split by the diagonal: (u, u v) and (u v, u)
    for (int sx : {-1, 1})
      for (int sy : {-1, 1})
        for (int i = 0; i < m; ++i)
          for (int j = 0; j < m; ++j) {
            double u = h * x[i], v = x[j];
            double jac = h * h * x[i] * w[i] * w[j];
            tot += jac * f(Vec(sx * u, sy * u * v, 0));
            tot += jac * f(Vec(sx * u * v, sy * u, 0));
          }
    return tot;
  }
  for (int sx : {-1, 1})
    for (int sy : {-1, 1})
      for (int sz : {-1, 1})
        for (int i = 0; i < m; ++i)
          for (int j = 0; j < m; ++j)
            for (int k = 0; k < m; ++k) {
              double u = h * x[i], v = x[j], s = x[k];
              double jac = h * h * h * x[i] * x[i] * w[i] * w[j] * w[k];
              tot += jac * f(Vec(sx * u, sy * u * v, sz * u * s));
              tot += jac * f(Vec(sx * u * s, sy * u, sz * u * v));
              tot += jac * f(Vec(sx * u * v, sy * u * s, sz * u));
            }
  return tot;
}

}  // namespace

TEST_CASE("fundamental solution") {
  CHECK(gamma_fn(1.0, 2) == 0.0);
  CHECK(gamma_fn(1.0, 3) == doctest::Approx(-1 / (4 * pi)).epsilon(1e-15));
  CHECK(gamma_fn(std::exp(1.0), 2) == doctest::Approx(1 / (2 * pi)).epsilon(1e-15));
  CHECK_THROWS_AS(gamma_fn(0.0, 2), Error);
}

TEST_CASE("exponential integrals") {
  CHECK(expint_e1(1.0) == doctest::Approx(0.21938393439552027).epsilon(1e-14));
  CHECK(expint_e1(0.01) == doctest::Approx(4.037929576538114).epsilon(1e-14));
  CHECK(expint_e1(5.0) == doctest::Approx(0.001148295591275326).epsilon(1e-13));
}

TEST_CASE("torus Robin constant is independent of the Ewald splitting") {
  for (int dim : {2, 3}) {
    double a = std::sqrt(pi);
    EwaldSum e1(dim, a), e2(dim, 0.8 * a), e3(dim, 1.25 * a);
    CHECK(std::abs(e1.robin_constant() - e2.robin_constant()) < 1e-12);
    CHECK(std::abs(e1.robin_constant() - e3.robin_constant()) < 1e-12);
    Vec z(0.13, -0.31, dim == 3 ? 0.27 : 0.0);
    CHECK(std::abs(e1.green(z) - e2.green(z)) < 1e-12);
  }
  // cubic lattice: -2.837297479 / (4 pi)
  CHECK(EwaldSum(3).robin_constant() == doctest::Approx(-2.837297479480619 / (4 * pi)).epsilon(1e-10));
}

TEST_CASE("torus Green symmetry and lattice invariance") {
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> u(-1.0, 2.0);
  for (int dim : {2, 3}) {
    GreenEvaluator ev(Domain::torus(dim));
    for (int i = 0; i < 100; ++i) {
      Vec x(u(rng), u(rng), dim == 3 ? u(rng) : 0), y(u(rng), u(rng), dim == 3 ? u(rng) : 0);
      CHECK(std::abs(ev.G(x, y) - ev.G(y, x)) < 1e-10);
      if (i < 10) CHECK(std::abs(ev.G(x + Vec::Unit(0), y - Vec::Unit(1)) - ev.G(x, y)) < 1e-10);
    }
    CHECK_THROWS_AS(ev.G(Vec::Zero(), Vec::Unit(0)), Error);
  }
}

TEST_CASE("torus Green function has zero mean") {
  for (int dim : {2, 3}) {
    EwaldSum e(dim);
    double s = torus_integral(dim, [&](const Vec& z) { return e.green(z); }, dim == 2 ? 48 : 16);
    CHECK(std::abs(s) < 1e-6);
  }
}

TEST_CASE("torus regular part approaches the Robin constant") {
  for (int dim : {2, 3}) {
    GreenEvaluator ev(Domain::torus(dim));
    double h = ev.torus_robin();
    for (double d : {1e-2, 1e-3, 1e-4}) {
      Vec z = d * Vec(0.6, 0.8, 0);
      double v = ev.G(z, Vec::Zero()) + gamma_fn(d, dim);
      CHECK(std::abs(v - h) < 2 * d * d);
    }
  }
}

TEST_CASE("torus regular part polynomial fit") {
  for (int dim : {2, 3}) {
    TorusRegularFit f = fit_torus_regular(dim, 0.3);
    CHECK(f.max_error < 1e-11);
    EwaldSum e(dim);
    CHECK(std::abs(f.coef[0] - e.robin_constant()) < 1e-10);
  }
}

TEST_CASE("ball regular part against closed forms") {
  std::mt19937_64 rng(43);
  for (int dim : {2, 3})
    for (double a : {1.0, 1.7}) {
      GreenEvaluator ev(Domain::ball(dim, a));
      for (int i = 0; i < 50; ++i) {
        Vec x = rand_in_ball(dim, a, rng), y = rand_in_ball(dim, a, rng);
        CHECK(std::abs(ev.R(x, y) - ball_R_closed(dim, a, x, y)) < 1e-10);
        CHECK(std::abs(ev.R(x, y) - ev.R(y, x)) < 1e-12);
      }
    }
}

TEST_CASE("ball Green function has zero mean and zero flux") {
  for (int dim : {2, 3}) {
    const double a = 1.0;
    Domain d = Domain::ball(dim, a);
    GreenEvaluator ev(d);
    Vec x(0.3, 0.1, 0.0);
    // integral of -Gamma(|x-y|) over the ball in closed form
    double r2 = x.squaredNorm();
    double gam = dim == 3 ? r2 / 6 - a * a / 2 : r2 / 4 + 0.5 * a * a * (std::log(a) - 0.5);
    QuadratureGrid sg = sphere_quadrature(dim, 30);
    std::vector<double> gx, gw;
    gauss_legendre(40, gx, gw);
    double rint = 0.0;
    for (int i = 0; i < 40; ++i) {
      double s = 0.5 * a * (gx[i] + 1);
      for (int k = 0; k < sg.size(); ++k)
        rint += 0.5 * a * gw[i] * std::pow(s, dim - 1) * sg.weights[k] * ev.R(x, s * sg.nodes[k]);
    }
    CHECK(std::abs(rint - gam) < 1e-9);
    // normal derivative of G(x,.) vanishes on the boundary
    for (int k = 0; k < sg.size(); k += 7) {
      Vec n = sg.nodes[k];
      double h = 1e-5;
      double dG = (ev.G(x, (a - h) * n) - ev.G(x, (a - 3 * h) * n)) / (2 * h);
      CHECK(std::abs(dG) < 1e-4);
    }
  }
}

TEST_CASE("Hessian of R(.,0) at the center") {
  for (int dim : {2, 3}) {
    Domain d = Domain::ball(dim, 1.0);
    GreenEvaluator ev(d);
    const double h = 1e-3;
    for (int i = 0; i < dim; ++i) {
      Vec e = h * Vec::Unit(i);
      double d2 = (ev.R(e, Vec::Zero()) - 2 * ev.R(Vec::Zero(), Vec::Zero()) + ev.R(-e, Vec::Zero())) / (h * h);
      CHECK(d2 == doctest::Approx(1.0 / (dim * d.volume)).epsilon(1e-4));
    }
  }
}

TEST_CASE("Robin function of the ball") {
  for (int dim : {2, 3}) {
    GreenEvaluator ev(Domain::ball(dim, 1.0));
    // grows like |Gamma(dist)| at the boundary
    for (double dd : {0.02, 0.05, 0.1}) {
      double ratio = ev.robin(Vec(1 - dd, 0, 0)) / std::abs(gamma_fn(dd, dim));
      CHECK(ratio > 0.25);
      CHECK(ratio < 4.0);
    }
    CHECK_THROWS_AS(ev.robin(Vec(1 - 1e-6, 0, 0)), Error);
    CHECK_THROWS_AS(ev.robin(Vec(1.1, 0, 0)), Error);
  }
}

TEST_CASE("harmonic centers") {
  for (int dim : {2, 3}) {
    GreenEvaluator ev(Domain::ball(dim, 1.0));
    HarmonicCenterReport rep = harmonic_centers(ev);
    REQUIRE(rep.centers.size() == 1);
    CHECK(rep.centers[0].norm() < 1e-4);
    // D^2 h(0) = 2/pi (n=2), 3/(2 pi) (n=3)
    double expect = dim == 2 ? 2 / pi : 1.5 / pi;
    CHECK(rep.hessian_min_eig[0] == doctest::Approx(expect).epsilon(1e-4));
  }
  HarmonicCenterReport t = harmonic_centers(GreenEvaluator(Domain::torus(2)));
  CHECK(t.centers[0].norm() == 0.0);
}

TEST_CASE("averaged regular part") {
  for (int dim : {2, 3}) {
    Domain d = Domain::ball(dim, 1.0);
    GreenEvaluator ev(d);
    const double r = 0.1;
    for (Vec p : {Vec(0, 0, 0), Vec(0.3, 0.2, 0)}) {
      // exact for the ball: the mean of r^2/((n+2)|Omega|), half the stated 2 mu r^2/|Omega|
      double exact = ev.robin(p) + r * r / ((dim + 2) * d.volume);
      CHECK(std::abs(ev.g_r(p, r, 6) - exact) < 1e-10);
    }
    CHECK_THROWS_AS(ev.g_r(Vec(0.95, 0, 0), 0.1), Error);
    GreenEvaluator et(Domain::torus(dim));
    double g0 = et.g_r(Vec::Zero(), r, 6), g1 = et.g_r(Vec(0.3, 0.7, 0.1 * (dim - 2)), r, 6);
    CHECK(std::abs(g0 - g1) < 1e-8);
    CHECK(std::abs(g0 - et.torus_robin() - r * r / (dim + 2)) < 1e-8);
  }
}

TEST_CASE("image remainder") {
  for (int dim : {2, 3}) {
    GreenEvaluator ev(Domain::ball(dim, 1.0));
    double lo = 1e9, hi = 0;
    for (double dd = 0.02; dd <= 0.2; dd += 0.02) {
      Vec x(1 - dd, 0, 0);
      double s = ev.image_remainder(x, x);
      CHECK(s == doctest::Approx(ev.R(x, x) + gamma_fn((ev.reflect(x) - x).norm(), dim)).epsilon(1e-12));
      lo = std::min(lo, std::abs(s));
      hi = std::max(hi, std::abs(s));
    }
    CHECK(hi < 1.0);
    CHECK_THROWS_AS(ev.reflect(Vec::Zero()), Error);
  }
}

TEST_CASE("Green bound |G| <= C (1 - Gamma)") {
  std::mt19937_64 rng(47);
  for (int dim : {2, 3}) {
    GreenEvaluator ev(Domain::ball(dim, 1.0));
    double C = 0.0;
    for (int i = 0; i < 200; ++i) {
      Vec x = rand_in_ball(dim, 0.97, rng), y = rand_in_ball(dim, 0.97, rng);
      C = std::max(C, std::abs(ev.G(x, y)) / (1.0 - gamma_fn((x - y).norm(), dim)));
    }
    CHECK(C < 5.0);
  }
}
