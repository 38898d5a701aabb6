#include <doctest.h>

#include "okdroplet/domain.hpp"
#include "okdroplet/harmonics.hpp"

#include <random>

using namespace okd;

namespace {

Vec random_dir(int dim, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  Vec v(nd(rng), nd(rng), dim == 3 ? nd(rng) : 0.0);
  return v.normalized();
}

// move along the sphere from x in tangent direction t by angle s
Vec geodesic(const Vec& x, const Vec& t, double s) { return std::cos(s) * x + std::sin(s) * t; }

}  // namespace

TEST_CASE("basis is orthonormal under the sphere quadrature") {
  for (int dim : {2, 3}) {
    const int L = 10;
    QuadratureGrid g = sphere_quadrature(dim, L + 2);
    auto tab = basis_table(g, L);
    MatX W = g.weights.size() ? MatX(tab->Y.transpose() * Eigen::Map<const VecX>(g.weights.data(), g.size()).asDiagonal() * tab->Y) : MatX();
    CHECK((W - MatX::Identity(W.rows(), W.cols())).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("degree indexing") {
  CHECK(basis_degree(2, 0) == 0);
  CHECK(basis_degree(2, 1) == 1);
  CHECK(basis_degree(2, 2) == 1);
  CHECK(basis_degree(2, 5) == 3);
  CHECK(basis_degree(3, 0) == 0);
  CHECK(basis_degree(3, 3) == 1);
  CHECK(basis_degree(3, 4) == 2);
  CHECK(basis_degree(3, 15) == 3);
  CHECK(lb_eigenvalue(3, 6) == 6.0);
  CHECK(lb_eigenvalue(2, 4) == 4.0);
}

TEST_CASE("tangential derivatives match finite differences") {
  std::mt19937_64 rng(3);
  for (int dim : {2, 3}) {
    const int L = 6;
    for (int trial = 0; trial < 20; ++trial) {
      Vec x = random_dir(dim, rng);
      BasisPoint b0, bp, bm;
      eval_basis(dim, L, x, b0, true);
      const double h = 1e-5;
      for (int dir = 0; dir < dim - 1; ++dir) {
        Vec t = dir == 0 ? b0.e1 : b0.e2;
        eval_basis(dim, L, geodesic(x, t, h), bp);
        eval_basis(dim, L, geodesic(x, t, -h), bm);
        VecX fd = (bp.val - bm.val) / (2 * h);
        const VecX& an = dir == 0 ? b0.d1 : b0.d2;
        CHECK((fd - an).cwiseAbs().maxCoeff() < 1e-6);
        // second derivative along the geodesic is the covariant Hessian
        VecX fd2 = (bp.val - 2 * b0.val + bm.val) / (h * h);
        const VecX& h2 = dir == 0 ? b0.h11 : b0.h22;
        CHECK((fd2 - h2).cwiseAbs().maxCoeff() < 1e-3);
      }
    }
  }
}

TEST_CASE("Hessian trace is minus the Laplace-Beltrami eigenvalue") {
  std::mt19937_64 rng(5);
  const int L = 8;
  for (int trial = 0; trial < 10; ++trial) {
    Vec x = random_dir(3, rng);
    BasisPoint b;
    eval_basis(3, L, x, b, true);
    for (int j = 0; j < b.val.size(); ++j)
      CHECK(b.h11[j] + b.h22[j] == doctest::Approx(-lb_eigenvalue(3, j) * b.val[j]).epsilon(1e-9).scale(1.0));
  }
}

TEST_CASE("mixed Hessian entry matches a diagonal second difference") {
  std::mt19937_64 rng(7);
  const int L = 5;
  Vec x = random_dir(3, rng);
  BasisPoint b0, bp, bm;
  eval_basis(3, L, x, b0, true);
  Vec t = (b0.e1 + b0.e2).normalized();
  const double h = 1e-4;
  eval_basis(3, L, geodesic(x, t, h), bp);
  eval_basis(3, L, geodesic(x, t, -h), bm);
  VecX fd2 = (bp.val - 2 * b0.val + bm.val) / (h * h);
  VecX an = 0.5 * (b0.h11 + b0.h22) + b0.h12;
  CHECK((fd2 - an).cwiseAbs().maxCoeff() < 1e-4);
}

TEST_CASE("solid harmonics agree with scaled surface harmonics") {
  std::mt19937_64 rng(11);
  for (int dim : {2, 3}) {
    const int L = 9;
    std::vector<double> s(basis_size(dim, L));
    for (int trial = 0; trial < 10; ++trial) {
      Vec x = 0.7 * random_dir(dim, rng);
      solid_harmonics(dim, L, x, s.data());
      BasisPoint b;
      eval_basis(dim, L, x, b);
      for (int j = 0; j < int(s.size()); ++j)
        CHECK(s[j] == doctest::Approx(std::pow(x.norm(), basis_degree(dim, j)) * b.val[j]).epsilon(1e-11).scale(1.0));
    }
  }
}

TEST_CASE("solid harmonics are harmonic") {
  const int L = 6;
  const int J = basis_size(3, L);
  Vec x(0.3, -0.2, 0.4);
  const double h = 1e-3;
  std::vector<double> c(J), p(J), m(J);
  solid_harmonics(3, L, x, c.data());
  std::vector<double> lap(J, 0.0);
  for (int i = 0; i < 3; ++i) {
    Vec e = Vec::Unit(i) * h;
    solid_harmonics(3, L, x + e, p.data());
    solid_harmonics(3, L, x - e, m.data());
    for (int j = 0; j < J; ++j) lap[j] += (p[j] - 2 * c[j] + m[j]) / (h * h);
  }
  for (int j = 0; j < J; ++j) CHECK(std::abs(lap[j]) < 5e-5);
}
