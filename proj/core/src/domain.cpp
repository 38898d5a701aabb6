#include "okdroplet/domain.hpp"

#include <limits>
#include <map>
#include <mutex>
#include <tuple>

namespace okd {

void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
  x.assign(n, 0.0);
  w.assign(n, 0.0);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double z = std::cos(pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int k = 1; k <= n; ++k) {
        double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p2) / k;
      }
      dp = n * (z * p0 - p1) / (z * z - 1.0);
      double dz = p0 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    double p0 = 1.0, p1 = 0.0;
    for (int k = 1; k <= n; ++k) {
      double p2 = p1;
      p1 = p0;
      p0 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p2) / k;
    }
    dp = n * (z * p0 - p1) / (z * z - 1.0);
    x[i] = -z;
    x[n - 1 - i] = z;
    w[i] = w[n - 1 - i] = 2.0 / ((1.0 - z * z) * dp * dp);
  }
}

Domain Domain::torus(int dim) {
  check_dim(dim);
  Domain d;
  d.kind = DomainKind::Torus;
  d.dim = dim;
  d.radius = 1.0;
  d.volume = 1.0;
  return d;
}

Domain Domain::ball(int dim, double R) {
  check_dim(dim);
  if (!(R > 0.0)) fail(ErrorKind::Domain, "ball radius must be positive");
  Domain d;
  d.kind = DomainKind::Ball;
  d.dim = dim;
  d.radius = R;
  d.volume = omega(dim) * std::pow(R, dim);
  return d;
}

std::string to_string(DomainKind k) { return k == DomainKind::Torus ? "torus" : "ball"; }

DomainKind domain_kind_from_string(const std::string& s) {
  if (s == "torus") return DomainKind::Torus;
  if (s == "ball") return DomainKind::Ball;
  fail(ErrorKind::Config, "unknown domain kind '" + s + "'");
}

double boundary_distance(const Domain& d, const Vec& x) {
  if (d.is_torus()) return std::numeric_limits<double>::infinity();
  return d.radius - x.norm();
}

bool inner_region_test(const Domain& d, const Vec& x, double r) {
  if (d.is_torus()) return true;
  return boundary_distance(d, x) > r;
}

Vec periodic_delta(const Domain& d, const Vec& x, const Vec& y) {
  Vec z = x - y;
  if (d.is_torus())
    for (int i = 0; i < d.dim; ++i) z[i] -= std::nearbyint(z[i]);
  return z;
}

double QuadratureGrid::total_weight() const {
  double s = 0.0;
  for (double w : weights) s += w;
  return s;
}

QuadratureGrid sphere_quadrature(int dim, int order) {
  check_dim(dim);
  if (order < 4) fail(ErrorKind::Resolution, "quadrature order must be >= 4");
  QuadratureGrid g;
  g.dim = dim;
  g.order = order;
  const int nphi = 2 * order + 2;
  if (dim == 2) {
    for (int k = 0; k < nphi; ++k) {
      double t = 2.0 * pi * k / nphi;
      g.nodes.emplace_back(std::cos(t), std::sin(t), 0.0);
      g.weights.push_back(2.0 * pi / nphi);
    }
    return g;
  }
  std::vector<double> x, w;
  gauss_legendre(order + 1, x, w);
  for (int i = 0; i < order + 1; ++i) {
    double st = std::sqrt(1.0 - x[i] * x[i]);
    for (int k = 0; k < nphi; ++k) {
      double ph = 2.0 * pi * (k + 0.5) / nphi;
      g.nodes.emplace_back(st * std::cos(ph), st * std::sin(ph), x[i]);
      g.weights.push_back(w[i] * 2.0 * pi / nphi);
    }
  }
  return g;
}

std::shared_ptr<const BasisTable> basis_table(const QuadratureGrid& grid, int L) {
  static std::mutex mu;
  static std::map<std::tuple<int, int, int, int>, std::shared_ptr<const BasisTable>> cache;
  auto key = std::make_tuple(grid.dim, grid.order, L, grid.size());
  {
    std::lock_guard<std::mutex> lk(mu);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
  }
  auto t = std::make_shared<BasisTable>();
  t->dim = grid.dim;
  t->L = L;
  const int N = grid.size(), J = basis_size(grid.dim, L);
  t->Y.resize(N, J);
  t->D1.resize(N, J);
  t->D2.resize(N, grid.dim == 3 ? J : 0);
  t->e1.resize(N);
  t->e2.resize(N);
  BasisPoint bp;
  for (int k = 0; k < N; ++k) {
    eval_basis(grid.dim, L, grid.nodes[k], bp);
    t->Y.row(k) = bp.val.transpose();
    t->D1.row(k) = bp.d1.transpose();
    if (grid.dim == 3) t->D2.row(k) = bp.d2.transpose();
    t->e1[k] = bp.e1;
    t->e2[k] = bp.e2;
  }
  std::lock_guard<std::mutex> lk(mu);
  cache.emplace(key, t);
  return t;
}

}  // namespace okd
