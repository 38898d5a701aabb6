#pragma once

#include "okdroplet/common.hpp"
#include "okdroplet/harmonics.hpp"

#include <memory>

namespace okd {

enum class DomainKind { Torus, Ball };

struct Domain {
  DomainKind kind = DomainKind::Torus;
  int dim = 2;
  double radius = 1.0;  // Ball only; the torus has unit period
  double volume = 1.0;

  static Domain torus(int dim);
  static Domain ball(int dim, double R);
  bool is_torus() const { return kind == DomainKind::Torus; }
};

std::string to_string(DomainKind k);
DomainKind domain_kind_from_string(const std::string& s);

// distance to the boundary; +inf on the torus
double boundary_distance(const Domain& d, const Vec& x);
bool inner_region_test(const Domain& d, const Vec& x, double r);

// minimum-image difference x - y on the torus, plain difference otherwise
Vec periodic_delta(const Domain& d, const Vec& x, const Vec& y);

struct QuadratureGrid {
  int dim = 2;
  int order = 0;
  std::vector<Vec> nodes;
  std::vector<double> weights;
  double total_weight() const;
  int size() const { return int(nodes.size()); }
};

// Uniform angles (n=2) or Gauss-Legendre x uniform azimuth (n=3); exact for
// harmonics of degree <= 2*order.
QuadratureGrid sphere_quadrature(int dim, int order);

// Basis values and tangential derivatives sampled on a grid.
struct BasisTable {
  int dim = 2, L = 0;
  MatX Y, D1, D2;  // N x J
  std::vector<Vec> e1, e2;
  int size() const { return int(Y.cols()); }
};

// Cached per (dim, L, order); thread safe.
std::shared_ptr<const BasisTable> basis_table(const QuadratureGrid& grid, int L);

}  // namespace okd
