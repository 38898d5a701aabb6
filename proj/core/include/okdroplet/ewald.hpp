#pragma once

#include "okdroplet/common.hpp"

#include <array>

namespace okd {

// Periodic Green function of the unit torus by Ewald splitting,
//   -Lap G = delta - 1, zero mean.
class EwaldSum {
 public:
  explicit EwaldSum(int dim, double alpha = std::sqrt(pi), double tol = 1e-15);

  double green(const Vec& z) const;
  // G(z) + Gamma(|z|) with z reduced to the minimum image; finite at z = 0.
  double regular(const Vec& z) const;
  double robin_constant() const { return regular(Vec::Zero()); }

  int dim() const { return dim_; }
  double alpha() const { return alpha_; }
  int real_cutoff() const { return nreal_; }
  int recip_cutoff() const { return nrecip_; }

 private:
  double sum(const Vec& z, bool drop_singular) const;
  int dim_;
  double alpha_;
  int nreal_, nrecip_;
};

// E1(x) for x > 0
double expint_e1(double x);
// Ein(x) = E1(x) + gamma_E + log x, entire
double expint_ein(double x);

// Least-squares fit of the torus regular part on |z| <= radius by
// monomials z^g with every exponent even.
struct TorusRegularFit {
  int dim = 2;
  int degree = 0;
  double radius = 0.0;
  double max_error = 0.0;  // on an independent check set
  std::vector<std::array<int, 3>> exps;
  VecX coef;  // in unscaled variables

  double eval(const Vec& z) const;
};

TorusRegularFit fit_torus_regular(int dim, double radius, int degree = 0);
// Cached by (dim, radius rounded up to a coarse bucket).
const TorusRegularFit& torus_regular_fit(int dim, double min_radius);

}  // namespace okd
