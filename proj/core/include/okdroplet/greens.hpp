#pragma once

#include "okdroplet/domain.hpp"
#include "okdroplet/ewald.hpp"

#include <optional>

namespace okd {

// Fundamental solution: log t / 2pi (n=2), t^{2-n} / (n (2-n) omega_n) otherwise.
double gamma_fn(double t, int dim);

struct GreenOptions {
  double ewald_alpha = std::sqrt(pi);
  int ball_degree = 0;      // starting series degree; 0 -> 48 (n=2) or 24 (n=3)
  int max_degree = 4096;    // adaptive extension limit
  double tol = 1e-12;       // series tail bound
};

struct HarmonicCenterReport {
  std::vector<Vec> centers;
  std::vector<double> h_values;
  std::vector<double> hessian_min_eig;
};

// G(x,y) = -Gamma(|x-y|) + R(x,y), with -Lap G = delta - 1/|Omega|,
// zero Neumann data (ball) and zero mean.
class GreenEvaluator {
 public:
  explicit GreenEvaluator(const Domain& d, const GreenOptions& opt = {});

  const Domain& domain() const { return dom_; }
  const GreenOptions& options() const { return opt_; }

  double G(const Vec& x, const Vec& y) const;
  double R(const Vec& x, const Vec& y) const;
  double robin(const Vec& x) const;

  // double average of R over B_r(p) x B_r(p) by product quadrature
  double g_r(const Vec& p, double r, int order = 8) const;

  // Ball only: reflection of x across the boundary and S_x(y) = R(x,y) + Gamma(|x*-y|)
  Vec reflect(const Vec& x) const;
  double image_remainder(const Vec& x, const Vec& y) const;

  // Ball only: the pieces of R(x,y) = (|x|^2+|y|^2)/(2n|Omega|) + c0 + sum_l kappa_l S_l(x).S_l(y)
  double ball_c0() const { return c0_; }
  double ball_kappa(int l) const;

  double torus_robin() const { return ewald_->robin_constant(); }
  const EwaldSum* ewald() const { return ewald_ ? &*ewald_ : nullptr; }

 private:
  double ball_series(const Vec& x, const Vec& y) const;
  void require_inside(const Vec& x) const;
  Domain dom_;
  GreenOptions opt_;
  std::optional<EwaldSum> ewald_;
  double c0_ = 0.0;
};

HarmonicCenterReport harmonic_centers(const GreenEvaluator& ev);

}  // namespace okd
