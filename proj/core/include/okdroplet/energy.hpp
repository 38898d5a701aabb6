#pragma once

#include "okdroplet/field.hpp"
#include "okdroplet/greens.hpp"

#include <utility>

namespace okd {

struct ModelParams {
  double gamma = 0.0;
  double mass = 0.0;     // m in (0,1)
  double r_m = 0.0;      // omega_n r_m^n = m |Omega|
  double penalty = 0.0;  // Lambda; 0 -> 10 * multiplier_theta
  double delta0 = 0.1;   // regime threshold, reporting only

  static ModelParams with_mass(const Domain& d, double gamma, double m);
  static ModelParams with_radius(const Domain& d, double gamma, double r);
  void validate(const Domain& d) const;
  double target_volume(const Domain& d) const { return mass * d.volume; }
  // gamma r^3 |log r| (n=2) or gamma r^3
  double regime_value(int dim) const;
  bool in_regime(int dim) const { return regime_value(dim) < delta0; }
};

// Rough bound for |lambda| at a near-ball critical point: (n-1)/r + 2 gamma sup|v|.
double multiplier_theta(const Domain& d, const ModelParams& p);
double effective_penalty(const Domain& d, const ModelParams& p);

struct EnergyResolution {
  int order = 0;           // angular quadrature order; 0 -> 2L + 8
  int ball_harmonics = 0;  // cap on the solid-harmonic degree of R; 0 -> 96 (n=2) or 40 (n=3)
  bool dirichlet = false;  // NL from the Poisson solver instead of the boundary form
  FieldResolution field;
};

struct EnergyBreakdown {
  double perimeter = 0.0;
  double nonlocal = 0.0;
  double total = 0.0;
  double penalty_term = 0.0;
  double volume = 0.0;
  double regime_value = 0.0;
  bool small_regime = false;
};

// Discrete F pieces split as base + delta, where base depends only on the
// base radius r and delta carries everything the shape and center change.
// The split keeps deltas accurate when the perturbation is tiny.
struct FunctionalValue {
  double per_base = 0.0, nl_base = 0.0, vol_base = 0.0;
  double d_per = 0.0, d_nl = 0.0, d_vol = 0.0;
  VecX g_per, g_nl, g_vol;  // coefficient gradients of the deltas
  Vec c_nl = Vec::Zero();   // center gradient of NL
  VecX v;                   // potential u_E at the boundary nodes
  VecX rho;                 // radial function at the nodes

  double perimeter() const { return per_base + d_per; }
  double nonlocal() const { return nl_base + d_nl; }
  double volume() const { return vol_base + d_vol; }
};

// Per(E) and NL(E) for E = {p + (r + phi(x)) x}. NL = -Gamma part + R part:
//   Gamma part: ball self-energy in closed form, radial layer against the
//   ball potential exactly, layer-layer interaction as a surface form.
//   R part: torus moments against the regular-part polynomial, or ball
//   solid-harmonic integrals.
class DropletFunctional {
 public:
  DropletFunctional(const Domain& d, int degree, const EnergyResolution& res = {});

  FunctionalValue evaluate(const DropletShape& s, bool gradient) const;
  const QuadratureGrid& grid() const { return grid_; }
  const Domain& domain() const { return dom_; }
  int degree() const { return degree_; }

 private:
  void gamma_part(const DropletShape& s, const VecX& rho, const VecX& phi, bool grad, FunctionalValue& out, VecX& dnl) const;
  void torus_part(const DropletShape& s, const VecX& rho, const VecX& phi, bool grad, FunctionalValue& out, VecX& dnl) const;
  void ball_part(const DropletShape& s, const VecX& rho, const std::vector<Vec>& grad_rho, bool grad,
                 FunctionalValue& out, VecX& dnl) const;

  Domain dom_;
  int degree_;
  EnergyResolution res_;
  QuadratureGrid grid_;
  std::shared_ptr<const BasisTable> tab_, ktab_;
  std::optional<GreenEvaluator> green_;
};

EnergyBreakdown total_energy(const Domain& d, const ModelParams& p, const DropletShape& s,
                             const EnergyResolution& res = {});
// F + Lambda | |E| - m|Omega| |
double penalized_energy(const Domain& d, const ModelParams& p, const DropletShape& s,
                        const EnergyResolution& res = {});

// Exact for a round ball: perimeter, Gamma self-energy in closed form, and
// |B_r|^2 g_r(p) for the regular part.
double ball_energy_expansion(const Domain& d, const ModelParams& p, const Vec& center, int gr_order = 8);
// int int_{B_1 x B_1} Gamma
double ball_gamma_self_energy(int dim);

// |A sym-diff B| for two star-shaped sets, by ray intervals from A's center.
// n=2 splits the angle where the boundaries cross; n=3 uses a plain grid.
double shape_symmetric_difference(const DropletShape& a, const DropletShape& b, int order = 0);

// (NL(B) - NL(A), (sup|Gamma * chi_B| + |B|) |A sym-diff B|)
std::pair<double, double> nl_lipschitz_gap(const Domain& d, const ModelParams& p, const DropletShape& a,
                                           const DropletShape& b, const EnergyResolution& res = {});

}  // namespace okd
