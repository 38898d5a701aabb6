#pragma once

#include "okdroplet/energy.hpp"

#include <string>

namespace okd {

// H + 2 gamma v - lambda at the quadrature nodes, with lambda the surface
// mean of H + 2 gamma v. The factor 2 is the first variation of NL.
struct ELReport {
  double multiplier = 0.0;
  double residual_linf = 0.0;
  double residual_l2 = 0.0;  // (int res^2 dsigma / Per)^{1/2}
  VecX residual;
  VecX curvature, potential;
};

ELReport el_residual(const Domain& d, const ModelParams& p, const DropletShape& s, const EnergyResolution& res = {});

struct MinimizeOptions {
  int max_iter = 3000;
  double tol = 0.0;  // residual_linf target; 0 -> 1e-9 (n-1)/r
  int rescale_every = 1;  // exact volume restore through the constant mode
  double armijo = 1e-4;
  double backtrack = 0.5;
  int max_backtracks = 60;
  int stall_window = 100;  // stop when the residual has not dropped 1% in this many steps
  bool move_center = true;  // ball domain only; the torus is translation invariant
  bool recenter = true;     // torus: report with barycenter at the origin
};

struct MinimizeResult {
  DropletShape shape;
  EnergyBreakdown energy;
  ELReport el;
  int iterations = 0;
  bool converged = false;
  std::string status;
  std::vector<double> history;  // penalized energy per accepted step
  std::vector<Vec> centers;     // center per accepted step
  bool convex = false;
  double min_principal_curvature = 0.0;
};

// Preconditioned projected gradient descent of F + Lambda | |E| - m|Omega| |
// over the shape coefficients (degree-1 modes held fixed, their role is
// taken by the center) and, in the ball domain, the center.
MinimizeResult minimize(const Domain& d, const ModelParams& p, const DropletShape& initial,
                        const MinimizeOptions& opt = {}, const EnergyResolution& res = {});

struct MultiplierCheck {
  double lambda = 0.0;
  double theta = 0.0;    // multiplier_theta
  double penalty = 0.0;  // effective Lambda
  bool violation = false;  // |lambda| > Lambda
};

MultiplierCheck multiplier_bound_check(const Domain& d, const ModelParams& p, const DropletShape& s,
                                       const EnergyResolution& res = {});

}  // namespace okd
