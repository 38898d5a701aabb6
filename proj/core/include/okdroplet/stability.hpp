#pragma once

#include "okdroplet/energy.hpp"

namespace okd {

// Per'' of B_r on degree i <= L, per unit L^2(dB_r): (i(i+n-2) - (n-1)) / r^2.
std::vector<double> perimeter_hessian_diag(double r, int dim, int L);

// Eigenvalue of the single layer of -Gamma on dB_r for degree-l harmonics:
// int int -Gamma(|x-y|) f f per unit L^2.
double sphere_single_layer(int dim, int l, double r);

struct StabilityResolution {
  int order = 0;        // surface quadrature order; 0 -> 2L + 8
  int threads = 0;      // 0 -> hardware concurrency
  double fd_step = 0.0; // step for the x-gradient of R; 0 -> 1e-3 of the cell scale
  double group_tol = 1e-7;
};

struct Multiplet {
  double value = 0.0;
  int multiplicity = 0;
};

// Second variation of F at B_r(p) in the coordinates f = sum_j a_j Y_j / r^{(n-1)/2},
// so every form is per unit L^2(dB_r) norm:
//   Q = Per'' + gamma (2 int int G f f + 2 int (dv/dnu) f^2).
// The factor 2 on both nonlocal terms is the second derivative of NL = int int G chi chi.
struct StabilitySpectrum {
  int dim = 2;
  int basis_degree = 0;
  double r = 0.0, gamma = 0.0, mass = 0.0;
  Vec center = Vec::Zero();
  MatX form;                   // full J x J form, constant mode included
  MatX perimeter, nonlocal;    // Per'' and int int G f f blocks
  VecX normal_derivative;      // int (dv/dnu) Y_j^2 per mode
  double symmetry_error = 0.0; // max |Q - Q^T| before symmetrizing
  double projector_error = 0.0;
  // spectrum of the form on zero-average modes, ascending
  VecX eigenvalues;
  MatX eigenvectors;           // columns, in full coefficient coordinates
  std::vector<Multiplet> multiplets;
  double min_eigenvalue = 0.0;  // c0 estimate over all zero-average modes
  double min_nontrivial = 0.0;  // over modes of degree >= 2
  Mat3 translation_block = Mat3::Zero();  // form on the degree-1 modes
  VecX translation_values;      // its eigenvalues
  double nonlocal_min_eig = 0.0;
  std::string normalization = "per unit L2(dB_r) norm";
};

StabilitySpectrum second_variation_matrix(const Domain& d, const ModelParams& p, double r, const Vec& center, int L,
                                          const StabilityResolution& res = {});

struct StabilityCheck {
  bool stable = false;
  double c0 = 0.0;
  double margin = 0.0;
  StabilitySpectrum spectrum;
};

// Ball domain, centered ball of the parameter radius. margin 0 -> 1e-8 / r^2.
StabilityCheck strict_stability_check(const Domain& d, const ModelParams& p, int L, double margin = 0.0,
                                      const StabilityResolution& res = {});

struct StabilityThreshold {
  double gamma_stable = 0.0, gamma_unstable = 0.0;
  int iterations = 0;
};

// Bisection on gamma for the sign change of the smallest degree >= 2 eigenvalue.
StabilityThreshold instability_threshold(const Domain& d, double r, int L, double gamma_lo, double gamma_hi,
                                         double rel_tol = 1e-6, const StabilityResolution& res = {});

}  // namespace okd
