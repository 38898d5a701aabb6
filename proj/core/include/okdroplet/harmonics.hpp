#pragma once

#include "okdroplet/common.hpp"

namespace okd {

// Real orthonormal harmonic basis on the unit circle (n=2) or sphere (n=3).
//   n=2: j=0 -> 1/sqrt(2pi), j=2l-1 -> cos(l t)/sqrt(pi), j=2l -> sin(l t)/sqrt(pi)
//   n=3: j=l*l+l+m, m>0 -> sqrt2 Pbar_lm cos(m phi), m<0 -> sqrt2 Pbar_l|m| sin(|m| phi)
int basis_size(int dim, int L);
int basis_degree(int dim, int j);

// Laplace-Beltrami eigenvalue l(l+n-2) of basis function j
inline double lb_eigenvalue(int dim, int j) {
  int l = basis_degree(dim, j);
  return double(l) * double(l + dim - 2);
}

struct BasisPoint {
  VecX val;
  VecX d1, d2;            // surface gradient components along e1, e2 (d2 unused in 2D)
  VecX h11, h12, h22;     // covariant hessian in the (e1, e2) frame, optional
  Vec e1 = Vec::Zero(), e2 = Vec::Zero();
};

void eval_basis(int dim, int L, const Vec& dir, BasisPoint& out, bool hessian = false);

// |x|^l Y_j(x/|x|) for all j up to degree L, written to out[0..basis_size)
void solid_harmonics(int dim, int L, const Vec& x, double* out);

// Fully normalized associated Legendre values Pbar_lm(cos t), index l(l+1)/2+m
void legendre_normalized(int L, double x, double s, std::vector<double>& P);

}  // namespace okd
