#pragma once

#include "okdroplet/shape.hpp"

#include <functional>
#include <string>

namespace okd {

// Closed-form (Gamma * chi_{B_r})(x) as a function of |x|.
double radial_convolution(double x_norm, double r, int dim);

struct FieldResolution {
  int torus_n = 0;      // grid points per side; 0 -> 256 (n=2) or 96 (n=3)
  int ball_nr = 0;      // radial cells; 0 -> 2048 (n=2) or 512 (n=3)
  int ball_degree = 0;  // harmonic degree; 0 -> 64 (n=2) or 16 (n=3)
  static FieldResolution defaults(int dim);
  FieldResolution resolved(int dim) const;
};

// Values of a potential or source on the domain discretization.
//   Torus: N^n nodes x_i = i/N, row-major with x fastest.
//   Ball: radial cells with centers (i+1/2)h times harmonic coefficients.
struct ScalarField {
  Domain domain;
  int grid_n = 0;
  std::vector<double> values;
  int degree = 0;
  double h = 0.0;
  MatX coeffs;  // nr x basis_size
  double mean = 0.0;
  // Ball only, optional: integral of the field over B_s (sources carry it
  // exactly, potentials inherit it from their source).
  std::function<double(double)> enclosed;

  bool is_torus() const { return domain.is_torus(); }
  int nr() const { return int(coeffs.rows()); }
  double value_at(const Vec& x) const;
  // spherical mean of the radial derivative at radius s (ball, exact flux)
  double mean_radial_derivative(double s) const;
};

ScalarField torus_field(const Domain& d, int N, const std::function<double(const Vec&)>& f);
ScalarField ball_field(const Domain& d, int nr, int degree, const std::function<double(const Vec&)>& f);

// Cell-averaged indicator of the shape minus its mean, i.e. chi_E - |E|/|Omega|.
ScalarField indicator_source(const Domain& d, const DropletShape& s, const FieldResolution& res = {});

// -Lap u = source with periodic or zero-Neumann data, zero mean.
ScalarField solve_poisson(const ScalarField& source);

// NL(E) as the Dirichlet energy of u_E.
double nl_energy(const Domain& d, const DropletShape& s, const FieldResolution& res = {});

// (Gamma * chi_E)(x) by radial quadrature about the shape center
double gamma_potential(const DropletShape& s, const Vec& x, const QuadratureGrid& grid);

// Writes <prefix>.bin (raw little-endian doubles) and <prefix>.json (header).
void export_field(const ScalarField& f, const std::string& prefix);

}  // namespace okd
