#pragma once

#include "okdroplet/domain.hpp"

#include <functional>
#include <string>
#include <utility>

namespace okd {

// Star-shaped set {p + (r + phi(x)) x : x on the unit sphere}.
struct DropletShape {
  int dim = 2;
  Vec center = Vec::Zero();
  double base_radius = 1.0;
  int degree = 0;
  VecX coeffs;  // basis_size(dim, degree) entries

  static DropletShape ball(int dim, const Vec& p, double r, int degree);
  double phi(const Vec& dir) const;
  double rho(const Vec& dir) const { return base_radius + phi(dir); }
  void set_degree(int L);  // pads or truncates coeffs
};

// Radial function and its surface gradient at every node of a grid.
struct ShapeSample {
  VecX rho;
  std::vector<Vec> grad;  // ambient tangent vector, unit-sphere gradient
};

ShapeSample sample_shape(const DropletShape& s, const QuadratureGrid& grid);
// Throws InvalidShape if r + phi < 1e-6 r anywhere on the grid.
void check_star_shaped(const DropletShape& s, const QuadratureGrid& grid);

double volume(const DropletShape& s, const QuadratureGrid& grid);
double perimeter(const DropletShape& s, const QuadratureGrid& grid);
double mean_curvature(const DropletShape& s, const Vec& node);
// ascending; one value in 2D
std::vector<double> principal_curvatures(const DropletShape& s, const Vec& node);
Vec barycenter(const DropletShape& s, const QuadratureGrid& grid);

// Does the point lie inside the shape (boundary counts as outside)?
bool contains(const DropletShape& s, const Vec& x);

// Portions of the ray {c + t u : 0 <= t <= tmax} lying inside the shape,
// from sign changes on nsamp samples refined by regula falsi.
std::vector<std::pair<double, double>> ray_inside_intervals(const DropletShape& s, const Vec& c, const Vec& u,
                                                            double tmax, int nsamp = 48);
// Upper bound for r + |phi| from the coefficient l1 norm.
double radial_bound(const DropletShape& s);

// |E sym-diff B_R(c)|; exact crossing search along rays from c.
double symmetric_difference(const DropletShape& s, const Vec& ball_center, double ball_radius,
                            const QuadratureGrid& grid);

struct AsymmetryResult {
  double alpha = 0.0;
  Vec optimal_center = Vec::Zero();
};

AsymmetryResult frankel_asymmetry(const DropletShape& s, const QuadratureGrid& grid);

// max over nodes of |phi| + |grad phi|; second member divides by r.
std::pair<double, double> c1_norm(const DropletShape& s, const QuadratureGrid& grid);

std::string shape_to_json(const DropletShape& s);
DropletShape shape_from_json(const std::string& text);

// small derivative-free minimizer shared by a few modules
struct NelderMeadOptions {
  double step = 0.1;
  double xtol = 1e-10;
  double ftol = 1e-14;
  int max_iter = 2000;
};
VecX nelder_mead(const std::function<double(const VecX&)>& f, VecX x0, const NelderMeadOptions& opt,
                 double* fmin = nullptr);

}  // namespace okd
