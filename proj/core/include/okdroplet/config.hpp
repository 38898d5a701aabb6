#pragma once

#include "okdroplet/energy.hpp"
#include "okdroplet/optimize.hpp"

#include <string>
#include <vector>

namespace okd {

// INI-style run configuration:
//   [section] headers, `key = value` lines, `#` or `;` comments,
//   lists as comma-separated values. Unknown sections or keys, duplicate
//   keys and malformed values are Config errors.
struct RunConfig {
  // [domain]
  std::string domain = "torus";  // torus | ball
  int dim = 2;
  double radius = 1.0;           // ball only

  // [params] give exactly one of mass or r
  double gamma = 1.0;
  double mass = 0.0;
  double r = 0.0;
  double penalty = 0.0;
  double delta0 = 0.1;

  // [discretization]
  int degree = 0;             // shape basis degree; 0 -> 12 (n=2) or 8 (n=3)
  int order = 0;              // surface quadrature order; 0 -> 2 degree + 8
  int ball_harmonics = 0;     // solid-harmonic cap for the ball regular part
  int stability_degree = 0;   // 0 -> degree
  double ewald_alpha = 0.0;   // 0 -> sqrt(pi)
  int field_grid = 0;         // Poisson grid per side (torus) or radial cells (ball)

  // [solver]
  double tol = 0.0;
  int max_iter = 3000;
  int stall_window = 100;

  // [experiment]
  std::string kind = "expansion";  // expansion | rate | centering | uniqueness | no_sphere | linearity
  std::vector<double> radii;
  std::vector<int> ladder;         // basis degrees, first one is the working resolution
  std::vector<double> center{0.0, 0.0, 0.0};
  unsigned seed = 1;
  int starts = 20;
  double perturbation = 0.01;
  int threads = 0;
  std::string out = "results";

  static RunConfig parse(const std::string& text);
  static RunConfig load(const std::string& path);
  std::string serialize() const;
  void validate() const;

  Domain make_domain() const;
  ModelParams make_params() const;
  int working_degree() const;
  MinimizeOptions solver_options() const;
  EnergyResolution energy_resolution() const;
  Vec start_center() const;

  bool operator==(const RunConfig&) const = default;
};

}  // namespace okd
