#pragma once

#include "okdroplet/io.hpp"
#include "okdroplet/optimize.hpp"

#include <string>
#include <vector>

namespace okd {

struct SweepSpec {
  Domain domain = Domain::torus(2);
  double gamma = 1.0;
  std::vector<double> radii;  // strictly ascending
  std::vector<int> ladder;    // basis degrees; first is the working one, a second one is the check
  unsigned seed = 1;
  std::string out_dir;        // empty: nothing is written
  int threads = 0;
  MinimizeOptions solver;
  EnergyResolution resolution;
  double perturbation = 0.01; // initial non-round noise relative to r
  Vec start = Vec::Zero();
  std::string config_text;    // hashed into the provenance

  void validate() const;
  int degree() const;
  Provenance provenance() const;
};

// One minimization of a sweep.
struct RunRecord {
  double r = 0.0, gamma = 0.0;
  int degree = 0;
  double energy = 0.0, perimeter = 0.0, nonlocal = 0.0;
  double residual = 0.0, multiplier = 0.0;
  double c1 = 0.0;           // max |phi| + |grad phi|
  double center_distance = 0.0;
  Vec center = Vec::Zero();
  int iterations = 0;
  bool converged = false;
  bool in_regime = false;
  std::string status;
  double seconds = 0.0;      // timing, excluded from reproducibility
};

// Minimizes from a seeded near-ball start at `start`; index picks the seed stream.
RunRecord run_one(const SweepSpec& s, double r, double gamma, int degree, int index, const Vec& start,
                  MinimizeResult* full = nullptr);

// F(r) regressed on {r, r^4 log r, r^4} (n=2) or {r^2, r^5, r^6} (n=3),
// weighted by r^{-(n-1)}. Targets come in two sets: the stated expansion
// and the one derived from G = -Gamma + R.
struct ExpansionFit {
  int dim = 2;
  double gamma = 0.0;
  std::vector<RunRecord> runs;
  std::vector<std::string> terms;
  VecX coefficients, targets_stated, targets_corrected;
  VecX rel_err_stated, rel_err_corrected, tolerances;
  double condition_number = 0.0;
  double fit_residual = 0.0;  // weighted rms
  double robin_ewald = 0.0;
  double robin_fit = 0.0;          // h from the last coefficient, corrected constant
  double robin_fit_stated = 0.0;   // n=2: h using the stated -1/8 constant
  // n=2: distance of the fitted constant to the two stated candidates
  double constant_minus_eighth = 0.0, constant_exp_ball = 0.0;
  VecX ladder_change;  // |coefficient change| at the second ladder degree
  int ladder_degree = 0;
  bool ladder_consistent = true;
  bool all_converged = true;
};

ExpansionFit run_energy_expansion(const SweepSpec& s);

// The regression alone: coefficients on the expansion basis, with the
// condition number of the equilibrated design matrix and the weighted rms.
VecX fit_expansion(int dim, const std::vector<double>& radii, const std::vector<double>& energies,
                   double* condition = nullptr, double* rms = nullptr);

struct RateFit {
  int dim = 2;
  double gamma = 0.0;
  std::vector<RunRecord> runs;
  VecX norms, scaled, floors;  // scaled = norm / (gamma r^{n+3})
  double slope = 0.0, intercept = 0.0;
  double ratio = 0.0;          // max / min of scaled
  bool floor_limited = false;
  bool all_converged = true;
};

RateFit run_rate_fit(const SweepSpec& s);

// ||phi(2 gamma)|| / ||phi(gamma)|| at one radius
struct LinearityCheck {
  double r = 0.0, gamma = 0.0;
  RunRecord single, doubled;
  double ratio = 0.0;
  bool in_range = false;  // [1.5, 2.5]
};

LinearityCheck run_linearity(const SweepSpec& s, double r);

struct CenteringReport {
  std::vector<RunRecord> runs;
  std::vector<double> trace;     // |p| per accepted step, largest radius
  bool trace_monotone = false;
  std::vector<double> offsets, ball_energies;  // F(B_r(p)) along a ray, smallest radius
  bool energy_increasing = false;
  double final_distance = 0.0;   // smallest radius
  double tolerance = 1e-3;
  bool distances_shrink = false;
  bool pass = false;
};

// Ball domain; starts at spec.start (defaults to 0.5 R along x).
CenteringReport run_centering(const SweepSpec& s);

struct NoSphereReport {
  std::string domain;
  int dim = 2;
  double r = 0.0, gamma = 0.0;
  Vec center = Vec::Zero();
  double residual_linf = 0.0, residual_l2 = 0.0, multiplier = 0.0;
  double solver_tol = 0.0;
  bool expect_critical = false;  // centered ball in the ball domain
  bool pass = false;
};

NoSphereReport run_no_sphere(const Domain& d, const ModelParams& p, const Vec& center, int degree,
                             const std::string& out_dir = "", const EnergyResolution& res = {});

struct UniquenessReport {
  std::vector<RunRecord> runs;
  std::vector<double> alphas;
  double energy_spread = 0.0;
  double max_alpha = 0.0, max_center = 0.0;
  double tolerance = 1e-6, energy_tolerance = 1e-7;
  bool in_regime = false;
  bool inconclusive = false;
  bool pass = false;
};

// Ball domain: random centers and shapes, all expected at the centered ball.
UniquenessReport run_uniqueness(const SweepSpec& s, int n_starts);

}  // namespace okd
