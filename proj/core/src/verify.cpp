#include "okdroplet/verify.hpp"

#include <json.hpp>

#include <Eigen/SVD>

#include <chrono>
#include <cstdio>
#include <limits>
#include <random>

namespace okd {

namespace {

using nlohmann::json;

std::vector<double> vec3(const Vec& v, int n) { return std::vector<double>(v.data(), v.data() + n); }

std::vector<double> to_std(const VecX& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

json provenance_json(const Provenance& p) {
  return {{"version", p.version}, {"config_hash", p.config_hash}, {"resolutions", p.resolutions}, {"seed", p.seed}};
}

json record_json(const RunRecord& r, int n) {
  return {{"r", r.r},
          {"gamma", r.gamma},
          {"degree", r.degree},
          {"energy", r.energy},
          {"perimeter", r.perimeter},
          {"nonlocal", r.nonlocal},
          {"residual", r.residual},
          {"multiplier", r.multiplier},
          {"c1", r.c1},
          {"center", vec3(r.center, n)},
          {"center_distance", r.center_distance},
          {"iterations", r.iterations},
          {"converged", r.converged},
          {"in_regime", r.in_regime},
          {"status", r.status}};
}

// one JSON per run, aggregate CSV and JSON lines, and a summary record
void persist(const SweepSpec& s, const std::string& name, const std::vector<RunRecord>& runs, json summary) {
  if (s.out_dir.empty()) return;
  const int n = s.domain.dim;
  const std::string dir = s.out_dir + "/" + name;
  const json prov = provenance_json(s.provenance());
  CsvTable csv({"index", "r", "gamma", "degree", "energy", "perimeter", "nonlocal", "residual", "multiplier", "c1",
                "center_distance", "iterations", "converged", "status"});
  std::string lines;
  for (size_t i = 0; i < runs.size(); ++i) {
    const RunRecord& r = runs[i];
    json rec = {{"schema_version", schema_version}, {"provenance", prov}, {"index", i}, {"run", record_json(r, n)}};
    rec["timing"] = {{"seconds", r.seconds}};
    char file[32];
    std::snprintf(file, sizeof file, "/run_%03zu.json", i);
    write_text_file(dir + file, rec.dump(2) + "\n");
    rec.erase("timing");
    lines += rec.dump() + "\n";
    csv.add_row({std::to_string(i), format_double(r.r), format_double(r.gamma), std::to_string(r.degree),
                 format_double(r.energy), format_double(r.perimeter), format_double(r.nonlocal),
                 format_double(r.residual), format_double(r.multiplier), format_double(r.c1),
                 format_double(r.center_distance), std::to_string(r.iterations), r.converged ? "1" : "0", r.status});
  }
  write_text_file(dir + "/aggregate.csv", csv.str());
  write_text_file(dir + "/aggregate.jsonl", lines);
  summary["schema_version"] = schema_version;
  summary["provenance"] = prov;
  write_text_file(dir + "/" + name + ".json", summary.dump(2) + "\n");
}

std::vector<RunRecord> sweep_runs(const SweepSpec& s, double gamma, int degree, int index_base, const Vec& start) {
  std::vector<RunRecord> runs(s.radii.size());
  parallel_for(int(runs.size()), s.threads,
               [&](int i) { runs[i] = run_one(s, s.radii[i], gamma, degree, index_base + i, start); });
  return runs;
}

bool all_converged(const std::vector<RunRecord>& runs) {
  for (const RunRecord& r : runs)
    if (!r.converged) return false;
  return true;
}

double robin_reference(const Domain& d) {
  GreenEvaluator g(d);
  return d.is_torus() ? g.torus_robin() : g.robin(Vec::Zero());
}

struct LinearFit {
  VecX c;
  double cond = 0.0, rms = 0.0;
};

// weighted least squares with column equilibration
LinearFit weighted_fit(const MatX& B, const VecX& y, const VecX& w) {
  MatX A = w.asDiagonal() * B;
  const VecX b = w.cwiseProduct(y);
  VecX scale(A.cols());
  for (int k = 0; k < A.cols(); ++k) {
    scale[k] = A.col(k).norm();
    A.col(k) /= scale[k];
  }
  Eigen::JacobiSVD<MatX> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
  LinearFit f;
  const VecX sv = svd.singularValues();
  f.cond = sv[0] / sv[sv.size() - 1];
  const VecX z = svd.solve(b);
  f.rms = std::sqrt((A * z - b).squaredNorm() / double(b.size()));
  f.c = z.cwiseQuotient(scale);
  return f;
}

MatX expansion_basis(int n, const std::vector<double>& radii) {
  MatX B(radii.size(), 3);
  for (size_t i = 0; i < radii.size(); ++i) {
    const double r = radii[i];
    if (n == 2)
      B.row(i) << r, std::pow(r, 4) * std::log(r), std::pow(r, 4);
    else
      B.row(i) << r * r, std::pow(r, 5), std::pow(r, 6);
  }
  return B;
}

VecX fit_energies(int n, const std::vector<RunRecord>& runs, LinearFit* info = nullptr) {
  std::vector<double> radii, energies;
  // failed runs drop out; the flags on the records say which
  for (const RunRecord& r : runs)
    if (std::isfinite(r.energy)) {
      radii.push_back(r.r);
      energies.push_back(r.energy);
    }
  LinearFit f;
  if (radii.size() < 3) {
    f.c = VecX::Constant(3, std::numeric_limits<double>::quiet_NaN());
    if (info) *info = f;
    return f.c;
  }
  f.c = fit_expansion(n, radii, energies, &f.cond, &f.rms);
  if (info) *info = f;
  return f.c;
}

}  // namespace

VecX fit_expansion(int dim, const std::vector<double>& radii, const std::vector<double>& energies, double* condition,
                   double* rms) {
  check_dim(dim);
  if (radii.size() != energies.size() || radii.size() < 3) fail(ErrorKind::Config, "fit needs 3 or more (r, F) pairs");
  VecX y(radii.size()), w(radii.size());
  for (size_t i = 0; i < radii.size(); ++i) {
    if (!(radii[i] > 0.0 && radii[i] < 1.0)) fail(ErrorKind::Config, "fit radii must lie in (0, 1)");
    if (!std::isfinite(energies[i])) fail(ErrorKind::Convergence, "non-finite energy in the fit");
    y[i] = energies[i];
    w[i] = std::pow(radii[i], -(dim - 1));
  }
  const LinearFit f = weighted_fit(expansion_basis(dim, radii), y, w);
  if (condition) *condition = f.cond;
  if (rms) *rms = f.rms;
  return f.c;
}

void SweepSpec::validate() const {
  if (radii.empty()) fail(ErrorKind::Config, "sweep needs at least one radius");
  if (!(gamma >= 0.0)) fail(ErrorKind::Config, "gamma must be nonnegative");
  for (size_t i = 0; i < radii.size(); ++i) {
    if (i && !(radii[i] > radii[i - 1])) fail(ErrorKind::Config, "sweep radii must be strictly ascending");
    ModelParams::with_radius(domain, gamma, radii[i]).validate(domain);
    if (domain.is_torus() && 2.0 * radii[i] > 0.3) fail(ErrorKind::Containment, "radius too large for the torus");
    if (!domain.is_torus() && !inner_region_test(domain, start, radii[i]))
      fail(ErrorKind::Containment, "starting ball not inside the domain");
  }
  for (int L : ladder)
    if (L < 2) fail(ErrorKind::Config, "ladder degrees must be at least 2");
  if (!(perturbation >= 0.0 && perturbation < 0.5)) fail(ErrorKind::Config, "perturbation must lie in [0, 0.5)");
}

int SweepSpec::degree() const { return ladder.empty() ? (domain.dim == 2 ? 12 : 8) : ladder.front(); }

Provenance SweepSpec::provenance() const {
  Provenance p;
  p.config_hash = content_hash(config_text);
  p.resolutions = ladder.empty() ? std::vector<int>{degree()} : ladder;
  p.seed = seed;
  return p;
}

RunRecord run_one(const SweepSpec& s, double r, double gamma, int degree, int index, const Vec& start,
                  MinimizeResult* full) {
  const Domain& d = s.domain;
  const int n = d.dim;
  const auto t0 = std::chrono::steady_clock::now();
  RunRecord rec;
  rec.r = r;
  rec.gamma = gamma;
  rec.degree = degree;
  const ModelParams p = ModelParams::with_radius(d, gamma, r);
  rec.in_regime = p.in_regime(n);

  DropletShape init = DropletShape::ball(n, start, r, degree);
  std::seed_seq seq{s.seed, unsigned(index), 0x6f6bu};
  std::mt19937 rng(seq);
  std::normal_distribution<double> nd;
  for (int j = 1; j < init.coeffs.size(); ++j) {
    const int l = basis_degree(n, j);
    const double x = nd(rng);
    if (l != 1) init.coeffs[j] = s.perturbation * r * x / (1.0 + l);
  }
  try {
    MinimizeResult m = minimize(d, p, init, s.solver, s.resolution);
    rec.energy = m.energy.total;
    rec.perimeter = m.energy.perimeter;
    rec.nonlocal = m.energy.nonlocal;
    rec.residual = m.el.residual_linf;
    rec.multiplier = m.el.multiplier;
    rec.c1 = c1_norm(m.shape, sphere_quadrature(n, 2 * degree + 8)).first;
    rec.center = m.shape.center;
    rec.center_distance = d.is_torus() ? 0.0 : m.shape.center.norm();
    rec.iterations = m.iterations;
    rec.converged = m.converged;
    rec.status = m.status;
    if (full) *full = std::move(m);
  } catch (const Error& e) {
    rec.status = std::string("error: ") + e.what();
    rec.energy = rec.residual = std::numeric_limits<double>::quiet_NaN();
  }
  rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rec;
}

ExpansionFit run_energy_expansion(const SweepSpec& s) {
  s.validate();
  const int n = s.domain.dim;
  if (s.radii.size() < 3) fail(ErrorKind::Config, "expansion fit needs at least 3 radii");
  for (double r : s.radii)
    if (!ModelParams::with_radius(s.domain, s.gamma, r).in_regime(n))
      fail(ErrorKind::Config, "radius " + format_double(r) + " is outside the small regime");

  ExpansionFit f;
  f.dim = n;
  f.gamma = s.gamma;
  f.runs = sweep_runs(s, s.gamma, s.degree(), 0, s.start);
  f.all_converged = all_converged(f.runs);
  LinearFit info;
  f.coefficients = fit_energies(n, f.runs, &info);
  f.condition_number = info.cond;
  f.fit_residual = info.rms;

  const double g = s.gamma, h = robin_reference(s.domain), w = omega(n);
  f.robin_ewald = h;
  if (n == 2) {
    f.terms = {"r", "r^4 log r", "r^4"};
    f.targets_stated = Eigen::Vector3d(2.0 * pi, pi * g / 2.0, g * (-1.0 / 8.0 + pi * pi * h));
    f.targets_corrected = Eigen::Vector3d(2.0 * pi, -pi * g / 2.0, g * (pi / 8.0 + pi * pi * h));
  } else {
    f.terms = {"r^2", "r^5", "r^6"};
    f.targets_stated = Eigen::Vector3d(4.0 * pi, -8.0 * pi * g / 15.0, g * w * w * h);
    f.targets_corrected = Eigen::Vector3d(4.0 * pi, 8.0 * pi * g / 15.0, g * w * w * h);
  }
  f.rel_err_stated = (f.coefficients - f.targets_stated).cwiseAbs().cwiseQuotient(f.targets_stated.cwiseAbs());
  f.rel_err_corrected =
      (f.coefficients - f.targets_corrected).cwiseAbs().cwiseQuotient(f.targets_corrected.cwiseAbs());
  f.tolerances = Eigen::Vector3d(0.005, 0.05, 0.10).cwiseProduct(f.targets_corrected.cwiseAbs());
  if (g > 0.0) {
    const double c = f.coefficients[2] / g;
    if (n == 2) {
      f.robin_fit = (c - pi / 8.0) / (pi * pi);
      f.robin_fit_stated = (c + 1.0 / 8.0) / (pi * pi);
      f.constant_minus_eighth = std::abs(c - (-1.0 / 8.0 + pi * pi * h));
      f.constant_exp_ball = std::abs(c - (pi * pi * h - 3.0 * pi / 8.0));
    } else {
      f.robin_fit = f.robin_fit_stated = c / (w * w);
    }
  }

  if (s.ladder.size() >= 2) {
    f.ladder_degree = s.ladder[1];
    const std::vector<RunRecord> fine = sweep_runs(s, s.gamma, s.ladder[1], 0, s.start);
    f.ladder_change = (fit_energies(n, fine) - f.coefficients).cwiseAbs();
    f.ladder_consistent = (f.ladder_change.array() < f.tolerances.array()).all();
  }

  json j = {{"experiment", "expansion"},
            {"dim", n},
            {"gamma", g},
            {"terms", f.terms},
            {"coefficients", to_std(f.coefficients)},
            {"targets_stated", to_std(f.targets_stated)},
            {"targets_corrected", to_std(f.targets_corrected)},
            {"rel_err_stated", to_std(f.rel_err_stated)},
            {"rel_err_corrected", to_std(f.rel_err_corrected)},
            {"tolerances", to_std(f.tolerances)},
            {"condition_number", f.condition_number},
            {"fit_residual", f.fit_residual},
            {"robin_ewald", f.robin_ewald},
            {"robin_fit", f.robin_fit},
            {"robin_fit_stated", f.robin_fit_stated},
            {"all_converged", f.all_converged}};
  if (n == 2)
    j["constant_distance"] = {{"minus_eighth", f.constant_minus_eighth}, {"exp_ball", f.constant_exp_ball}};
  if (f.ladder_degree) {
    j["ladder_degree"] = f.ladder_degree;
    j["ladder_change"] = to_std(f.ladder_change);
    j["ladder_consistent"] = f.ladder_consistent;
  }
  persist(s, "expansion", f.runs, j);
  return f;
}

RateFit run_rate_fit(const SweepSpec& s) {
  s.validate();
  const int n = s.domain.dim;
  if (s.radii.size() < 4 || s.radii.back() < 3.0 * s.radii.front() * (1.0 - 1e-12))
    fail(ErrorKind::Config, "rate fit needs at least 4 radii spanning a factor 3");
  RateFit f;
  f.dim = n;
  f.gamma = s.gamma;
  // tight per-radius tolerance: phi is many orders below r at the small end
  f.runs.resize(s.radii.size());
  parallel_for(int(s.radii.size()), s.threads, [&](int i) {
    SweepSpec si = s;
    if (!(si.solver.tol > 0.0)) si.solver.tol = 1e-12 * (n - 1.0) / s.radii[i];
    f.runs[i] = run_one(si, s.radii[i], s.gamma, s.degree(), i, s.start);
  });
  f.all_converged = all_converged(f.runs);
  const int m = int(f.runs.size());
  f.norms.resize(m);
  f.scaled.resize(m);
  f.floors.resize(m);
  f.floor_limited = true;
  for (int i = 0; i < m; ++i) {
    const RunRecord& r = f.runs[i];
    f.norms[i] = r.c1;
    f.scaled[i] = s.gamma > 0.0 ? r.c1 / (s.gamma * std::pow(r.r, n + 3)) : std::numeric_limits<double>::quiet_NaN();
    // a residual delta in degree l moves phi by delta r^2 / (l^2 + (n-2) l - (n-1)) and its
    // gradient by l times that; the factor 2 allows the residual to spread over degrees
    f.floors[i] = std::max(1e-14 * r.r, 2.0 * r.residual * r.r * r.r);
    if (!(r.c1 <= f.floors[i])) f.floor_limited = false;
  }
  // log-log regression
  Eigen::MatrixX2d A(m, 2);
  VecX y(m);
  for (int i = 0; i < m; ++i) {
    A(i, 0) = std::log(f.runs[i].r);
    A(i, 1) = 1.0;
    y[i] = std::log(std::max(f.norms[i], 1e-300));
  }
  const Eigen::Vector2d c = A.colPivHouseholderQr().solve(y);
  f.slope = c[0];
  f.intercept = c[1];
  f.ratio = s.gamma > 0.0 ? f.scaled.maxCoeff() / f.scaled.minCoeff() : std::numeric_limits<double>::quiet_NaN();

  json j = {{"experiment", "rate"},          {"dim", n},
            {"gamma", s.gamma},             {"norms", to_std(f.norms)},
            {"floors", to_std(f.floors)},   {"slope", f.slope},
            {"intercept", f.intercept},     {"floor_limited", f.floor_limited},
            {"all_converged", f.all_converged}};
  if (s.gamma > 0.0) {
    j["scaled"] = to_std(f.scaled);
    j["ratio"] = f.ratio;
  }
  persist(s, "rate", f.runs, j);
  return f;
}

LinearityCheck run_linearity(const SweepSpec& s, double r) {
  SweepSpec one = s;
  one.radii = {r};
  one.validate();
  if (!(s.gamma > 0.0)) fail(ErrorKind::Config, "linearity check needs gamma > 0");
  LinearityCheck c;
  c.r = r;
  c.gamma = s.gamma;
  c.single = run_one(s, r, s.gamma, s.degree(), 0, s.start);
  c.doubled = run_one(s, r, 2.0 * s.gamma, s.degree(), 0, s.start);
  c.ratio = c.doubled.c1 / c.single.c1;
  c.in_range = c.ratio >= 1.5 && c.ratio <= 2.5;
  persist(one, "linearity", {c.single, c.doubled},
          {{"experiment", "linearity"}, {"r", r}, {"gamma", s.gamma}, {"ratio", c.ratio}, {"in_range", c.in_range}});
  return c;
}

CenteringReport run_centering(const SweepSpec& spec) {
  if (spec.domain.is_torus()) fail(ErrorKind::Config, "centering runs in the ball domain");
  SweepSpec s = spec;
  if (s.start.norm() == 0.0) s.start = Vec(0.5 * s.domain.radius, 0.0, 0.0);
  s.validate();
  const int n = s.domain.dim;
  CenteringReport c;
  c.runs.resize(s.radii.size());
  MinimizeResult smallest;
  parallel_for(int(s.radii.size()), s.threads, [&](int i) {
    c.runs[i] = run_one(s, s.radii[i], s.gamma, s.degree(), i, s.start, i == 0 ? &smallest : nullptr);
  });
  for (const Vec& p : smallest.centers) c.trace.push_back(p.norm());
  c.trace_monotone = !c.trace.empty();
  for (size_t i = 1; i < c.trace.size(); ++i)
    if (c.trace[i] > c.trace[i - 1] * (1.0 + 1e-14) + 1e-15) c.trace_monotone = false;

  // F(B_r(p)) along the start direction at the smallest radius
  const double r0 = s.radii.front(), R = s.domain.radius;
  const ModelParams p0 = ModelParams::with_radius(s.domain, s.gamma, r0);
  const Vec dir = s.start / s.start.norm();
  for (int k = 0; k <= 8; ++k) {
    const double o = k * 0.05 * (R - r0);
    c.offsets.push_back(o);
    c.ball_energies.push_back(ball_energy_expansion(s.domain, p0, o * dir));
  }
  c.energy_increasing = true;
  for (size_t k = 1; k < c.ball_energies.size(); ++k)
    if (!(c.ball_energies[k] > c.ball_energies[k - 1])) c.energy_increasing = false;

  c.final_distance = c.runs.front().center_distance;
  double worst = 0.0;
  c.distances_shrink = true;
  for (size_t i = 0; i < c.runs.size(); ++i) {
    worst = std::max(worst, c.runs[i].center_distance);
    if (i && c.runs[i].center_distance < c.runs[i - 1].center_distance) c.distances_shrink = false;
  }
  if (worst < c.tolerance) c.distances_shrink = true;
  c.pass = all_converged(c.runs) && c.final_distance < c.tolerance && c.trace_monotone && c.energy_increasing &&
           c.distances_shrink;

  std::vector<double> dist;
  for (const RunRecord& r : c.runs) dist.push_back(r.center_distance);
  persist(s, "centering", c.runs,
          {{"experiment", "centering"},
           {"dim", n},
           {"distances", dist},
           {"trace", c.trace},
           {"trace_monotone", c.trace_monotone},
           {"offsets", c.offsets},
           {"ball_energies", c.ball_energies},
           {"energy_increasing", c.energy_increasing},
           {"final_distance", c.final_distance},
           {"tolerance", c.tolerance},
           {"distances_shrink", c.distances_shrink},
           {"pass", c.pass}});
  return c;
}

NoSphereReport run_no_sphere(const Domain& d, const ModelParams& p, const Vec& center, int degree,
                             const std::string& out_dir, const EnergyResolution& res) {
  p.validate(d);
  if (!inner_region_test(d, center, p.r_m)) fail(ErrorKind::Containment, "sphere not inside the domain");
  const int n = d.dim;
  NoSphereReport o;
  o.domain = to_string(d.kind);
  o.dim = n;
  o.r = p.r_m;
  o.gamma = p.gamma;
  o.center = center;
  const ELReport el = el_residual(d, p, DropletShape::ball(n, center, p.r_m, degree), res);
  o.residual_linf = el.residual_linf;
  o.residual_l2 = el.residual_l2;
  o.multiplier = el.multiplier;
  o.solver_tol = 1e-9 * (n - 1.0) / p.r_m;
  o.expect_critical = !d.is_torus() && center.norm() == 0.0;
  o.pass = o.expect_critical ? o.residual_linf < 1e-5 : o.residual_linf > 10.0 * o.solver_tol;
  if (!out_dir.empty()) {
    json j = {{"schema_version", schema_version},
              {"provenance", provenance_json(Provenance{library_version(), "", {degree}, 0})},
              {"experiment", "no_sphere"},
              {"domain", o.domain},
              {"dim", n},
              {"r", o.r},
              {"gamma", o.gamma},
              {"center", vec3(center, n)},
              {"residual_linf", o.residual_linf},
              {"residual_l2", o.residual_l2},
              {"multiplier", o.multiplier},
              {"solver_tol", o.solver_tol},
              {"expect_critical", o.expect_critical},
              {"pass", o.pass}};
    write_text_file(out_dir + "/no_sphere.json", j.dump(2) + "\n");
  }
  return o;
}

UniquenessReport run_uniqueness(const SweepSpec& spec, int n_starts) {
  if (spec.domain.is_torus()) fail(ErrorKind::Config, "uniqueness runs in the ball domain");
  if (n_starts < 2) fail(ErrorKind::Config, "uniqueness needs at least 2 starts");
  SweepSpec s = spec;
  s.radii.resize(1);
  s.validate();
  const int n = s.domain.dim;
  const double r = s.radii.front(), R = s.domain.radius;
  UniquenessReport u;
  u.in_regime = ModelParams::with_radius(s.domain, s.gamma, r).in_regime(n);
  // starting centers uniform in the ball of radius (R - r) / 2
  std::vector<Vec> starts(n_starts);
  std::seed_seq seq{s.seed, 0x756eu};
  std::mt19937 rng(seq);
  std::uniform_real_distribution<double> ud(-1.0, 1.0);
  for (Vec& c : starts) {
    do {
      c = Vec(ud(rng), ud(rng), n == 3 ? ud(rng) : 0.0);
    } while (c.norm() > 1.0);
    c *= 0.5 * (R - r);
  }
  u.runs.resize(n_starts);
  u.alphas.assign(n_starts, 0.0);
  parallel_for(n_starts, s.threads, [&](int i) {
    MinimizeResult m;
    u.runs[i] = run_one(s, r, s.gamma, s.degree(), i, starts[i], &m);
    if (!m.shape.coeffs.size()) return;
    u.alphas[i] = frankel_asymmetry(m.shape, sphere_quadrature(n, 2 * s.degree() + 8)).alpha;
  });
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (int i = 0; i < n_starts; ++i) {
    const RunRecord& rr = u.runs[i];
    if (!rr.converged) u.inconclusive = true;
    lo = std::min(lo, rr.energy);
    hi = std::max(hi, rr.energy);
    u.max_alpha = std::max(u.max_alpha, u.alphas[i]);
    u.max_center = std::max(u.max_center, rr.center_distance);
  }
  u.energy_spread = hi - lo;
  u.pass = u.in_regime && !u.inconclusive && u.max_alpha < u.tolerance && u.max_center < u.tolerance &&
           u.energy_spread < u.energy_tolerance;
  persist(s, "uniqueness", u.runs,
          {{"experiment", "uniqueness"},
           {"dim", n},
           {"r", r},
           {"gamma", s.gamma},
           {"starts", n_starts},
           {"alphas", u.alphas},
           {"energy_spread", u.energy_spread},
           {"max_alpha", u.max_alpha},
           {"max_center", u.max_center},
           {"in_regime", u.in_regime},
           {"inconclusive", u.inconclusive},
           {"pass", u.pass}});
  return u;
}

}  // namespace okd
