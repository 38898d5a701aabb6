#include "okdroplet/config.hpp"
#include "okdroplet/io.hpp"
#include "okdroplet/stability.hpp"
#include "okdroplet/verify.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <iostream>
#include <optional>
#include <random>
#include <sstream>

using namespace okd;
using nlohmann::json;

namespace {

// experiment outcome that ran fine but missed its assertion
struct ExperimentFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Globals {
  std::string config, out, resolution;
  std::optional<int> threads;
  std::optional<unsigned> seed;
};

std::vector<double> vec3(const Vec& v, int n) { return std::vector<double>(v.data(), v.data() + n); }

std::vector<int> parse_ladder(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      size_t used = 0;
      out.push_back(std::stoi(item, &used));
      if (item.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      fail(ErrorKind::Config, "--resolution: bad degree '" + item + "'");
    }
  }
  return out;
}

RunConfig load_config(const Globals& g, bool required) {
  RunConfig c;
  if (!g.config.empty()) {
    c = RunConfig::load(g.config);
  } else if (required) {
    fail(ErrorKind::Config, "--config is required for this subcommand");
  } else {
    c.r = 0.05;
  }
  if (g.seed) c.seed = *g.seed;
  if (g.threads) c.threads = *g.threads;
  if (!g.resolution.empty()) c.ladder = parse_ladder(g.resolution);
  c.out = resolve_out_dir(g.out, c.out);
  c.validate();
  return c;
}

Provenance provenance_of(const RunConfig& c) {
  Provenance p;
  p.config_hash = content_hash(c.serialize());
  p.resolutions = c.ladder.empty() ? std::vector<int>{c.working_degree()} : c.ladder;
  p.seed = c.seed;
  return p;
}

json header(const RunConfig& c, const std::string& command) {
  const Provenance p = provenance_of(c);
  return {{"schema_version", schema_version},
          {"command", command},
          {"provenance",
           {{"version", p.version}, {"config_hash", p.config_hash}, {"resolutions", p.resolutions}, {"seed", p.seed}}},
          {"config", c.serialize()}};
}

SweepSpec sweep_of(const RunConfig& c) {
  SweepSpec s;
  s.domain = c.make_domain();
  s.gamma = c.gamma;
  s.radii = c.radii.empty() ? std::vector<double>{c.make_params().r_m} : c.radii;
  s.ladder = c.ladder.empty() ? std::vector<int>{c.working_degree()} : c.ladder;
  s.seed = c.seed;
  s.out_dir = c.out;
  s.threads = c.threads;
  s.solver = c.solver_options();
  s.resolution = c.energy_resolution();
  s.perturbation = c.perturbation;
  s.start = c.start_center();
  s.config_text = c.serialize();
  return s;
}

void write_json(const std::string& path, const json& j) { write_text_file(path, j.dump(2) + "\n"); }

int cmd_solve(const Globals& g) {
  const RunConfig c = load_config(g, true);
  const Domain d = c.make_domain();
  const ModelParams p = c.make_params();
  SweepSpec s = sweep_of(c);
  MinimizeResult m;
  const RunRecord rec = run_one(s, p.r_m, p.gamma, c.working_degree(), 0, s.start, &m);
  if (rec.status.rfind("error", 0) == 0) fail(ErrorKind::Convergence, rec.status);
  const int n = d.dim;
  const MultiplierCheck mc = multiplier_bound_check(d, p, m.shape, s.resolution);
  json j = header(c, "solve");
  j["result"] = {{"status", m.status},
                 {"converged", m.converged},
                 {"iterations", m.iterations},
                 {"energy",
                  {{"total", m.energy.total},
                   {"perimeter", m.energy.perimeter},
                   {"nonlocal", m.energy.nonlocal},
                   {"volume", m.energy.volume},
                   {"penalty_term", m.energy.penalty_term},
                   {"regime_value", m.energy.regime_value},
                   {"small_regime", m.energy.small_regime}}},
                 {"residual_linf", m.el.residual_linf},
                 {"residual_l2", m.el.residual_l2},
                 {"multiplier", m.el.multiplier},
                 {"multiplier_check", {{"lambda", mc.lambda}, {"penalty", mc.penalty}, {"violation", mc.violation}}},
                 {"c1_norm", rec.c1},
                 {"convex", m.convex},
                 {"min_principal_curvature", m.min_principal_curvature},
                 {"shape", json::parse(shape_to_json(m.shape))}};
  j["timing"] = {{"seconds", rec.seconds}};
  write_json(c.out + "/solve.json", j);
  CsvTable h({"iteration", "energy", "center_x", "center_y", "center_z"});
  for (size_t i = 0; i < m.history.size(); ++i)
    h.add_row({std::to_string(i), format_double(m.history[i]), format_double(m.centers[i][0]),
               format_double(m.centers[i][1]), format_double(m.centers[i][2])});
  write_text_file(c.out + "/history.csv", h.str());
  std::cout << "solve: " << m.status << " after " << m.iterations << " steps, F = " << format_double(m.energy.total)
            << ", residual " << format_double(m.el.residual_linf) << " (" << n << "D " << to_string(d.kind) << ")\n";
  if (!m.converged) fail(ErrorKind::Convergence, "minimization stopped with status " + m.status);
  return 0;
}

int cmd_stability(const Globals& g) {
  const RunConfig c = load_config(g, true);
  const Domain d = c.make_domain();
  const ModelParams p = c.make_params();
  const int L = c.stability_degree > 0 ? c.stability_degree : c.working_degree();
  StabilityResolution res;
  res.threads = c.threads;
  const StabilitySpectrum s = second_variation_matrix(d, p, p.r_m, c.start_center(), L, res);
  json j = header(c, "stability");
  std::vector<json> mult;
  for (const Multiplet& m : s.multiplets) mult.push_back({{"value", m.value}, {"multiplicity", m.multiplicity}});
  j["result"] = {{"normalization", s.normalization},
                 {"dim", s.dim},
                 {"basis_degree", s.basis_degree},
                 {"r", s.r},
                 {"gamma", s.gamma},
                 {"mass", s.mass},
                 {"center", vec3(s.center, s.dim)},
                 {"min_eigenvalue", s.min_eigenvalue},
                 {"min_nontrivial", s.min_nontrivial},
                 {"translation_values", std::vector<double>(s.translation_values.data(),
                                                            s.translation_values.data() + s.translation_values.size())},
                 {"nonlocal_min_eig", s.nonlocal_min_eig},
                 {"symmetry_error", s.symmetry_error},
                 {"projector_error", s.projector_error},
                 {"multiplets", mult}};
  if (!d.is_torus() && c.start_center().norm() == 0.0) {
    const StabilityCheck chk = strict_stability_check(d, p, L, 0.0, res);
    j["result"]["strict"] = {{"stable", chk.stable}, {"c0", chk.c0}, {"margin", chk.margin}};
  }
  write_json(c.out + "/stability.json", j);
  CsvTable t({"index", "eigenvalue", "degree"});
  for (int i = 0; i < s.eigenvalues.size(); ++i) {
    // degree carrying most of the eigenvector's weight
    int best = 0;
    s.eigenvectors.col(i).cwiseAbs().maxCoeff(&best);
    t.add_row({std::to_string(i), format_double(s.eigenvalues[i]), std::to_string(basis_degree(s.dim, best))});
  }
  write_text_file(c.out + "/eigenvalues.csv", t.str());
  std::cout << "stability: min eigenvalue " << format_double(s.min_eigenvalue) << ", min over degree >= 2 "
            << format_double(s.min_nontrivial) << " (" << s.normalization << ")\n";
  return 0;
}

int cmd_sweep(const Globals& g) {
  const RunConfig c = load_config(g, true);
  const SweepSpec s = sweep_of(c);
  const int n = c.dim;
  bool converged = true, ok = true;
  std::ostringstream msg;
  if (c.kind == "expansion") {
    const ExpansionFit f = run_energy_expansion(s);
    converged = f.all_converged;
    ok = (f.rel_err_corrected.array() <= Eigen::Array3d(0.005, 0.05, 0.10)).all();
    msg << "expansion: coefficients";
    for (int k = 0; k < 3; ++k) msg << " " << f.terms[k] << "=" << format_double(f.coefficients[k]);
    msg << ", h fit " << format_double(f.robin_fit) << " vs " << format_double(f.robin_ewald);
  } else if (c.kind == "rate") {
    const RateFit f = run_rate_fit(s);
    converged = f.all_converged;
    ok = f.floor_limited || f.slope >= n + 2.5;
    msg << "rate: slope " << format_double(f.slope) << ", ratio " << format_double(f.ratio)
        << (f.floor_limited ? " (floor limited)" : "");
  } else if (c.kind == "linearity") {
    const LinearityCheck l = run_linearity(s, s.radii.front());
    converged = l.single.converged && l.doubled.converged;
    ok = l.in_range;
    msg << "linearity: ratio " << format_double(l.ratio);
  } else if (c.kind == "centering") {
    const CenteringReport r = run_centering(s);
    for (const RunRecord& x : r.runs) converged = converged && x.converged;
    ok = r.pass;
    msg << "centering: final distance " << format_double(r.final_distance);
  } else if (c.kind == "uniqueness") {
    const UniquenessReport u = run_uniqueness(s, c.starts);
    converged = !u.inconclusive;
    ok = !u.in_regime || u.pass;
    msg << "uniqueness: energy spread " << format_double(u.energy_spread) << ", max alpha "
        << format_double(u.max_alpha) << (u.in_regime ? "" : " (outside the regime, not asserted)");
  } else {
    const NoSphereReport r = run_no_sphere(s.domain, c.make_params(), s.start, c.working_degree(), c.out + "/no_sphere",
                                           s.resolution);
    ok = r.pass;
    msg << "no_sphere: residual " << format_double(r.residual_linf);
  }
  std::cout << msg.str() << "\n";
  if (!converged) fail(ErrorKind::Convergence, "some minimizations did not converge; partial results written");
  if (!ok) throw ExperimentFailure(c.kind + " assertion failed: " + msg.str());
  return 0;
}

int cmd_greens(const Globals& g, int samples) {
  const RunConfig c = load_config(g, true);
  const Domain d = c.make_domain();
  const int n = d.dim;
  GreenOptions opt;
  if (c.ewald_alpha > 0.0) opt.ewald_alpha = c.ewald_alpha;
  const GreenEvaluator green(d, opt);
  const Vec x0 = c.start_center();
  // plane z = 0 through the source; the ball is sampled inside 0.95 R
  const double half = d.is_torus() ? 0.5 : 0.95 * d.radius;
  CsvTable t({"x", "y", "G", "R", "h"});
  for (int i = 0; i < samples; ++i)
    for (int k = 0; k < samples; ++k) {
      const Vec y(-half + 2.0 * half * i / (samples - 1), -half + 2.0 * half * k / (samples - 1), 0.0);
      if (!d.is_torus() && y.norm() > half) continue;
      if (periodic_delta(d, y, x0).norm() < 1e-9) continue;
      t.add_row({format_double(y[0]), format_double(y[1]), format_double(green.G(x0, y)), format_double(green.R(x0, y)),
                 format_double(green.robin(y))});
    }
  write_text_file(c.out + "/greens.csv", t.str());
  const HarmonicCenterReport hc = harmonic_centers(green);
  std::vector<json> centers;
  for (size_t i = 0; i < hc.centers.size(); ++i)
    centers.push_back(
        {{"center", vec3(hc.centers[i], n)}, {"h", hc.h_values[i]}, {"hessian_min_eig", hc.hessian_min_eig[i]}});
  json j = header(c, "greens");
  j["result"] = {{"source", vec3(x0, n)}, {"robin_at_source", green.robin(x0)}, {"harmonic_centers", centers}};
  if (d.is_torus()) j["result"]["torus_robin"] = green.torus_robin();
  write_json(c.out + "/greens.json", j);
  std::cout << "greens: " << t.rows() << " samples, min h " << format_double(hc.h_values.front()) << "\n";
  return 0;
}

int cmd_asymmetry(const Globals& g, const std::string& shape_path) {
  const RunConfig c = load_config(g, shape_path.empty());
  DropletShape s;
  if (!shape_path.empty()) {
    s = shape_from_json(read_text_file(shape_path));
  } else {
    const ModelParams p = c.make_params();
    s = DropletShape::ball(c.dim, c.start_center(), p.r_m, c.working_degree());
    std::seed_seq seq{c.seed, 0x6f6bu};
    std::mt19937 rng(seq);
    std::normal_distribution<double> nd;
    for (int j = 1; j < s.coeffs.size(); ++j) s.coeffs[j] = c.perturbation * p.r_m * nd(rng) / (1.0 + basis_degree(c.dim, j));
  }
  const int n = s.dim;
  const QuadratureGrid grid = sphere_quadrature(n, 2 * s.degree + 8);
  const AsymmetryResult a = frankel_asymmetry(s, grid);
  const double vol = volume(s, grid), per = perimeter(s, grid);
  const double rb = std::pow(vol / omega(n), 1.0 / n);
  const double deficit = per / (n * omega(n) * std::pow(rb, n - 1)) - 1.0;
  json j = header(c, "asymmetry");
  j["result"] = {{"alpha", a.alpha},
                 {"optimal_center", vec3(a.optimal_center, n)},
                 {"volume", vol},
                 {"perimeter", per},
                 {"deficit", deficit},
                 {"shape", json::parse(shape_to_json(s))}};
  write_json(c.out + "/asymmetry.json", j);
  std::cout << "asymmetry: alpha " << format_double(a.alpha) << ", deficit " << format_double(deficit) << "\n";
  return 0;
}

struct ResidualFlags {
  std::string domain = "torus";
  int dim = 2;
  double r = 0.0, gamma = 1.0, radius = 1.0;
  std::string center;
  int degree = 0;
};

int cmd_residual(const Globals& g, const ResidualFlags& f, const CLI::App& sub) {
  RunConfig c = load_config(g, false);
  if (g.config.empty() || sub.count("--domain")) c.domain = f.domain;
  if (g.config.empty() || sub.count("--dim")) c.dim = f.dim;
  if (sub.count("--radius")) c.radius = f.radius;
  if (g.config.empty() || sub.count("--gamma")) c.gamma = f.gamma;
  if (sub.count("--r")) {
    c.r = f.r;
    c.mass = 0.0;
  }
  if (sub.count("--degree")) c.degree = f.degree;
  if (!f.center.empty()) {
    std::vector<double> xs;
    std::stringstream ss(f.center);
    std::string item;
    while (std::getline(ss, item, ',')) {
      try {
        xs.push_back(std::stod(item));
      } catch (const std::exception&) {
        fail(ErrorKind::Config, "--center: bad component '" + item + "'");
      }
    }
    if (xs.empty() || xs.size() > 3) fail(ErrorKind::Config, "--center expects 1 to 3 components");
    c.center.assign(3, 0.0);
    std::copy(xs.begin(), xs.end(), c.center.begin());
  }
  c.validate();
  const Domain d = c.make_domain();
  const NoSphereReport r =
      run_no_sphere(d, c.make_params(), c.start_center(), c.working_degree(), "", c.energy_resolution());
  json j = header(c, "residual");
  j["result"] = {{"domain", r.domain},
                 {"dim", r.dim},
                 {"r", r.r},
                 {"gamma", r.gamma},
                 {"center", vec3(r.center, r.dim)},
                 {"residual_linf", r.residual_linf},
                 {"residual_l2", r.residual_l2},
                 {"multiplier", r.multiplier},
                 {"solver_tol", r.solver_tol},
                 {"expect_critical", r.expect_critical}};
  write_json(c.out + "/residual.json", j);
  std::cout << j["result"].dump(2) << "\n";
  return 0;
}

int report(const std::string& kind, const std::string& message, int code) {
  std::cerr << json{{"error", kind}, {"message", message}, {"exit_code", code}}.dump() << "\n";
  return code;
}

std::string kind_name(ErrorKind k) {
  switch (k) {
    case ErrorKind::Config: return "config";
    case ErrorKind::InvalidShape: return "invalid_shape";
    case ErrorKind::Domain: return "domain";
    case ErrorKind::Containment: return "containment";
    case ErrorKind::Singularity: return "singularity";
    case ErrorKind::Resolution: return "resolution";
    case ErrorKind::Convergence: return "convergence";
    case ErrorKind::Compatibility: return "compatibility";
    case ErrorKind::LineSearch: return "line_search";
  }
  return "unknown";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"okdroplet: sharp-interface Ohta-Kawasaki droplet lab"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--config", g.config, "run configuration (INI)");
  app.add_option("--out", g.out, "output directory (OKDROPLET_OUT overrides)");
  app.add_option("--threads", g.threads, "worker threads, default all cores")->check(CLI::NonNegativeNumber);
  app.add_option("--seed", g.seed, "random seed");
  app.add_option("--resolution", g.resolution, "comma-separated basis degrees, first is the working one");

  auto* solve = app.add_subcommand("solve", "minimize F at the configured parameters");
  auto* stability = app.add_subcommand("stability", "second-variation spectrum of the ball");
  auto* sweep = app.add_subcommand("sweep", "run the configured experiment");
  auto* greens = app.add_subcommand("greens", "sample G, R and the Robin function");
  int samples = 41;
  greens->add_option("--samples", samples, "grid points per side")->check(CLI::Range(2, 2001));
  auto* asym = app.add_subcommand("asymmetry", "Frankel asymmetry of a shape");
  std::string shape_path;
  asym->add_option("--shape", shape_path, "shape JSON; default is a seeded perturbed ball from the config");
  auto* residual = app.add_subcommand("residual", "Euler-Lagrange residual of the exact sphere");
  ResidualFlags rf;
  residual->add_option("--domain", rf.domain, "torus or ball")->check(CLI::IsMember({"torus", "ball"}));
  residual->add_option("--dim", rf.dim, "2 or 3")->check(CLI::IsMember({2, 3}));
  residual->add_option("--radius", rf.radius, "ball domain radius");
  residual->add_option("--r", rf.r, "droplet radius");
  residual->add_option("--gamma", rf.gamma, "nonlocal strength");
  residual->add_option("--center", rf.center, "sphere center, comma-separated");
  residual->add_option("--degree", rf.degree, "basis degree");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    return report("config", e.what(), 2);
  }
  try {
    if (solve->parsed()) return cmd_solve(g);
    if (stability->parsed()) return cmd_stability(g);
    if (sweep->parsed()) return cmd_sweep(g);
    if (greens->parsed()) return cmd_greens(g, samples);
    if (asym->parsed()) return cmd_asymmetry(g, shape_path);
    if (residual->parsed()) return cmd_residual(g, rf, *residual);
  } catch (const ExperimentFailure& e) {
    return report("experiment", e.what(), 4);
  } catch (const Error& e) {
    return report(kind_name(e.kind()), e.what(), e.kind() == ErrorKind::Config ? 2 : 3);
  } catch (const std::exception& e) {
    return report("internal", e.what(), 3);
  }
  return 0;
}
