#include "okdroplet/config.hpp"

#include "okdroplet/io.hpp"

#include <algorithm>
#include <charconv>
#include <map>
#include <set>
#include <sstream>

namespace okd {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

[[noreturn]] void bad(const std::string& key, const std::string& msg) { fail(ErrorKind::Config, key + ": " + msg); }

double to_double(const std::string& key, const std::string& v) {
  double x = 0.0;
  auto [end, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc() || end != v.data() + v.size() || !std::isfinite(x)) bad(key, "not a number: '" + v + "'");
  return x;
}

long to_long(const std::string& key, const std::string& v) {
  long x = 0;
  auto [end, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc() || end != v.data() + v.size()) bad(key, "not an integer: '" + v + "'");
  return x;
}

std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  if (trim(v).empty()) return out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(trim(item));
  return out;
}

template <class T, class F>
std::string join(const std::vector<T>& xs, F fmt) {
  std::string out;
  for (size_t i = 0; i < xs.size(); ++i) out += (i ? ", " : "") + fmt(xs[i]);
  return out;
}

// One table drives parsing, serializing and the unknown-key check.
struct Field {
  const char* section;
  const char* key;
  std::function<void(RunConfig&, const std::string&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

template <class M>
Field real(const char* s, const char* k, M RunConfig::*m) {
  return {s, k, [m](RunConfig& c, const std::string& key, const std::string& v) { c.*m = to_double(key, v); },
          [m](const RunConfig& c) { return format_double(c.*m); }};
}

template <class M>
Field integer(const char* s, const char* k, M RunConfig::*m) {
  return {s, k,
          [m](RunConfig& c, const std::string& key, const std::string& v) {
            const long x = to_long(key, v);
            if (x < long(std::numeric_limits<M>::min()) || x > long(std::numeric_limits<M>::max()))
              bad(key, "out of range");
            c.*m = M(x);
          },
          [m](const RunConfig& c) { return std::to_string(c.*m); }};
}

Field text(const char* s, const char* k, std::string RunConfig::*m) {
  return {s, k, [m](RunConfig& c, const std::string&, const std::string& v) { c.*m = v; },
          [m](const RunConfig& c) { return c.*m; }};
}

const std::vector<Field>& fields() {
  static const std::vector<Field> f = {
      text("domain", "kind", &RunConfig::domain),
      integer("domain", "dim", &RunConfig::dim),
      real("domain", "radius", &RunConfig::radius),
      real("params", "gamma", &RunConfig::gamma),
      real("params", "mass", &RunConfig::mass),
      real("params", "r", &RunConfig::r),
      real("params", "penalty", &RunConfig::penalty),
      real("params", "delta0", &RunConfig::delta0),
      integer("discretization", "degree", &RunConfig::degree),
      integer("discretization", "order", &RunConfig::order),
      integer("discretization", "ball_harmonics", &RunConfig::ball_harmonics),
      integer("discretization", "stability_degree", &RunConfig::stability_degree),
      real("discretization", "ewald_alpha", &RunConfig::ewald_alpha),
      integer("discretization", "field_grid", &RunConfig::field_grid),
      real("solver", "tol", &RunConfig::tol),
      integer("solver", "max_iter", &RunConfig::max_iter),
      integer("solver", "stall_window", &RunConfig::stall_window),
      text("experiment", "kind", &RunConfig::kind),
      {"experiment", "radii",
       [](RunConfig& c, const std::string& key, const std::string& v) {
         c.radii.clear();
         for (const auto& s : split_list(v)) c.radii.push_back(to_double(key, s));
       },
       [](const RunConfig& c) { return join(c.radii, format_double); }},
      {"experiment", "ladder",
       [](RunConfig& c, const std::string& key, const std::string& v) {
         c.ladder.clear();
         for (const auto& s : split_list(v)) c.ladder.push_back(int(to_long(key, s)));
       },
       [](const RunConfig& c) { return join(c.ladder, [](int x) { return std::to_string(x); }); }},
      {"experiment", "center",
       [](RunConfig& c, const std::string& key, const std::string& v) {
         auto xs = split_list(v);
         if (xs.empty() || xs.size() > 3) bad(key, "expects 1 to 3 components");
         c.center.assign(3, 0.0);
         for (size_t i = 0; i < xs.size(); ++i) c.center[i] = to_double(key, xs[i]);
       },
       [](const RunConfig& c) { return join(c.center, format_double); }},
      integer("experiment", "seed", &RunConfig::seed),
      integer("experiment", "starts", &RunConfig::starts),
      real("experiment", "perturbation", &RunConfig::perturbation),
      integer("experiment", "threads", &RunConfig::threads),
      text("experiment", "out", &RunConfig::out),
  };
  return f;
}

}  // namespace

RunConfig RunConfig::parse(const std::string& text) {
  RunConfig c;
  std::map<std::string, const Field*> index;
  std::set<std::string> sections;
  for (const Field& f : fields()) {
    index[std::string(f.section) + "." + f.key] = &f;
    sections.insert(f.section);
  }
  std::set<std::string> seen;
  std::string section;
  std::istringstream in(text);
  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    const std::string where = "line " + std::to_string(lineno);
    std::string line = trim(raw);
    if (line.empty() || line[0] == '#' || line[0] == ';') continue;
    if (line.front() == '[') {
      if (line.back() != ']') bad(where, "unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      if (!sections.count(section)) bad(where, "unknown section [" + section + "]");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) bad(where, "expected key = value");
    if (section.empty()) bad(where, "key outside a section");
    const std::string key = section + "." + trim(line.substr(0, eq));
    const auto it = index.find(key);
    if (it == index.end()) bad(where, "unknown key " + key);
    if (!seen.insert(key).second) bad(where, "duplicate key " + key);
    it->second->set(c, key, trim(line.substr(eq + 1)));
  }
  c.validate();
  return c;
}

RunConfig RunConfig::load(const std::string& path) { return parse(read_text_file(path)); }

std::string RunConfig::serialize() const {
  std::string out, section;
  for (const Field& f : fields()) {
    if (section != f.section) {
      section = f.section;
      out += (out.empty() ? "[" : "\n[") + section + "]\n";
    }
    out += std::string(f.key) + " = " + f.get(*this) + "\n";
  }
  return out;
}

void RunConfig::validate() const {
  if (domain != "torus" && domain != "ball") bad("domain.kind", "expected torus or ball");
  if (dim != 2 && dim != 3) bad("domain.dim", "expected 2 or 3");
  if (!(radius > 0.0)) bad("domain.radius", "must be positive");
  if (!(gamma >= 0.0)) bad("params.gamma", "must be nonnegative");
  if ((mass > 0.0) == (r > 0.0)) bad("params", "give exactly one of mass or r");
  if (mass < 0.0 || mass >= 1.0) bad("params.mass", "must lie in (0, 1)");
  if (r < 0.0) bad("params.r", "must be positive");
  if (penalty < 0.0) bad("params.penalty", "must be nonnegative");
  if (!(delta0 > 0.0)) bad("params.delta0", "must be positive");
  if (degree < 0 || degree > 64) bad("discretization.degree", "expected 0..64");
  if (order < 0) bad("discretization.order", "must be nonnegative");
  if (order > 0 && order < working_degree()) bad("discretization.order", "must be at least the degree");
  if (ball_harmonics < 0) bad("discretization.ball_harmonics", "must be nonnegative");
  if (stability_degree < 0 || stability_degree > 64) bad("discretization.stability_degree", "expected 0..64");
  if (ewald_alpha < 0.0) bad("discretization.ewald_alpha", "must be nonnegative");
  if (field_grid < 0) bad("discretization.field_grid", "must be nonnegative");
  if (tol < 0.0) bad("solver.tol", "must be nonnegative");
  if (max_iter < 1) bad("solver.max_iter", "must be positive");
  if (stall_window < 1) bad("solver.stall_window", "must be positive");
  static const std::set<std::string> kinds{"expansion", "rate", "centering", "uniqueness", "no_sphere", "linearity"};
  if (!kinds.count(kind)) bad("experiment.kind", "unknown experiment '" + kind + "'");
  for (size_t i = 0; i < radii.size(); ++i) {
    if (!(radii[i] > 0.0)) bad("experiment.radii", "must be positive");
    if (i && !(radii[i] > radii[i - 1])) bad("experiment.radii", "must be strictly ascending");
  }
  for (int L : ladder)
    if (L < 2 || L > 64) bad("experiment.ladder", "degrees must lie in 2..64");
  if (center.size() != 3) bad("experiment.center", "expects 3 components");
  if (starts < 1) bad("experiment.starts", "must be positive");
  if (!(perturbation >= 0.0 && perturbation < 0.5)) bad("experiment.perturbation", "expected [0, 0.5)");
  if (threads < 0) bad("experiment.threads", "must be nonnegative");
  if (out.empty()) bad("experiment.out", "must not be empty");
  // physical consistency with the domain
  const Domain d = make_domain();
  make_params().validate(d);
  for (double rr : radii) {
    if (d.is_torus() && 2.0 * rr > 0.3) bad("experiment.radii", "radius too large for the torus");
    if (!d.is_torus() && !(rr < radius)) bad("experiment.radii", "radius must be below the domain radius");
  }
  if (!d.is_torus() && Vec(center[0], center[1], dim == 3 ? center[2] : 0.0).norm() >= radius)
    bad("experiment.center", "must lie inside the domain");
}

Domain RunConfig::make_domain() const { return domain == "torus" ? Domain::torus(dim) : Domain::ball(dim, radius); }

ModelParams RunConfig::make_params() const {
  const Domain d = domain == "torus" ? Domain::torus(dim) : Domain::ball(dim, radius);
  ModelParams p = r > 0.0 ? ModelParams::with_radius(d, gamma, r) : ModelParams::with_mass(d, gamma, mass);
  p.penalty = penalty;
  p.delta0 = delta0;
  return p;
}

int RunConfig::working_degree() const {
  if (!ladder.empty()) return ladder.front();
  if (degree > 0) return degree;
  return dim == 2 ? 12 : 8;
}

MinimizeOptions RunConfig::solver_options() const {
  MinimizeOptions o;
  o.tol = tol;
  o.max_iter = max_iter;
  o.stall_window = stall_window;
  return o;
}

EnergyResolution RunConfig::energy_resolution() const {
  EnergyResolution e;
  e.order = order;
  e.ball_harmonics = ball_harmonics;
  if (field_grid > 0) {
    e.field.torus_n = field_grid;
    e.field.ball_nr = field_grid;
  }
  return e;
}

Vec RunConfig::start_center() const { return Vec(center[0], center[1], dim == 3 ? center[2] : 0.0); }

}  // namespace okd
