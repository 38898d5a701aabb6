#include "okdroplet/ewald.hpp"

#include <map>
#include <mutex>
#include <random>

namespace okd {

namespace {
constexpr double euler_gamma = 0.57721566490153286061;
}

double expint_ein(double x) {
  if (x < 2.0) {
    double term = 1.0, s = 0.0;
    for (int k = 1; k < 60; ++k) {
      term *= -x / k;
      double add = -term / k;
      s += add;
      if (std::abs(add) < 1e-18 * std::abs(s)) break;
    }
    return s;
  }
  return expint_e1(x) + euler_gamma + std::log(x);
}

double expint_e1(double x) {
  if (!(x > 0.0)) fail(ErrorKind::Domain, "E1 needs a positive argument");
  if (x < 1.0) return expint_ein(x) - euler_gamma - std::log(x);
  return -std::expint(-x);
}

EwaldSum::EwaldSum(int dim, double alpha, double tol) : dim_(dim), alpha_(alpha) {
  check_dim(dim);
  if (!(alpha > 0.0)) fail(ErrorKind::Config, "Ewald splitting parameter must be positive");
  // real space: images beyond distance d contribute below tol
  double d = 0.5;
  while ((dim == 3 ? std::erfc(alpha * d) / (4 * pi * d) : expint_e1(alpha * alpha * d * d) / (4 * pi)) > tol) d += 0.05;
  nreal_ = int(std::ceil(d + 0.5 * std::sqrt(double(dim))));
  double k = 1.0;
  while (std::exp(-pi * pi * k * k / (alpha * alpha)) / (4 * pi * pi * k * k) > tol) k += 0.05;
  nrecip_ = int(std::ceil(k));
}

double EwaldSum::sum(const Vec& z0, bool drop_singular) const {
  Vec z = z0;
  for (int i = 0; i < dim_; ++i) z[i] -= std::nearbyint(z[i]);
  if (dim_ == 2) z[2] = 0.0;
  const double a = alpha_, a2 = a * a;
  double real = 0.0;
  const int nr = nreal_;
  const int nz = dim_ == 3 ? nr : 0;
  for (int i = -nr; i <= nr; ++i)
    for (int j = -nr; j <= nr; ++j)
      for (int k = -nz; k <= nz; ++k) {
        Vec y = z + Vec(i, j, k);
        double r = y.norm();
        bool origin = (i == 0 && j == 0 && k == 0);
        if (origin && drop_singular) {
          if (dim_ == 3)
            real += (r < 1e-12) ? -a / (2.0 * std::pow(pi, 1.5)) : -std::erf(a * r) / (4 * pi * r);
          else
            real += (expint_ein(a2 * r * r) - euler_gamma - 2.0 * std::log(a)) / (4 * pi);
          continue;
        }
        if (r == 0.0) fail(ErrorKind::Singularity, "Green function evaluated at coincident points");
        real += dim_ == 3 ? std::erfc(a * r) / (4 * pi * r) : expint_e1(a2 * r * r) / (4 * pi);
      }
  double rec = 0.0;
  const int nk = nrecip_;
  const int nkz = dim_ == 3 ? nk : 0;
  // use k -> -k symmetry: visit half the lattice
  for (int i = 0; i <= nk; ++i)
    for (int j = -nk; j <= nk; ++j)
      for (int k = -nkz; k <= nkz; ++k) {
        if (i == 0 && (j < 0 || (j == 0 && k <= 0))) continue;
        double k2 = double(i) * i + double(j) * j + double(k) * k;
        double arg = 2 * pi * (i * z[0] + j * z[1] + k * z[2]);
        rec += 2.0 * std::exp(-pi * pi * k2 / a2) / (4 * pi * pi * k2) * std::cos(arg);
      }
  return real + rec - 1.0 / (4.0 * a2);
}

double EwaldSum::green(const Vec& z) const { return sum(z, false); }

double EwaldSum::regular(const Vec& z) const { return sum(z, true); }

namespace {

std::vector<std::array<int, 3>> even_exponents(int dim, int degree) {
  std::vector<std::array<int, 3>> out;
  for (int tot = 0; tot <= degree; tot += 2)
    for (int a = tot; a >= 0; a -= 2)
      for (int b = tot - a; b >= 0; b -= 2) {
        int c = tot - a - b;
        if (dim == 2 && c != 0) continue;
        if (dim == 2 && b != tot - a) continue;
        out.push_back({a, b, c});
      }
  return out;
}

double monomial(const std::array<int, 3>& e, const Vec& u) {
  double v = 1.0;
  for (int i = 0; i < 3; ++i)
    for (int p = 0; p < e[i]; ++p) v *= u[i];
  return v;
}

Vec random_in_ball(int dim, double radius, std::mt19937_64& rng, bool on_sphere) {
  std::normal_distribution<double> nd;
  std::uniform_real_distribution<double> ud;
  Vec v(nd(rng), nd(rng), dim == 3 ? nd(rng) : 0.0);
  v.normalize();
  double s = on_sphere ? 1.0 : std::pow(ud(rng), 1.0 / dim);
  return radius * s * v;
}

}  // namespace

double TorusRegularFit::eval(const Vec& z) const {
  double s = 0.0;
  for (size_t i = 0; i < exps.size(); ++i) s += coef[i] * monomial(exps[i], z);
  return s;
}

TorusRegularFit fit_torus_regular(int dim, double radius, int degree) {
  check_dim(dim);
  if (!(radius > 0.0 && radius < 0.75)) fail(ErrorKind::Resolution, "torus regular-part fit radius out of range");
  if (degree <= 0) {
    degree = int(std::ceil(std::log(1e-13) / std::log(radius)));
    degree += degree % 2;
    degree = std::clamp(degree, 8, dim == 2 ? 40 : 28);
  }
  TorusRegularFit f;
  f.dim = dim;
  f.degree = degree;
  f.radius = radius;
  f.exps = even_exponents(dim, degree);
  const int M = int(f.exps.size());
  EwaldSum ew(dim);
  std::mt19937_64 rng(12345);
  const int P = 4 * M + 64;
  MatX A(P, M);
  VecX b(P);
  for (int p = 0; p < P; ++p) {
    Vec z = random_in_ball(dim, radius, rng, p % 4 == 0);
    Vec u = z / radius;
    for (int m = 0; m < M; ++m) A(p, m) = monomial(f.exps[m], u);
    b[p] = ew.regular(z);
  }
  VecX cs = A.colPivHouseholderQr().solve(b);
  f.coef.resize(M);
  for (int m = 0; m < M; ++m) {
    int deg = f.exps[m][0] + f.exps[m][1] + f.exps[m][2];
    f.coef[m] = cs[m] / std::pow(radius, deg);
  }
  double err = 0.0;
  for (int p = 0; p < 200; ++p) {
    Vec z = random_in_ball(dim, radius, rng, p % 2 == 0);
    err = std::max(err, std::abs(f.eval(z) - ew.regular(z)));
  }
  f.max_error = err;
  return f;
}

const TorusRegularFit& torus_regular_fit(int dim, double min_radius) {
  static const double buckets[] = {0.3, 0.4, 0.5, 0.6, 0.7};
  double rad = -1.0;
  for (double b : buckets)
    if (b >= min_radius) {
      rad = b;
      break;
    }
  if (rad < 0.0) fail(ErrorKind::Resolution, "droplet too large for the torus regular-part expansion");
  static std::mutex mu;
  static std::map<std::pair<int, double>, TorusRegularFit> cache;
  std::lock_guard<std::mutex> lk(mu);
  auto key = std::make_pair(dim, rad);
  auto it = cache.find(key);
  if (it == cache.end()) it = cache.emplace(key, fit_torus_regular(dim, rad)).first;
  return it->second;
}

}  // namespace okd
