#include "okdroplet/shape.hpp"

#include <Eigen/Eigenvalues>

#include <json.hpp>

#include <algorithm>
#include <limits>
#include <numeric>

namespace okd {

DropletShape DropletShape::ball(int dim, const Vec& p, double r, int degree) {
  check_dim(dim);
  if (!(r > 0.0)) fail(ErrorKind::InvalidShape, "base radius must be positive");
  DropletShape s;
  s.dim = dim;
  s.center = p;
  s.base_radius = r;
  s.degree = degree;
  s.coeffs = VecX::Zero(basis_size(dim, degree));
  return s;
}

void DropletShape::set_degree(int L) {
  VecX c = VecX::Zero(basis_size(dim, L));
  int k = std::min<int>(c.size(), coeffs.size());
  c.head(k) = coeffs.head(k);
  coeffs = c;
  degree = L;
}

double DropletShape::phi(const Vec& dir) const {
  if (coeffs.size() == 0 || coeffs.isZero(0.0)) return 0.0;
  BasisPoint bp;
  eval_basis(dim, degree, dir, bp);
  return bp.val.dot(coeffs);
}

ShapeSample sample_shape(const DropletShape& s, const QuadratureGrid& grid) {
  auto tab = basis_table(grid, s.degree);
  ShapeSample out;
  const int N = grid.size();
  out.rho = VecX::Constant(N, s.base_radius) + tab->Y * s.coeffs;
  VecX g1 = tab->D1 * s.coeffs;
  VecX g2 = s.dim == 3 ? VecX(tab->D2 * s.coeffs) : VecX::Zero(N);
  out.grad.resize(N);
  for (int k = 0; k < N; ++k) out.grad[k] = g1[k] * tab->e1[k] + g2[k] * tab->e2[k];
  return out;
}

static void require_star(const DropletShape& s, const VecX& rho) {
  if (rho.minCoeff() < 1e-6 * s.base_radius)
    fail(ErrorKind::InvalidShape, "radial function not positive (min r+phi = " + std::to_string(rho.minCoeff()) + ")");
}

void check_star_shaped(const DropletShape& s, const QuadratureGrid& grid) {
  require_star(s, sample_shape(s, grid).rho);
}

double volume(const DropletShape& s, const QuadratureGrid& grid) {
  ShapeSample ss = sample_shape(s, grid);
  require_star(s, ss.rho);
  const int n = s.dim;
  double v = 0.0;
  for (int k = 0; k < grid.size(); ++k) v += grid.weights[k] * std::pow(ss.rho[k], n) / n;
  return v;
}

double perimeter(const DropletShape& s, const QuadratureGrid& grid) {
  ShapeSample ss = sample_shape(s, grid);
  require_star(s, ss.rho);
  double a = 0.0;
  for (int k = 0; k < grid.size(); ++k) {
    double rho = ss.rho[k];
    double el = std::sqrt(rho * rho + ss.grad[k].squaredNorm());
    if (s.dim == 3) el *= rho;
    a += grid.weights[k] * el;
  }
  return a;
}

namespace {

// Hessian and gradient of the level set |x| - rho(x/|x|) on the surface
void level_set_derivatives(const DropletShape& s, const Vec& node, Mat3& D2, Vec& N) {
  Vec xh = node.normalized();
  BasisPoint bp;
  eval_basis(s.dim, s.degree, xh, bp, true);
  double rho = s.base_radius + bp.val.dot(s.coeffs);
  if (rho < 1e-6 * s.base_radius) fail(ErrorKind::InvalidShape, "radial function not positive");
  Vec g = bp.d1.dot(s.coeffs) * bp.e1;
  Mat3 hs = bp.h11.dot(s.coeffs) * bp.e1 * bp.e1.transpose();
  if (s.dim == 3) {
    g += bp.d2.dot(s.coeffs) * bp.e2;
    double h12 = bp.h12.dot(s.coeffs);
    hs += h12 * (bp.e1 * bp.e2.transpose() + bp.e2 * bp.e1.transpose()) +
          bp.h22.dot(s.coeffs) * bp.e2 * bp.e2.transpose();
  }
  Mat3 P = Mat3::Identity() - xh * xh.transpose();
  if (s.dim == 2) P(2, 2) = 0.0;
  D2 = P / rho - (hs - xh * g.transpose() - g * xh.transpose()) / (rho * rho);
  N = xh - g / rho;
}

}  // namespace

double mean_curvature(const DropletShape& s, const Vec& node) {
  Mat3 D2;
  Vec N;
  level_set_derivatives(s, node, D2, N);
  double nn = N.norm();
  return D2.trace() / nn - N.dot(D2 * N) / (nn * nn * nn);
}

std::vector<double> principal_curvatures(const DropletShape& s, const Vec& node) {
  Mat3 D2;
  Vec N;
  level_set_derivatives(s, node, D2, N);
  const double nn = N.norm();
  const Vec nh = N / nn;
  if (s.dim == 2) {
    Vec t(-nh.y(), nh.x(), 0.0);
    return {t.dot(D2 * t) / nn};
  }
  Vec a = std::abs(nh.x()) < 0.9 ? Vec::UnitX() : Vec::UnitY();
  Vec t1 = (a - a.dot(nh) * nh).normalized();
  Vec t2 = nh.cross(t1);
  Eigen::Matrix2d W;
  W << t1.dot(D2 * t1), t1.dot(D2 * t2), t2.dot(D2 * t1), t2.dot(D2 * t2);
  W /= nn;
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(W);
  return {es.eigenvalues()[0], es.eigenvalues()[1]};
}

Vec barycenter(const DropletShape& s, const QuadratureGrid& grid) {
  ShapeSample ss = sample_shape(s, grid);
  require_star(s, ss.rho);
  const int n = s.dim;
  double v = 0.0;
  Vec m = Vec::Zero();
  for (int k = 0; k < grid.size(); ++k) {
    double rn = std::pow(ss.rho[k], n);
    v += grid.weights[k] * rn / n;
    m += grid.weights[k] * rn * ss.rho[k] / (n + 1) * grid.nodes[k];
  }
  return s.center + m / v;
}

bool contains(const DropletShape& s, const Vec& x) {
  Vec q = x - s.center;
  double d = q.norm();
  if (d == 0.0) return true;
  return d < s.rho(q / d);
}

namespace {

// Signed boundary function along the ray c + t u, negative inside E.
struct RayProbe {
  const DropletShape& s;
  Vec c, u;
  BasisPoint bp;
  double operator()(double t) {
    Vec q = c + t * u - s.center;
    double d = q.norm();
    if (d < 1e-300) return -s.base_radius;
    eval_basis(s.dim, s.degree, q / d, bp);
    return d - (s.base_radius + bp.val.dot(s.coeffs));
  }
};

template <class F>
double illinois(F& f, double a, double b, double fa, double fb) {
  int side = 0;
  for (int it = 0; it < 100; ++it) {
    double c = (fa * b - fb * a) / (fa - fb);
    if (std::abs(b - a) < 1e-15 * (1.0 + std::abs(b))) return c;
    double fc = f(c);
    if (fc == 0.0) return c;
    if (fc * fb > 0) {
      b = c;
      fb = fc;
      if (side == -1) fa *= 0.5;
      side = -1;
    } else {
      a = c;
      fa = fc;
      if (side == 1) fb *= 0.5;
      side = 1;
    }
  }
  return 0.5 * (a + b);
}

}  // namespace

std::vector<std::pair<double, double>> ray_inside_intervals(const DropletShape& s, const Vec& c, const Vec& u,
                                                            double tmax, int nsamp) {
  RayProbe f{s, c, u, {}};
  std::vector<double> cross;
  double t0 = 0.0, f0 = f(0.0);
  const bool inside0 = f0 < 0.0;
  for (int i = 1; i <= nsamp; ++i) {
    double t1 = tmax * i / nsamp, f1 = f(t1);
    if ((f0 < 0.0) != (f1 < 0.0)) cross.push_back(illinois(f, t0, t1, f0, f1));
    t0 = t1;
    f0 = f1;
  }
  std::vector<std::pair<double, double>> in;
  double start = 0.0;
  bool inside = inside0;
  for (double t : cross) {
    if (inside) in.emplace_back(start, t);
    start = t;
    inside = !inside;
  }
  if (inside) in.emplace_back(start, tmax);
  return in;
}

double radial_bound(const DropletShape& s) {
  double c1 = 0.0;
  for (int j = 0; j < s.coeffs.size(); ++j) c1 += std::abs(s.coeffs[j]);
  // sup of the basis: 1/sqrt(pi) in 2D, sqrt((2l+1)/2pi) in 3D
  double yb = s.dim == 2 ? 1.0 / std::sqrt(pi) : std::sqrt((2.0 * s.degree + 1.0) / (2.0 * pi));
  return s.base_radius + c1 * yb;
}

namespace {

// Integral of |chi_E - chi_B| s^{n-1} ds along one ray.
double ray_symdiff(const DropletShape& s, const Vec& c, const Vec& u, double R, double smax, int nsamp) {
  const int n = s.dim;
  auto in = ray_inside_intervals(s, c, u, smax, nsamp);
  auto W = [n](double t) { return std::pow(t, n) / n; };
  double e = 0.0, eb = 0.0;
  for (auto [a, b] : in) {
    e += W(b) - W(a);
    double lo = std::min(a, R), hi = std::min(b, R);
    if (hi > lo) eb += W(hi) - W(lo);
  }
  return e + W(R) - 2.0 * eb;
}

}  // namespace

double symmetric_difference(const DropletShape& s, const Vec& c, double R, const QuadratureGrid& grid) {
  const double smax = 1.05 * ((c - s.center).norm() + radial_bound(s)) + 1e-12;
  const int nsamp = 48;
  if (s.dim == 3) {
    double tot = 0.0;
    for (int k = 0; k < grid.size(); ++k)
      tot += grid.weights[k] * ray_symdiff(s, c, grid.nodes[k], R, smax, nsamp);
    return tot;
  }
  // 2D: split the angle at the points where the two boundaries meet, then
  // integrate each smooth piece with Gauss-Legendre.
  RayProbe h{s, c, Vec::Zero(), {}};
  auto hb = [&](double t) {
    h.u = Vec(std::cos(t), std::sin(t), 0.0);
    return h(R);
  };
  const int M = std::max(720, 8 * grid.size());
  std::vector<double> kinks;
  double a = 0.0, fa = hb(0.0);
  for (int i = 1; i <= M; ++i) {
    double b = 2.0 * pi * i / M, fb = hb(b);
    if (fa == 0.0) kinks.push_back(a);
    else if (fa * fb < 0.0) kinks.push_back(illinois(hb, a, b, fa, fb));
    a = b;
    fa = fb;
  }
  auto ray = [&](double t) { return ray_symdiff(s, c, Vec(std::cos(t), std::sin(t), 0.0), R, smax, nsamp); };
  double tot = 0.0;
  if (kinks.empty()) {
    const int K = 512;
    for (int i = 0; i < K; ++i) tot += ray(2.0 * pi * i / K);
    return tot * 2.0 * pi / K;
  }
  std::vector<double> x, w;
  gauss_legendre(48, x, w);
  for (size_t i = 0; i < kinks.size(); ++i) {
    double lo = kinks[i], hi = (i + 1 < kinks.size()) ? kinks[i + 1] : kinks[0] + 2.0 * pi;
    double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
    for (size_t q = 0; q < x.size(); ++q) tot += half * w[q] * ray(mid + half * x[q]);
  }
  return tot;
}

VecX nelder_mead(const std::function<double(const VecX&)>& f, VecX x0, const NelderMeadOptions& opt,
                 double* fmin) {
  const int d = int(x0.size());
  std::vector<VecX> xs(d + 1, x0);
  std::vector<double> fs(d + 1);
  for (int i = 0; i < d; ++i) xs[i + 1][i] += opt.step;
  for (int i = 0; i <= d; ++i) fs[i] = f(xs[i]);
  std::vector<int> idx(d + 1);
  for (int it = 0; it < opt.max_iter; ++it) {
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](int a, int b) { return fs[a] < fs[b]; });
    const int best = idx[0], worst = idx[d], second = idx[d - 1];
    double size = 0.0;
    for (int i = 1; i <= d; ++i) size = std::max(size, (xs[idx[i]] - xs[best]).cwiseAbs().maxCoeff());
    if (size < opt.xtol && std::abs(fs[worst] - fs[best]) <= opt.ftol) break;
    if (size < opt.xtol * 1e-3) break;
    VecX cen = VecX::Zero(d);
    for (int i = 0; i < d; ++i) cen += xs[idx[i]];
    cen /= d;
    VecX xr = cen + (cen - xs[worst]);
    double fr = f(xr);
    if (fr < fs[best]) {
      VecX xe = cen + 2.0 * (cen - xs[worst]);
      double fe = f(xe);
      if (fe < fr) xs[worst] = xe, fs[worst] = fe;
      else xs[worst] = xr, fs[worst] = fr;
    } else if (fr < fs[second]) {
      xs[worst] = xr;
      fs[worst] = fr;
    } else {
      bool outside = fr < fs[worst];
      VecX xc = outside ? VecX(cen + 0.5 * (xr - cen)) : VecX(cen + 0.5 * (xs[worst] - cen));
      double fc = f(xc);
      if (fc < std::min(fr, fs[worst])) {
        xs[worst] = xc;
        fs[worst] = fc;
      } else {
        for (int i = 1; i <= d; ++i) {
          xs[idx[i]] = xs[best] + 0.5 * (xs[idx[i]] - xs[best]);
          fs[idx[i]] = f(xs[idx[i]]);
        }
      }
    }
  }
  int b = int(std::min_element(fs.begin(), fs.end()) - fs.begin());
  if (fmin) *fmin = fs[b];
  return xs[b];
}

AsymmetryResult frankel_asymmetry(const DropletShape& s, const QuadratureGrid& grid) {
  const int n = s.dim;
  const double vol = volume(s, grid);
  const double R = std::pow(vol / omega(n), 1.0 / n);
  Vec bc = barycenter(s, grid);
  auto obj = [&](const VecX& x) {
    Vec c = Vec::Zero();
    c.head(n) = x;
    return symmetric_difference(s, c, R, grid) / vol;
  };
  NelderMeadOptions opt;
  opt.step = 0.05 * R;
  opt.xtol = 1e-6 * R;
  opt.ftol = 1e-12;
  // start at the barycenter, then restart from the best point with a fresh
  // simplex until the value stops improving
  AsymmetryResult best;
  VecX x = bc.head(n);
  double fbest = obj(x);
  for (int k = 0; k < 4; ++k) {
    double fm = 0.0;
    VecX y = nelder_mead(obj, x, opt, &fm);
    const bool improved = fm < fbest - 1e-13;
    if (fm < fbest) {
      fbest = fm;
      x = y;
    }
    if (!improved) break;
    opt.step = std::max(0.1 * opt.step, 1e-6 * R);
  }
  best.alpha = fbest;
  best.optimal_center.head(n) = x;
  best.alpha = std::clamp(best.alpha, 0.0, 2.0);
  return best;
}

std::pair<double, double> c1_norm(const DropletShape& s, const QuadratureGrid& grid) {
  ShapeSample ss = sample_shape(s, grid);
  double m = 0.0;
  for (int k = 0; k < grid.size(); ++k)
    m = std::max(m, std::abs(ss.rho[k] - s.base_radius) + ss.grad[k].norm());
  return {m, m / s.base_radius};
}

std::string shape_to_json(const DropletShape& s) {
  nlohmann::json j;
  j["dim"] = s.dim;
  j["center"] = std::vector<double>(s.center.data(), s.center.data() + s.dim);
  j["base_radius"] = s.base_radius;
  j["degree"] = s.degree;
  j["coeffs"] = std::vector<double>(s.coeffs.data(), s.coeffs.data() + s.coeffs.size());
  return j.dump(2);
}

DropletShape shape_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const std::exception& e) {
    fail(ErrorKind::Config, std::string("shape record: ") + e.what());
  }
  try {
    DropletShape s;
    s.dim = j.at("dim").get<int>();
    check_dim(s.dim);
    auto c = j.at("center").get<std::vector<double>>();
    if (int(c.size()) != s.dim) fail(ErrorKind::Config, "shape record: center has wrong length");
    s.center = Vec::Zero();
    for (int i = 0; i < s.dim; ++i) s.center[i] = c[i];
    s.base_radius = j.at("base_radius").get<double>();
    s.degree = j.at("degree").get<int>();
    auto co = j.at("coeffs").get<std::vector<double>>();
    if (int(co.size()) != basis_size(s.dim, s.degree))
      fail(ErrorKind::Config, "shape record: coeffs length does not match degree");
    s.coeffs = Eigen::Map<VecX>(co.data(), co.size());
    return s;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::Config, std::string("shape record: ") + e.what());
  }
}

}  // namespace okd
