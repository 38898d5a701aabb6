#include "okdroplet/greens.hpp"
#include "okdroplet/shape.hpp"

#include <Eigen/Eigenvalues>

namespace okd {

double gamma_fn(double t, int dim) {
  check_dim(dim);
  if (!(t > 0.0)) fail(ErrorKind::Domain, "fundamental solution needs t > 0");
  if (dim == 2) return std::log(t) / (2.0 * pi);
  return std::pow(t, 2.0 - dim) / (dim * (2.0 - dim) * omega(dim));
}

GreenEvaluator::GreenEvaluator(const Domain& d, const GreenOptions& opt) : dom_(d), opt_(opt) {
  if (opt_.ball_degree <= 0) opt_.ball_degree = d.dim == 2 ? 48 : 24;
  if (d.is_torus()) {
    ewald_.emplace(d.dim, opt_.ewald_alpha);
    return;
  }
  const double a = d.radius;
  const int n = d.dim;
  // the constant mode makes G(x,.) average to zero; evaluate at x = 0
  double cn = n == 3 ? -a * a / 2.0 : 0.5 * a * a * (std::log(a) - 0.5);
  c0_ = (cn - a * a / (2.0 * (n + 2))) / d.volume;
}

double GreenEvaluator::ball_kappa(int l) const {
  const double a = dom_.radius;
  if (dom_.dim == 3) return (l + 1.0) / (l * (2.0 * l + 1.0) * std::pow(a, 2 * l + 1));
  return 1.0 / (2.0 * l * std::pow(a, 2 * l));
}

void GreenEvaluator::require_inside(const Vec& x) const {
  if (!dom_.is_torus() && !(x.norm() < dom_.radius))
    fail(ErrorKind::Domain, "point outside the ball domain");
}

double GreenEvaluator::ball_series(const Vec& x, const Vec& y) const {
  const double a = dom_.radius;
  const double nx = x.norm(), ny = y.norm();
  if (nx == 0.0 || ny == 0.0) return 0.0;
  const double t = nx * ny / (a * a);
  const double c = std::clamp(x.dot(y) / (nx * ny), -1.0, 1.0);
  double s = 0.0;
  double tl = 1.0;
  if (dom_.dim == 3) {
    double p0 = 1.0, p1 = c;
    for (int l = 1; l <= opt_.max_degree; ++l) {
      tl *= t;
      if (l > 1) {
        double p2 = ((2.0 * l - 1.0) * c * p1 - (l - 1.0) * p0) / l;
        p0 = p1;
        p1 = p2;
      }
      s += (l + 1.0) / l * tl * p1;
      if (l >= opt_.ball_degree) {
        double tail = (l + 2.0) / (l + 1.0) * tl * t / (1.0 - t);
        if (tail < opt_.tol * 4.0 * pi * a) return s / (4.0 * pi * a);
      }
    }
  } else {
    const double th = std::acos(c);
    for (int l = 1; l <= opt_.max_degree; ++l) {
      tl *= t;
      s += tl * std::cos(l * th) / l;
      if (l >= opt_.ball_degree) {
        double tail = tl * t / ((l + 1.0) * (1.0 - t));
        if (tail < opt_.tol * 2.0 * pi) return s / (2.0 * pi);
      }
    }
  }
  fail(ErrorKind::Convergence, "ball Green series did not reach tolerance by max_degree");
}

double GreenEvaluator::R(const Vec& x, const Vec& y) const {
  if (dom_.is_torus()) {
    Vec z = periodic_delta(dom_, x, y);
    if (z.norm() < 0.3) return torus_regular_fit(dom_.dim, 0.3).eval(z);
    return ewald_->regular(z);
  }
  require_inside(x);
  require_inside(y);
  const int n = dom_.dim;
  return (x.squaredNorm() + y.squaredNorm()) / (2.0 * n * dom_.volume) + c0_ + ball_series(x, y);
}

double GreenEvaluator::G(const Vec& x, const Vec& y) const {
  if (dom_.is_torus()) return ewald_->green(x - y);
  double d = (x - y).norm();
  if (d == 0.0) fail(ErrorKind::Singularity, "Green function evaluated at coincident points");
  return -gamma_fn(d, dom_.dim) + R(x, y);
}

double GreenEvaluator::robin(const Vec& x) const {
  if (dom_.is_torus()) return ewald_->robin_constant();
  require_inside(x);
  try {
    return R(x, x);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::Convergence)
      fail(ErrorKind::Resolution, "point too close to the boundary for the Robin evaluator");
    throw;
  }
}

double GreenEvaluator::g_r(const Vec& p, double r, int order) const {
  const int n = dom_.dim;
  if (!inner_region_test(dom_, p, r)) fail(ErrorKind::Containment, "ball B_r(p) not contained in the domain");
  QuadratureGrid sg = sphere_quadrature(n, std::max(order, 4));
  std::vector<double> gx, gw;
  gauss_legendre(order, gx, gw);
  std::vector<Vec> pts;
  std::vector<double> wts;
  for (int i = 0; i < order; ++i) {
    double s = 0.5 * r * (gx[i] + 1.0);
    double ws = 0.5 * r * gw[i] * std::pow(s, n - 1);
    for (int k = 0; k < sg.size(); ++k) {
      pts.push_back(p + s * sg.nodes[k]);
      wts.push_back(ws * sg.weights[k]);
    }
  }
  double tot = 0.0, wsum = 0.0;
  for (size_t i = 0; i < pts.size(); ++i) {
    wsum += wts[i];
    double row = 0.0;
    for (size_t j = 0; j < pts.size(); ++j) row += wts[j] * R(pts[i], pts[j]);
    tot += wts[i] * row;
  }
  return tot / (wsum * wsum);
}

Vec GreenEvaluator::reflect(const Vec& x) const {
  if (dom_.is_torus()) fail(ErrorKind::Domain, "reflection across the boundary needs a ball domain");
  double nx = x.norm();
  if (nx == 0.0) fail(ErrorKind::Domain, "the center has no unique boundary projection");
  return (2.0 * dom_.radius - nx) / nx * x;
}

double GreenEvaluator::image_remainder(const Vec& x, const Vec& y) const {
  Vec xs = reflect(x);
  return R(x, y) + gamma_fn((xs - y).norm(), dom_.dim);
}

HarmonicCenterReport harmonic_centers(const GreenEvaluator& ev) {
  HarmonicCenterReport rep;
  const Domain& d = ev.domain();
  const int n = d.dim;
  if (d.is_torus()) {
    rep.centers.push_back(Vec::Zero());
    rep.h_values.push_back(ev.torus_robin());
    rep.hessian_min_eig.push_back(0.0);
    return rep;
  }
  const double a = d.radius;
  auto h = [&](const VecX& x) {
    Vec p = Vec::Zero();
    p.head(n) = x;
    if (p.norm() > 0.9 * a) return 1e3 + p.norm();
    return ev.robin(p);
  };
  NelderMeadOptions opt;
  opt.step = 0.1 * a;
  opt.xtol = 1e-10 * a;
  opt.ftol = 1e-16;
  std::vector<VecX> starts;
  const int g = 3;
  const int nz = n == 3 ? g : 1;
  for (int i = 0; i < g; ++i)
    for (int j = 0; j < g; ++j)
      for (int k = 0; k < nz; ++k) {
        VecX x(n);
        x[0] = 0.5 * a * (i - 1);
        x[1] = 0.5 * a * (j - 1);
        if (n == 3) x[2] = 0.5 * a * (k - 1);
        starts.push_back(x);
      }
  std::vector<std::pair<VecX, double>> found;
  for (const VecX& s : starts) {
    double fm = 0.0;
    VecX x = nelder_mead(h, s, opt, &fm);
    found.emplace_back(x, fm);
  }
  double best = 1e300;
  for (auto& f : found) best = std::min(best, f.second);
  for (auto& [x, fv] : found) {
    if (fv > best + 1e-9) continue;
    bool dup = false;
    for (const Vec& c : rep.centers)
      if ((c.head(n) - x).norm() < 1e-3 * a) dup = true;
    if (dup) continue;
    Vec c = Vec::Zero();
    c.head(n) = x;
    const double e = 1e-3 * a;
    MatX H(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        auto at = [&](double si, double sj) {
          VecX y = x;
          y[i] += si * e;
          y[j] += sj * e;
          return h(y);
        };
        H(i, j) = (at(1, 1) - at(1, -1) - at(-1, 1) + at(-1, -1)) / (4 * e * e);
      }
    Eigen::SelfAdjointEigenSolver<MatX> es(H);
    rep.centers.push_back(c);
    rep.h_values.push_back(fv);
    rep.hessian_min_eig.push_back(es.eigenvalues().minCoeff());
  }
  return rep;
}

}  // namespace okd
