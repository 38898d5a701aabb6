#include "okdroplet/energy.hpp"

#include <array>

namespace okd {

ModelParams ModelParams::with_mass(const Domain& d, double gamma, double m) {
  ModelParams p;
  p.gamma = gamma;
  p.mass = m;
  p.r_m = std::pow(m * d.volume / omega(d.dim), 1.0 / d.dim);
  p.validate(d);
  return p;
}

ModelParams ModelParams::with_radius(const Domain& d, double gamma, double r) {
  ModelParams p;
  p.gamma = gamma;
  p.r_m = r;
  p.mass = omega(d.dim) * std::pow(r, d.dim) / d.volume;
  p.validate(d);
  return p;
}

void ModelParams::validate(const Domain& d) const {
  if (!(mass > 0.0 && mass < 1.0)) fail(ErrorKind::Config, "mass must lie in (0,1)");
  if (!(gamma >= 0.0)) fail(ErrorKind::Config, "gamma must be nonnegative");
  if (!(penalty >= 0.0)) fail(ErrorKind::Config, "penalty must be nonnegative");
  double r = std::pow(mass * d.volume / omega(d.dim), 1.0 / d.dim);
  if (std::abs(r - r_m) > 1e-12 * std::max(1.0, r)) fail(ErrorKind::Config, "r_m inconsistent with mass");
}

double ModelParams::regime_value(int dim) const {
  double v = gamma * r_m * r_m * r_m;
  return dim == 2 ? v * std::abs(std::log(r_m)) : v;
}

double multiplier_theta(const Domain& d, const ModelParams& p) {
  const int n = d.dim;
  const double r = p.r_m;
  GreenEvaluator ev(d);
  double h = std::abs(ev.robin(Vec::Zero()));
  double sup_v = std::abs(radial_convolution(0.0, r, n)) + omega(n) * std::pow(r, n) * (h + 1.0 / d.volume);
  return (n - 1.0) / r + 2.0 * p.gamma * sup_v;
}

double effective_penalty(const Domain& d, const ModelParams& p) {
  return p.penalty > 0.0 ? p.penalty : 10.0 * multiplier_theta(d, p);
}

double ball_gamma_self_energy(int dim) {
  check_dim(dim);
  return dim == 2 ? -pi / 8.0 : 2.0 * omega(dim) / (4.0 - dim * dim);
}

namespace {

// int_r^rho U(s) s^{n-1} ds with U = Gamma * chi_{B_r}, free of cancellation
double layer_integral(double r, double phi, int n) {
  const double rho = r + phi;
  if (n == 3) {
    if (phi >= 0.0) return -r * r * r * phi * (2.0 * r + phi) / 6.0;
    return pow_diff(r, phi, 5) / 30.0 - r * r * pow_diff(r, phi, 3) / 6.0;
  }
  const double d2 = phi * (2.0 * r + phi);
  if (phi >= 0.0) return 0.5 * r * r * (0.5 * d2 * std::log(r) + 0.5 * rho * rho * std::log1p(phi / r) - 0.25 * d2);
  return pow_diff(r, phi, 4) / 16.0 + 0.25 * r * r * (std::log(r) - 0.5) * d2;
}

// surface self-interaction eigenvalue of Gamma on the sphere of radius r
double surface_kernel(int n, double r, int l) {
  if (n == 3) return -1.0 / (r * (2.0 * l + 1.0));
  return l == 0 ? std::log(r) : -0.5 / l;
}

int default_order(int L) { return std::max(8, 2 * L + 8); }

}  // namespace

DropletFunctional::DropletFunctional(const Domain& d, int degree, const EnergyResolution& res)
    : dom_(d), degree_(degree), res_(res) {
  check_dim(d.dim);
  if (degree < 0) fail(ErrorKind::Config, "shape degree must be nonnegative");
  const int o = res.order > 0 ? res.order : default_order(degree);
  if (o < degree + 2) fail(ErrorKind::Resolution, "energy quadrature order too low for the shape degree");
  grid_ = sphere_quadrature(d.dim, o);
  tab_ = basis_table(grid_, degree);
  ktab_ = basis_table(grid_, o);
  if (!d.is_torus()) green_.emplace(d);
}

void DropletFunctional::gamma_part(const DropletShape& s, const VecX& rho, const VecX& phis, bool grad, FunctionalValue& out,
                                   VecX& dnl) const {
  const int n = dom_.dim, N = grid_.size();
  const double r = s.base_radius;
  const double r2n = std::pow(r, n + 2);
  // NL = -Gamma part
  out.nl_base -= r2n * ball_gamma_self_energy(n) + (n == 2 ? 0.5 * pi * r2n * std::log(r) : 0.0);
  VecX wphi(N);
  for (int i = 0; i < N; ++i) {
    const double phi = phis[i];
    out.d_nl -= 2.0 * grid_.weights[i] * layer_integral(r, phi, n);
    wphi[i] = grid_.weights[i] * phi;
    if (grad) dnl[i] -= 2.0 * grid_.weights[i] * radial_convolution(rho[i], r, n) * std::pow(rho[i], n - 1);
  }
  const MatX& K = ktab_->Y;
  VecX Phi = K.transpose() * wphi;
  const double sc = std::pow(r, 2 * n - 2);
  VecX kPhi(Phi.size());
  for (int j = 0; j < Phi.size(); ++j) kPhi[j] = surface_kernel(n, r, basis_degree(n, j)) * Phi[j];
  out.d_nl -= sc * Phi.dot(kPhi);
  if (grad) {
    VecX t = K * kPhi;
    for (int i = 0; i < N; ++i) dnl[i] -= 2.0 * sc * grid_.weights[i] * t[i];
  }
}

void DropletFunctional::torus_part(const DropletShape& s, const VecX& rho, const VecX& phis, bool grad, FunctionalValue& out,
                                   VecX& dnl) const {
  const int n = dom_.dim, N = grid_.size();
  const double r = s.base_radius;
  const double reach = 2.0 * rho.maxCoeff();
  if (reach > 0.7) fail(ErrorKind::Containment, "droplet too large for the torus cell");
  const TorusRegularFit& fit = torus_regular_fit(n, std::max(0.3, 1.02 * reach));
  const int D = fit.degree;
  const int S = D + 1;
  auto idx = [S](int a, int b, int c) { return (a * S + b) * S + c; };
  const int M = S * S * S;
  // moments of the ball and of the layer, about the droplet center
  VecX M0 = VecX::Zero(M), dM = VecX::Zero(M);
  std::vector<std::array<int, 3>> betas;
  for (int a = 0; a <= D; ++a)
    for (int b = 0; a + b <= D; ++b)
      for (int c = 0; a + b + c <= D; ++c) {
        if (n == 2 && c > 0) break;
        betas.push_back({a, b, c});
      }
  std::vector<double> pw(3 * S), rq(D + n + 1), pd(D + n + 1), mono(betas.size());
  for (int q = n; q <= D + n; ++q) rq[q] = std::pow(r, q);
  auto monomials = [&](const Vec& w) {
    for (int k = 0; k < 3; ++k) {
      pw[k * S] = 1.0;
      for (int e = 1; e < S; ++e) pw[k * S + e] = pw[k * S + e - 1] * w[k];
    }
    for (size_t b = 0; b < betas.size(); ++b) mono[b] = pw[betas[b][0]] * pw[S + betas[b][1]] * pw[2 * S + betas[b][2]];
  };
  for (int i = 0; i < N; ++i) {
    monomials(grid_.nodes[i]);
    for (int q = n; q <= D + n; ++q) pd[q] = pow_diff(r, phis[i], q);
    for (size_t b = 0; b < betas.size(); ++b) {
      const auto& bt = betas[b];
      const int q = bt[0] + bt[1] + bt[2] + n;
      const double ang = grid_.weights[i] * mono[b] / q;
      M0[idx(bt[0], bt[1], bt[2])] += ang * rq[q];
      dM[idx(bt[0], bt[1], bt[2])] += ang * pd[q];
    }
  }
  std::vector<double> binom(S * S, 0.0);
  for (int a = 0; a < S; ++a) {
    binom[a * S] = 1.0;
    for (int b = 1; b <= a; ++b) binom[a * S + b] = binom[(a - 1) * S + b - 1] + (b <= a - 1 ? binom[(a - 1) * S + b] : 0.0);
  }
  VecX dRR = grad ? VecX::Zero(M) : VecX();
  double base = 0.0, delta = 0.0;
  for (size_t t = 0; t < fit.exps.size(); ++t) {
    const auto& al = fit.exps[t];
    const double c = fit.coef[t];
    if (c == 0.0) continue;
    for (int a = 0; a <= al[0]; ++a)
      for (int b = 0; b <= al[1]; ++b)
        for (int cc = 0; cc <= al[2]; ++cc) {
          double co = binom[al[0] * S + a] * binom[al[1] * S + b] * binom[al[2] * S + cc];
          if ((a + b + cc) % 2) co = -co;
          const int ib = idx(a, b, cc), ic = idx(al[0] - a, al[1] - b, al[2] - cc);
          base += c * co * M0[ib] * M0[ic];
          delta += c * co * (2.0 * M0[ib] * dM[ic] + dM[ib] * dM[ic]);
          if (grad) dRR[ib] += 2.0 * c * co * (M0[ic] + dM[ic]);
        }
  }
  out.nl_base += base;
  out.d_nl += delta;
  if (!grad) return;
  for (int i = 0; i < N; ++i) {
    monomials(grid_.nodes[i]);
    pd[n - 1] = std::pow(rho[i], n - 1);
    for (int q = n; q < D + n; ++q) pd[q] = pd[q - 1] * rho[i];
    double acc = 0.0;
    for (size_t b = 0; b < betas.size(); ++b) {
      const auto& bt = betas[b];
      acc += dRR[idx(bt[0], bt[1], bt[2])] * mono[b] * pd[bt[0] + bt[1] + bt[2] + n - 1];
    }
    dnl[i] += grid_.weights[i] * acc;
  }
}

void DropletFunctional::ball_part(const DropletShape& s, const VecX& rho, const std::vector<Vec>& grad_rho,
                                  bool grad, FunctionalValue& out, VecX& dnl) const {
  const int n = dom_.dim, N = grid_.size();
  const double a = dom_.radius;
  const Vec& p = s.center;
  double reach = 0.0;
  for (int i = 0; i < N; ++i) reach = std::max(reach, (p + rho[i] * grid_.nodes[i]).norm());
  if (reach >= a) fail(ErrorKind::Containment, "droplet not contained in the ball domain");
  // harmonic degree so that the dropped tail is below 1e-17 relative
  const int cap = res_.ball_harmonics > 0 ? res_.ball_harmonics : (n == 2 ? 96 : 40);
  const double t = std::min(0.999, std::ceil(20.0 * reach / a) / 20.0);
  const int Lr = std::clamp(int(std::ceil(std::log(1e-17) / (2.0 * std::log(t)))), 2, cap);
  const int J = basis_size(n, Lr);
  const int nq = Lr / 2 + 2;
  std::vector<double> gx, gw;
  gauss_legendre(nq, gx, gw);

  // volume, first and second moments about p
  double vol = 0.0, m2 = 0.0;
  Vec m1 = Vec::Zero();
  VecX I = VecX::Zero(J);
  std::vector<double> S(J);
  MatX Sb = grad ? MatX(N, J) : MatX();
  for (int i = 0; i < N; ++i) {
    const double w = grid_.weights[i], rh = rho[i];
    const Vec& u = grid_.nodes[i];
    vol += w * std::pow(rh, n) / n;
    m1 += w * std::pow(rh, n + 1) / (n + 1) * u;
    m2 += w * std::pow(rh, n + 2) / (n + 2);
    for (int q = 0; q < nq; ++q) {
      const double sq = 0.5 * rh * (gx[q] + 1.0);
      const double ws = w * 0.5 * rh * gw[q] * std::pow(sq, n - 1);
      solid_harmonics(n, Lr, p + sq * u, S.data());
      for (int j = 0; j < J; ++j) I[j] += ws * S[j];
    }
    if (grad) {
      solid_harmonics(n, Lr, p + rh * u, S.data());
      for (int j = 0; j < J; ++j) Sb(i, j) = S[j];
    }
  }
  const double x2 = vol * p.squaredNorm() + 2.0 * p.dot(m1) + m2;  // int_E |x|^2
  const double c0 = green_->ball_c0();
  double series = 0.0;
  VecX kI(J);
  for (int j = 0; j < J; ++j) {
    const int l = basis_degree(n, j);
    kI[j] = l == 0 ? 0.0 : green_->ball_kappa(l) * I[j];
    series += kI[j] * I[j];
  }
  const double nO = n * dom_.volume;
  out.d_nl += vol * x2 / nO + c0 * vol * vol + series;
  if (!grad) return;
  VecX sk = Sb * kI;
  for (int i = 0; i < N; ++i) {
    const double w = grid_.weights[i], rh = rho[i];
    const Vec& u = grid_.nodes[i];
    const double dv = w * std::pow(rh, n - 1);
    const double xb2 = (p + rh * u).squaredNorm();
    dnl[i] += dv * (x2 / nO + vol * xb2 / nO + 2.0 * c0 * vol + 2.0 * sk[i]);
    // boundary flux of the solid harmonics gives the center derivative
    out.c_nl += 2.0 * sk[i] * w * std::pow(rh, n - 2) * (rh * u - grad_rho[i]);
  }
  out.c_nl += (2.0 * vol * (vol * p + m1)) / nO;
}

FunctionalValue DropletFunctional::evaluate(const DropletShape& s, bool grad) const {
  if (s.dim != dom_.dim) fail(ErrorKind::Config, "shape and domain dimensions differ");
  if (s.degree != degree_) fail(ErrorKind::Config, "shape degree differs from the functional degree");
  const int n = dom_.dim, N = grid_.size();
  const double r = s.base_radius;
  if (!(r > 0.0)) fail(ErrorKind::InvalidShape, "base radius must be positive");
  ShapeSample ss = sample_shape(s, grid_);
  // the perturbation itself, not rho - r, so tiny shapes keep their digits
  const VecX phis = tab_->Y * s.coeffs;
  if (ss.rho.minCoeff() < 1e-6 * r) fail(ErrorKind::InvalidShape, "radial function not positive");
  FunctionalValue out;
  out.rho = ss.rho;
  VecX dper = VecX::Zero(N), dvol = VecX::Zero(N), dnl = VecX::Zero(N);
  std::vector<Vec> dper_g(grad ? N : 0, Vec::Zero());
  out.per_base = n * omega(n) * std::pow(r, n - 1);
  out.vol_base = omega(n) * std::pow(r, n);
  for (int i = 0; i < N; ++i) {
    const double w = grid_.weights[i], rh = ss.rho[i], phi = phis[i];
    const double g2 = ss.grad[i].squaredNorm();
    const double Sq = std::sqrt(rh * rh + g2);
    // surface element minus its ball value
    if (n == 2) {
      out.d_per += w * (phi * (2.0 * r + phi) + g2) / (Sq + r);
    } else {
      out.d_per += w * (pow_diff(r, phi, 4) + rh * rh * g2) / (rh * Sq + r * r);
    }
    out.d_vol += w * pow_diff(r, phi, n) / n;
    if (grad) {
      dper[i] = w * (n == 2 ? rh / Sq : Sq + rh * rh / Sq);
      dper_g[i] = w * (n == 2 ? 1.0 : rh) / Sq * ss.grad[i];
      dvol[i] = w * std::pow(rh, n - 1);
    }
  }
  gamma_part(s, ss.rho, phis, grad, out, dnl);
  if (dom_.is_torus())
    torus_part(s, ss.rho, phis, grad, out, dnl);
  else
    ball_part(s, ss.rho, ss.grad, grad, out, dnl);
  if (!grad) return out;
  const BasisTable& T = *tab_;
  out.v.resize(N);
  VecX a1(N), a2(N);
  for (int i = 0; i < N; ++i) {
    out.v[i] = dnl[i] / (2.0 * dvol[i]);
    a1[i] = dper_g[i].dot(T.e1[i]);
    a2[i] = n == 3 ? dper_g[i].dot(T.e2[i]) : 0.0;
  }
  out.g_per = T.Y.transpose() * dper + T.D1.transpose() * a1;
  if (n == 3) out.g_per += T.D2.transpose() * a2;
  out.g_nl = T.Y.transpose() * dnl;
  out.g_vol = T.Y.transpose() * dvol;
  return out;
}

EnergyBreakdown total_energy(const Domain& d, const ModelParams& p, const DropletShape& s,
                             const EnergyResolution& res) {
  p.validate(d);
  DropletFunctional fn(d, s.degree, res);
  FunctionalValue fv = fn.evaluate(s, false);
  EnergyBreakdown e;
  e.perimeter = fv.perimeter();
  e.volume = fv.volume();
  e.nonlocal = res.dirichlet ? nl_energy(d, s, res.field) : fv.nonlocal();
  e.total = e.perimeter + p.gamma * e.nonlocal;
  e.penalty_term = effective_penalty(d, p) * std::abs(e.volume - p.target_volume(d));
  e.regime_value = p.regime_value(d.dim);
  e.small_regime = p.in_regime(d.dim);
  return e;
}

double penalized_energy(const Domain& d, const ModelParams& p, const DropletShape& s, const EnergyResolution& res) {
  EnergyBreakdown e = total_energy(d, p, s, res);
  return e.total + e.penalty_term;
}

double ball_energy_expansion(const Domain& d, const ModelParams& p, const Vec& center, int gr_order) {
  p.validate(d);
  const int n = d.dim;
  const double r = p.r_m;
  if (!inner_region_test(d, center, r)) fail(ErrorKind::Containment, "ball B_r(p) not contained in the domain");
  GreenEvaluator ev(d);
  const double g = ev.g_r(center, r, gr_order);
  const double r2n = std::pow(r, n + 2);
  const double vol = omega(n) * std::pow(r, n);
  double gam = r2n * ball_gamma_self_energy(n);
  if (n == 2) gam += 0.5 * pi * r2n * std::log(r);
  return n * omega(n) * std::pow(r, n - 1) + p.gamma * (-gam + vol * vol * g);
}

double shape_symmetric_difference(const DropletShape& a, const DropletShape& b, int order) {
  if (a.dim != b.dim) fail(ErrorKind::Config, "shape dimensions differ");
  const int n = a.dim;
  if (a.center == b.center && a.base_radius == b.base_radius && a.degree == b.degree && a.coeffs == b.coeffs) return 0.0;
  if (order <= 0) order = std::max(64, 4 * std::max(a.degree, b.degree) + 32);
  const double tmax = radial_bound(b) + (b.center - a.center).norm() + radial_bound(a);
  auto F = [n](double x) { return std::pow(x, n) / n; };
  // |[0, rho_A] sym-diff (B along the ray)| with weight s^{n-1}
  auto ray = [&](const Vec& u) {
    const double ra = a.rho(u);
    double inter = 0.0, ub = 0.0;
    for (auto [lo, hi] : ray_inside_intervals(b, a.center, u, tmax)) {
      ub += F(hi) - F(lo);
      double h = std::min(hi, ra);
      if (h > lo) inter += F(h) - F(lo);
    }
    return F(ra) + ub - 2.0 * inter;
  };
  if (n == 3) {
    QuadratureGrid g = sphere_quadrature(n, order);
    double tot = 0.0;
    for (int k = 0; k < g.size(); ++k) tot += g.weights[k] * ray(g.nodes[k]);
    return tot;
  }
  // 2D: split where the boundary of A crosses the boundary of B
  auto side = [&](double t) {
    Vec u(std::cos(t), std::sin(t), 0.0);
    Vec q = a.center + a.rho(u) * u - b.center;
    double d = q.norm();
    return d == 0.0 ? -b.base_radius : d - b.rho(q / d);
  };
  const int M = 8 * order;
  std::vector<double> kinks;
  double t0 = 0.0, f0 = side(0.0);
  for (int i = 1; i <= M; ++i) {
    double t1 = 2.0 * pi * i / M, f1 = side(t1);
    if (f0 == 0.0) {
      kinks.push_back(t0);
    } else if (f0 * f1 < 0.0) {
      double lo = t0, hi = t1, flo = f0;
      for (int it = 0; it < 80 && hi - lo > 1e-15; ++it) {
        double mid = 0.5 * (lo + hi), fm = side(mid);
        if (fm * flo <= 0.0) {
          hi = mid;
        } else {
          lo = mid;
          flo = fm;
        }
      }
      kinks.push_back(0.5 * (lo + hi));
    }
    t0 = t1;
    f0 = f1;
  }
  auto ray_t = [&](double t) { return ray(Vec(std::cos(t), std::sin(t), 0.0)); };
  double tot = 0.0;
  if (kinks.empty()) {
    for (int i = 0; i < M; ++i) tot += ray_t(2.0 * pi * i / M);
    return tot * 2.0 * pi / M;
  }
  std::vector<double> x, w;
  gauss_legendre(48, x, w);
  for (size_t i = 0; i < kinks.size(); ++i) {
    double lo = kinks[i], hi = (i + 1 < kinks.size()) ? kinks[i + 1] : kinks[0] + 2.0 * pi;
    double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
    for (size_t q = 0; q < x.size(); ++q) tot += half * w[q] * ray_t(mid + half * x[q]);
  }
  return tot;
}

std::pair<double, double> nl_lipschitz_gap(const Domain& d, const ModelParams& p, const DropletShape& a,
                                           const DropletShape& b, const EnergyResolution& res) {
  const int n = d.dim;
  const int L = std::max(a.degree, b.degree);
  DropletShape A = a, B = b;
  A.set_degree(L);
  B.set_degree(L);
  DropletFunctional fn(d, L, res);
  FunctionalValue fa = fn.evaluate(A, false), fb = fn.evaluate(B, false);
  if (std::abs(fa.volume() - fb.volume()) > 1e-6 * std::max(fa.volume(), fb.volume()))
    fail(ErrorKind::Config, "nl_lipschitz_gap needs equal volumes");
  (void)p;
  double lhs;
  if (res.dirichlet) {
    lhs = nl_energy(d, B, res.field) - nl_energy(d, A, res.field);
  } else {
    lhs = (fb.nl_base - fa.nl_base) + (fb.d_nl - fa.d_nl);
  }
  const double vb = fb.volume();
  const double rb = std::pow(vb / omega(n), 1.0 / n);
  const double sup = std::abs(radial_convolution(0.0, rb, n));
  return {lhs, (sup + vb) * shape_symmetric_difference(A, B)};
}

}  // namespace okd
