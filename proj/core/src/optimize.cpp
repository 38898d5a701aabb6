#include "okdroplet/optimize.hpp"

#include <limits>

namespace okd {

namespace {

ELReport residual_from(const DropletFunctional& fn, const ModelParams& p, const DropletShape& s,
                       const FunctionalValue& fv) {
  const QuadratureGrid& g = fn.grid();
  const int n = s.dim, N = g.size();
  ShapeSample ss = sample_shape(s, g);
  ELReport el;
  el.curvature.resize(N);
  el.potential = fv.v;
  VecX ds(N);
  double area = 0.0, mean = 0.0;
  for (int i = 0; i < N; ++i) {
    el.curvature[i] = mean_curvature(s, g.nodes[i]);
    const double rh = ss.rho[i];
    ds[i] = g.weights[i] * std::pow(rh, n - 2) * std::sqrt(rh * rh + ss.grad[i].squaredNorm());
    area += ds[i];
    mean += ds[i] * (el.curvature[i] + 2.0 * p.gamma * fv.v[i]);
  }
  el.multiplier = mean / area;
  el.residual.resize(N);
  double l2 = 0.0;
  for (int i = 0; i < N; ++i) {
    el.residual[i] = el.curvature[i] + 2.0 * p.gamma * fv.v[i] - el.multiplier;
    l2 += ds[i] * el.residual[i] * el.residual[i];
  }
  el.residual_linf = el.residual.cwiseAbs().maxCoeff();
  el.residual_l2 = std::sqrt(l2 / area);
  return el;
}

}  // namespace

ELReport el_residual(const Domain& d, const ModelParams& p, const DropletShape& s, const EnergyResolution& res) {
  p.validate(d);
  DropletFunctional fn(d, s.degree, res);
  return residual_from(fn, p, s, fn.evaluate(s, true));
}

MinimizeResult minimize(const Domain& d, const ModelParams& p, const DropletShape& initial,
                        const MinimizeOptions& opt, const EnergyResolution& res) {
  p.validate(d);
  const int n = d.dim;
  if (initial.dim != n) fail(ErrorKind::Config, "shape and domain dimensions differ");
  const double V0 = p.target_volume(d);
  {
    double v0 = volume(initial, sphere_quadrature(n, std::max(8, 2 * initial.degree + 8)));
    if (std::abs(v0 - V0) > 0.1 * V0) fail(ErrorKind::Config, "initial volume not within 10% of the target");
  }
  DropletFunctional fn(d, initial.degree, res);
  const double lam = effective_penalty(d, p);
  const double r = initial.base_radius;
  const double tol = opt.tol > 0.0 ? opt.tol : 1e-9 * (n - 1.0) / r;
  const int J = int(initial.coeffs.size());
  const bool move_center = opt.move_center && !d.is_torus() && p.gamma > 0.0;

  // metric: perimeter second variation on each degree, kept positive
  VecX precond(J), mask(J);
  for (int j = 0; j < J; ++j) {
    const int l = basis_degree(n, j);
    precond[j] = std::pow(r, n - 3) * (1.0 + lb_eigenvalue(n, j));
    mask[j] = l == 1 ? 0.0 : 1.0;
  }
  double hc = 1.0;
  if (move_center) {
    const double vol = omega(n) * std::pow(r, n);
    const double d2h = n == 2 ? 2.0 / (pi * d.radius * d.radius) : 3.0 / (2.0 * pi * std::pow(d.radius, 3));
    hc = p.gamma * vol * vol * d2h;
  }

  // exact volume through the constant mode, from cheap nodal sums
  auto tab = basis_table(fn.grid(), initial.degree);
  const QuadratureGrid& qg = fn.grid();
  auto fix_volume = [&](DropletShape& t) {
    for (int k = 0; k < 3; ++k) {
      VecX phi = tab->Y * t.coeffs;
      double dv = omega(n) * std::pow(r, n) - V0, dd = 0.0;
      for (int i = 0; i < qg.size(); ++i) {
        dv += qg.weights[i] * pow_diff(r, phi[i], n) / n;
        dd += qg.weights[i] * std::pow(r + phi[i], n - 1) * tab->Y(i, 0);
      }
      t.coeffs[0] -= dv / dd;
    }
  };

  auto reduced = [&](const FunctionalValue& v) {
    const VecX gf = v.g_per + p.gamma * v.g_nl;
    const double mu = gf[0] / v.g_vol[0];
    VecX gr = (gf - mu * v.g_vol).cwiseProduct(mask);
    gr[0] = 0.0;
    return std::pair<VecX, double>(std::move(gr), mu);
  };
  auto measure = [&](const FunctionalValue& v) {
    const VecX gr = reduced(v).first;
    double q = gr.dot(gr.cwiseQuotient(precond));
    if (move_center) q += p.gamma * p.gamma * v.c_nl.squaredNorm() / hc;
    return q;
  };
  auto objective = [&](const FunctionalValue& fv) {
    return fv.d_per + p.gamma * fv.d_nl + lam * std::abs(fv.d_vol + (fv.vol_base - V0));
  };
  auto base_of = [&](const FunctionalValue& fv) { return fv.per_base + p.gamma * fv.nl_base; };

  MinimizeResult out;
  DropletShape s = initial;
  FunctionalValue fv = fn.evaluate(s, true);
  out.history.push_back(base_of(fv) + objective(fv));
  out.centers.push_back(s.center);
  double alpha = 1.0;
  int it = 0, best_it = 0;
  double best = std::numeric_limits<double>::infinity();
  out.status = "max_iter";
  for (; it < opt.max_iter; ++it) {
    out.el = residual_from(fn, p, s, fv);
    if (out.el.residual_linf < tol) {
      out.converged = true;
      out.status = "converged";
      break;
    }
    if (out.el.residual_linf < 0.99 * best) {
      best = out.el.residual_linf;
      best_it = it;
    } else if (it - best_it >= opt.stall_window) {
      out.status = "stalled";
      break;
    }
    // reduced gradient on the volume constraint; the constant mode follows
    const auto [gr, mu] = reduced(fv);
    const VecX& a = fv.g_vol;
    VecX dir = -gr.cwiseQuotient(precond);
    dir[0] = -a.tail(J - 1).dot(dir.tail(J - 1)) / a[0];
    Vec dp = move_center ? Vec(-p.gamma * fv.c_nl / hc) : Vec::Zero();
    const double slope = gr.dot(dir) + p.gamma * fv.c_nl.dot(dp);
    if (!(slope < 0.0)) {
      out.status = "stationary";
      break;
    }
    // with the volume restored each trial, compare the Lagrangian; its
    // first-order insensitivity to the volume error keeps the floor low
    const bool restore = opt.rescale_every > 0 && (it + 1) % opt.rescale_every == 0;
    auto merit = [&](const FunctionalValue& v) {
      const double err = v.d_vol + (v.vol_base - V0);
      return v.d_per + p.gamma * v.d_nl + (restore ? -mu * err : lam * std::abs(err));
    };
    const double G = merit(fv);
    // keep each trial a modest deformation
    const double dmax = std::max(dir.cwiseAbs().maxCoeff() * std::sqrt(double(J)), dp.norm());
    alpha = std::min({1.0, 2.0 * alpha, 0.2 * r / std::max(dmax, 1e-300)});
    const double noise = 64.0 * std::numeric_limits<double>::epsilon() *
                         (std::abs(fv.d_per) + p.gamma * std::abs(fv.d_nl) + std::abs(mu * fv.d_vol) + 1e-300);
    bool accepted = false;
    for (int b = 0; b < opt.max_backtracks; ++b, alpha *= opt.backtrack) {
      DropletShape t = s;
      t.coeffs += alpha * dir;
      t.center += alpha * dp;
      if (restore) fix_volume(t);
      FunctionalValue tv;
      try {
        tv = fn.evaluate(t, true);
      } catch (const Error& e) {
        if (e.kind() == ErrorKind::InvalidShape || e.kind() == ErrorKind::Containment) continue;
        throw;
      }
      const double Gt = merit(tv);
      const bool armijo = Gt <= G + opt.armijo * alpha * slope;
      // below the rounding floor of F, descend on the stationarity measure
      const bool flat = -alpha * slope < noise && Gt <= G + noise && measure(tv) < -slope;
      if (armijo || flat) {
        s = t;
        fv = std::move(tv);
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      out.status = "line_search_failed";
      break;
    }
    out.history.push_back(base_of(fv) + objective(fv));
    out.centers.push_back(s.center);
  }
  if (!out.converged) out.el = residual_from(fn, p, s, fv);
  out.iterations = it;
  if (d.is_torus() && opt.recenter) {
    Vec b = barycenter(s, fn.grid());
    for (int k = 0; k < n; ++k) s.center[k] -= b[k];
  }
  out.shape = s;
  EnergyBreakdown e;
  e.perimeter = fv.perimeter();
  e.nonlocal = fv.nonlocal();
  e.volume = fv.volume();
  e.total = e.perimeter + p.gamma * e.nonlocal;
  e.penalty_term = lam * std::abs(e.volume - V0);
  e.regime_value = p.regime_value(n);
  e.small_regime = p.in_regime(n);
  out.energy = e;
  double kmin = std::numeric_limits<double>::infinity();
  for (const Vec& x : fn.grid().nodes)
    for (double k : principal_curvatures(s, x)) kmin = std::min(kmin, k);
  out.min_principal_curvature = kmin;
  out.convex = kmin >= 0.0;
  return out;
}

MultiplierCheck multiplier_bound_check(const Domain& d, const ModelParams& p, const DropletShape& s,
                                       const EnergyResolution& res) {
  MultiplierCheck c;
  c.lambda = el_residual(d, p, s, res).multiplier;
  c.theta = multiplier_theta(d, p);
  c.penalty = effective_penalty(d, p);
  c.violation = std::abs(c.lambda) > c.penalty;
  return c;
}

}  // namespace okd
