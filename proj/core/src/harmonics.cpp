#include "okdroplet/harmonics.hpp"

#include <complex>

namespace okd {

int basis_size(int dim, int L) { return dim == 2 ? 2 * L + 1 : (L + 1) * (L + 1); }

int basis_degree(int dim, int j) {
  if (dim == 2) return (j + 1) / 2;
  int l = int(std::sqrt(double(j)));
  while (l * l > j) --l;
  while ((l + 1) * (l + 1) <= j) ++l;
  return l;
}

static inline int lm_index(int l, int m) { return l * (l + 1) / 2 + m; }

void legendre_normalized(int L, double x, double s, std::vector<double>& P) {
  P.assign((L + 1) * (L + 2) / 2, 0.0);
  double pmm = 1.0 / std::sqrt(4.0 * pi);
  for (int m = 0; m <= L; ++m) {
    if (m > 0) pmm *= std::sqrt((2.0 * m + 1.0) / (2.0 * m)) * s;
    P[lm_index(m, m)] = pmm;
    if (m + 1 <= L) P[lm_index(m + 1, m)] = std::sqrt(2.0 * m + 3.0) * x * pmm;
    for (int l = m + 2; l <= L; ++l) {
      double a = std::sqrt((4.0 * l * l - 1.0) / (double(l) * l - double(m) * m));
      double b = std::sqrt((double(l - 1) * (l - 1) - double(m) * m) / (4.0 * (l - 1) * (l - 1) - 1.0));
      P[lm_index(l, m)] = a * (x * P[lm_index(l - 1, m)] - b * P[lm_index(l - 2, m)]);
    }
  }
}

static void eval_basis_2d(int L, const Vec& dir, BasisPoint& out, bool hessian) {
  const int J = 2 * L + 1;
  double t = std::atan2(dir.y(), dir.x());
  out.val.resize(J);
  out.d1.resize(J);
  out.d2.resize(0);
  out.e1 = Vec(-std::sin(t), std::cos(t), 0.0);
  out.e2.setZero();
  if (hessian) out.h11.resize(J);
  const double c0 = 1.0 / std::sqrt(2.0 * pi), c1 = 1.0 / std::sqrt(pi);
  out.val[0] = c0;
  out.d1[0] = 0.0;
  if (hessian) out.h11[0] = 0.0;
  const double c1t = std::cos(t), s1t = std::sin(t);
  double c = 1.0, s = 0.0;
  for (int l = 1; l <= L; ++l) {
    if (l % 16 == 1) {
      c = std::cos(l * t);
      s = std::sin(l * t);
    } else {
      double cn = c * c1t - s * s1t;
      s = s * c1t + c * s1t;
      c = cn;
    }
    out.val[2 * l - 1] = c1 * c;
    out.val[2 * l] = c1 * s;
    out.d1[2 * l - 1] = -c1 * l * s;
    out.d1[2 * l] = c1 * l * c;
    if (hessian) {
      out.h11[2 * l - 1] = -c1 * l * l * c;
      out.h11[2 * l] = -c1 * l * l * s;
    }
  }
}

static void eval_basis_3d(int L, const Vec& dir, BasisPoint& out, bool hessian) {
  const int J = (L + 1) * (L + 1);
  double rr = dir.norm();
  double ct = std::clamp(dir.z() / rr, -1.0, 1.0);
  double th = std::acos(ct);
  const double eps = 1e-7;  // the frame is singular at the poles
  if (th < eps) th = eps;
  if (th > pi - eps) th = pi - eps;
  ct = std::cos(th);
  double st = std::sin(th);
  double ph = std::atan2(dir.y(), dir.x());
  double cp = std::cos(ph), sp = std::sin(ph);
  out.e1 = Vec(ct * cp, ct * sp, -st);
  out.e2 = Vec(-sp, cp, 0.0);
  out.val.resize(J);
  out.d1.resize(J);
  out.d2.resize(J);
  if (hessian) {
    out.h11.resize(J);
    out.h12.resize(J);
    out.h22.resize(J);
  }
  std::vector<double> P;
  legendre_normalized(L, ct, st, P);
  const double cot = ct / st;
  const double r2 = std::sqrt(2.0);
  for (int l = 0; l <= L; ++l) {
    for (int m = 0; m <= l; ++m) {
      double p = P[lm_index(l, m)];
      double pm1 = (l - 1 >= m) ? P[lm_index(l - 1, m)] : 0.0;
      double dp = (l * ct * p - std::sqrt((2.0 * l + 1.0) / (2.0 * l - 1.0) * double(l - m) * double(l + m)) * pm1) / st;
      if (l == 0) dp = 0.0;
      double ddp = -cot * dp - (l * (l + 1.0) - m * m / (st * st)) * p;
      if (m == 0) {
        int j = l * l + l;
        out.val[j] = p;
        out.d1[j] = dp;
        out.d2[j] = 0.0;
        if (hessian) {
          out.h11[j] = ddp;
          out.h12[j] = 0.0;
          out.h22[j] = cot * dp;
        }
        continue;
      }
      double cm = std::cos(m * ph), sm = std::sin(m * ph);
      int jc = l * l + l + m, js = l * l + l - m;
      // cosine member
      out.val[jc] = r2 * p * cm;
      out.d1[jc] = r2 * dp * cm;
      out.d2[jc] = -m * r2 * p * sm / st;
      // sine member
      out.val[js] = r2 * p * sm;
      out.d1[js] = r2 * dp * sm;
      out.d2[js] = m * r2 * p * cm / st;
      if (hessian) {
        out.h11[jc] = r2 * ddp * cm;
        out.h11[js] = r2 * ddp * sm;
        // (Y_tp - cot Y_p) / sin t
        out.h12[jc] = (-m * r2 * dp * sm + cot * m * r2 * p * sm) / st;
        out.h12[js] = (m * r2 * dp * cm - cot * m * r2 * p * cm) / st;
        // Y_pp / sin^2 + cot Y_t
        out.h22[jc] = -m * m * r2 * p * cm / (st * st) + cot * r2 * dp * cm;
        out.h22[js] = -m * m * r2 * p * sm / (st * st) + cot * r2 * dp * sm;
      }
    }
  }
}

void eval_basis(int dim, int L, const Vec& dir, BasisPoint& out, bool hessian) {
  check_dim(dim);
  if (dim == 2)
    eval_basis_2d(L, dir, out, hessian);
  else
    eval_basis_3d(L, dir, out, hessian);
}

void solid_harmonics(int dim, int L, const Vec& x, double* out) {
  if (dim == 2) {
    const double c0 = 1.0 / std::sqrt(2.0 * pi), c1 = 1.0 / std::sqrt(pi);
    out[0] = c0;
    std::complex<double> z(x.x(), x.y()), zl(1.0, 0.0);
    for (int l = 1; l <= L; ++l) {
      zl *= z;
      out[2 * l - 1] = c1 * zl.real();
      out[2 * l] = c1 * zl.imag();
    }
    return;
  }
  // Pi_lm = |x|^l Pbar_lm / (|x| sin t)^m is a polynomial in z and |x|^2
  const double z = x.z(), r2 = x.squaredNorm();
  const double sq2 = std::sqrt(2.0);
  std::complex<double> w(x.x(), x.y()), wm(1.0, 0.0);
  double cmm = 1.0 / std::sqrt(4.0 * pi);
  for (int m = 0; m <= L; ++m) {
    if (m > 0) {
      cmm *= std::sqrt((2.0 * m + 1.0) / (2.0 * m));
      wm *= w;
    }
    double pl2 = 0.0, pl1 = cmm;
    auto put = [&](int l, double pv) {
      if (m == 0) {
        out[l * l + l] = pv;
      } else {
        out[l * l + l + m] = sq2 * pv * wm.real();
        out[l * l + l - m] = sq2 * pv * wm.imag();
      }
    };
    put(m, pl1);
    if (m + 1 > L) continue;
    double pl = std::sqrt(2.0 * m + 3.0) * z * cmm;
    put(m + 1, pl);
    pl2 = pl1;
    pl1 = pl;
    for (int l = m + 2; l <= L; ++l) {
      double a = std::sqrt((4.0 * l * l - 1.0) / (double(l) * l - double(m) * m));
      double b = std::sqrt((double(l - 1) * (l - 1) - double(m) * m) / (4.0 * (l - 1) * (l - 1) - 1.0));
      pl = a * (z * pl1 - b * r2 * pl2);
      put(l, pl);
      pl2 = pl1;
      pl1 = pl;
    }
  }
}

}  // namespace okd
