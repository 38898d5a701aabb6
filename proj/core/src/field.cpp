#include "okdroplet/field.hpp"

#include <fftw3.h>
#include <json.hpp>

#include <complex>
#include <fstream>
#include <mutex>

namespace okd {

double radial_convolution(double x, double r, int dim) {
  check_dim(dim);
  if (!(r > 0.0) || x < 0.0) fail(ErrorKind::Domain, "radial_convolution needs r > 0 and |x| >= 0");
  if (dim == 3) return x < r ? x * x / 6.0 - r * r / 2.0 : -r * r * r / (3.0 * x);
  return x < r ? x * x / 4.0 + 0.5 * r * r * (std::log(r) - 0.5) : 0.5 * r * r * std::log(x);
}

FieldResolution FieldResolution::defaults(int dim) {
  FieldResolution r;
  r.torus_n = dim == 2 ? 256 : 96;
  r.ball_nr = dim == 2 ? 2048 : 512;
  r.ball_degree = dim == 2 ? 64 : 16;
  return r;
}

FieldResolution FieldResolution::resolved(int dim) const {
  FieldResolution d = defaults(dim), r = *this;
  if (r.torus_n <= 0) r.torus_n = d.torus_n;
  if (r.ball_nr <= 0) r.ball_nr = d.ball_nr;
  if (r.ball_degree <= 0) r.ball_degree = d.ball_degree;
  if (r.torus_n < 8 || r.ball_nr < 8) fail(ErrorKind::Resolution, "field resolution too small");
  return r;
}

namespace {

std::mutex fftw_mu;

long grid_size(int dim, int N) { return dim == 2 ? long(N) * N : long(N) * N * N; }

Vec grid_node(int dim, int N, long idx) {
  Vec x = Vec::Zero();
  x[0] = double(idx % N) / N;
  x[1] = double((idx / N) % N) / N;
  if (dim == 3) x[2] = double(idx / (long(N) * N)) / N;
  return x;
}

double cell_volume(int n, double a, double b) { return (std::pow(b, n) - std::pow(a, n)) / n; }

// Forward real FFT of a torus grid, normalized by the number of nodes.
// Output is the half spectrum in FFTW layout (last index = x, halved).
std::vector<std::complex<double>> forward(int dim, int N, const std::vector<double>& v) {
  const int nh = N / 2 + 1;
  const long M = dim == 2 ? long(N) * nh : long(N) * N * nh;
  std::vector<double> in(v);
  std::vector<std::complex<double>> out(M);
  fftw_plan p;
  {
    std::lock_guard<std::mutex> lk(fftw_mu);
    auto* o = reinterpret_cast<fftw_complex*>(out.data());
    p = dim == 2 ? fftw_plan_dft_r2c_2d(N, N, in.data(), o, FFTW_ESTIMATE)
                 : fftw_plan_dft_r2c_3d(N, N, N, in.data(), o, FFTW_ESTIMATE);
  }
  fftw_execute(p);
  {
    std::lock_guard<std::mutex> lk(fftw_mu);
    fftw_destroy_plan(p);
  }
  const double s = 1.0 / grid_size(dim, N);
  for (auto& c : out) c *= s;
  return out;
}

std::vector<double> backward(int dim, int N, std::vector<std::complex<double>> spec) {
  std::vector<double> out(grid_size(dim, N));
  fftw_plan p;
  {
    std::lock_guard<std::mutex> lk(fftw_mu);
    auto* i = reinterpret_cast<fftw_complex*>(spec.data());
    p = dim == 2 ? fftw_plan_dft_c2r_2d(N, N, i, out.data(), FFTW_ESTIMATE)
                 : fftw_plan_dft_c2r_3d(N, N, N, i, out.data(), FFTW_ESTIMATE);
  }
  fftw_execute(p);
  {
    std::lock_guard<std::mutex> lk(fftw_mu);
    fftw_destroy_plan(p);
  }
  return out;
}

// Visit every half-spectrum entry with its wave vector and Hermitian multiplicity.
template <class F>
void for_each_mode(int dim, int N, F&& f) {
  const int nh = N / 2 + 1;
  auto wrap = [N](int i) { return i <= N / 2 ? i : i - N; };
  const int nz = dim == 3 ? N : 1;
  long idx = 0;
  for (int iz = 0; iz < nz; ++iz)
    for (int iy = 0; iy < N; ++iy)
      for (int ix = 0; ix < nh; ++ix, ++idx) {
        int kx = ix, ky = wrap(iy), kz = dim == 3 ? wrap(iz) : 0;
        double mult = (ix == 0 || (N % 2 == 0 && ix == N / 2)) ? 1.0 : 2.0;
        f(idx, kx, ky, kz, mult);
      }
}

double sinc(double x) { return x == 0.0 ? 1.0 : std::sin(x) / x; }

struct ShapeBounds {
  double rmin, rmax, lip;
};

ShapeBounds shape_bounds(const DropletShape& s) {
  QuadratureGrid g = sphere_quadrature(s.dim, std::max(8, 2 * s.degree + 4));
  ShapeSample ss = sample_shape(s, g);
  double gmax = 0.0;
  for (const Vec& v : ss.grad) gmax = std::max(gmax, v.norm());
  ShapeBounds b;
  double slack = 0.05 * s.base_radius + 0.5 * (radial_bound(s) - s.base_radius);
  b.rmin = std::max(0.0, ss.rho.minCoeff() - slack);
  b.rmax = ss.rho.maxCoeff() + slack;
  b.lip = 1.0 + 2.0 * gmax / std::max(b.rmin, 1e-3 * s.base_radius);
  return b;
}

// Fraction of the square/cube of side hc centered at c lying in the shape.
double cell_fraction(const DropletShape& s, const Domain& d, const ShapeBounds& b, const Vec& c, double hc,
                     int depth) {
  const int n = s.dim;
  Vec q = periodic_delta(d, c, s.center);
  double dist = q.norm();
  double half_diag = 0.5 * hc * std::sqrt(double(n));
  if (dist - half_diag > b.rmax) return 0.0;
  if (dist + half_diag < b.rmin) return 1.0;
  double F = dist - s.rho(q / std::max(dist, 1e-300));
  if (std::abs(F) > 1.01 * b.lip * half_diag) return F < 0.0 ? 1.0 : 0.0;
  if (depth == 0) return std::clamp(0.5 - F / hc, 0.0, 1.0);
  double tot = 0.0;
  const int nch = n == 2 ? 4 : 8;
  for (int k = 0; k < nch; ++k) {
    Vec off(((k & 1) ? 0.25 : -0.25) * hc, ((k & 2) ? 0.25 : -0.25) * hc, n == 3 ? ((k & 4) ? 0.25 : -0.25) * hc : 0.0);
    tot += cell_fraction(s, d, b, c + off, 0.5 * hc, depth - 1);
  }
  return tot / nch;
}

}  // namespace

ScalarField torus_field(const Domain& d, int N, const std::function<double(const Vec&)>& f) {
  if (!d.is_torus()) fail(ErrorKind::Domain, "torus_field needs a torus domain");
  ScalarField out;
  out.domain = d;
  out.grid_n = N;
  out.h = 1.0 / N;
  const long M = grid_size(d.dim, N);
  out.values.resize(M);
  double m = 0.0;
  for (long i = 0; i < M; ++i) m += out.values[i] = f(grid_node(d.dim, N, i));
  out.mean = m / M;
  return out;
}

ScalarField ball_field(const Domain& d, int nr, int degree, const std::function<double(const Vec&)>& f) {
  if (d.is_torus()) fail(ErrorKind::Domain, "ball_field needs a ball domain");
  const int n = d.dim;
  ScalarField out;
  out.domain = d;
  out.degree = degree;
  out.h = d.radius / nr;
  QuadratureGrid g = sphere_quadrature(n, std::max(4, degree + 2));
  auto tab = basis_table(g, degree);
  out.coeffs = MatX::Zero(nr, tab->size());
  VecX vals(g.size());
  double tot = 0.0;
  for (int i = 0; i < nr; ++i) {
    double s = (i + 0.5) * out.h;
    for (int k = 0; k < g.size(); ++k) vals[k] = g.weights[k] * f(s * g.nodes[k]);
    out.coeffs.row(i) = (tab->Y.transpose() * vals).transpose();
    tot += cell_volume(n, i * out.h, (i + 1) * out.h) * out.coeffs(i, 0) * std::sqrt(n * omega(n));
  }
  out.mean = tot / d.volume;
  return out;
}

ScalarField indicator_source(const Domain& d, const DropletShape& s, const FieldResolution& res0) {
  const int n = d.dim;
  if (s.dim != n) fail(ErrorKind::Config, "shape and domain dimensions differ");
  FieldResolution res = res0.resolved(n);
  if (d.is_torus()) {
    ShapeBounds b = shape_bounds(s);
    if (2.0 * b.rmax >= 1.0) fail(ErrorKind::Containment, "shape does not fit in the torus cell");
    const int N = res.torus_n;
    const int depth = n == 2 ? 5 : 4;
    ScalarField out = torus_field(d, N, [&](const Vec& x) { return cell_fraction(s, d, b, x, 1.0 / N, depth); });
    for (double& v : out.values) v -= out.mean;
    out.mean = 0.0;
    return out;
  }
  const double a = d.radius;
  const int nr = res.ball_nr, L = res.ball_degree;
  const double h = a / nr;
  QuadratureGrid g = sphere_quadrature(n, std::max(8, 2 * L));
  auto tab = basis_table(g, L);
  const int nd = g.size();
  std::vector<std::vector<std::pair<double, double>>> iv(nd);
  for (int k = 0; k < nd; ++k) {
    iv[k] = ray_inside_intervals(s, Vec::Zero(), g.nodes[k], a, 96);
    if (!iv[k].empty() && iv[k].back().second >= a * (1 - 1e-12))
      fail(ErrorKind::Containment, "shape touches the ball boundary");
  }
  auto W = [n](double t) { return std::pow(t, n) / n; };
  MatX cells = MatX::Zero(nr, nd);
  double vol = 0.0;
  for (int k = 0; k < nd; ++k)
    for (auto [lo, hi] : iv[k]) {
      vol += g.weights[k] * (W(hi) - W(lo));
      for (int i = int(lo / h); i <= std::min(nr - 1, int(hi / h)); ++i) {
        double c0 = std::max(lo, i * h), c1 = std::min(hi, (i + 1) * h);
        if (c1 > c0) cells(i, k) += W(c1) - W(c0);
      }
    }
  MatX wy = g.weights.size() ? MatX(Eigen::Map<const VecX>(g.weights.data(), nd).asDiagonal() * tab->Y) : MatX();
  ScalarField out;
  out.domain = d;
  out.degree = L;
  out.h = h;
  out.coeffs = cells * wy;
  const double m = vol / d.volume;
  const double sphere = n * omega(n);
  for (int i = 0; i < nr; ++i) {
    out.coeffs.row(i) /= cell_volume(n, i * h, (i + 1) * h);
    out.coeffs(i, 0) -= m * std::sqrt(sphere);
  }
  out.mean = 0.0;
  auto ivs = std::make_shared<std::vector<std::vector<std::pair<double, double>>>>(std::move(iv));
  auto wts = std::make_shared<std::vector<double>>(g.weights);
  out.enclosed = [ivs, wts, m, n, W](double sr) {
    double e = 0.0;
    for (size_t k = 0; k < ivs->size(); ++k)
      for (auto [lo, hi] : (*ivs)[k])
        if (lo < sr) e += (*wts)[k] * (W(std::min(hi, sr)) - W(lo));
    return e - m * omega(n) * std::pow(sr, n);
  };
  return out;
}

ScalarField solve_poisson(const ScalarField& src) {
  const Domain& d = src.domain;
  const int n = d.dim;
  if (d.is_torus()) {
    const int N = src.grid_n;
    double m = 0.0, mx = 0.0;
    for (double v : src.values) {
      m += v;
      mx = std::max(mx, std::abs(v));
    }
    m /= double(src.values.size());
    if (std::abs(m) > 1e-8 * std::max(1.0, mx)) fail(ErrorKind::Compatibility, "periodic source has nonzero mean");
    auto spec = forward(n, N, src.values);
    for_each_mode(n, N, [&](long idx, int kx, int ky, int kz, double) {
      double k2 = double(kx) * kx + double(ky) * ky + double(kz) * kz;
      spec[idx] = k2 == 0.0 ? 0.0 : spec[idx] / (4.0 * pi * pi * k2);
    });
    ScalarField out = src;
    out.values = backward(n, N, spec);
    out.mean = 0.0;
    return out;
  }
  const int nr = src.nr(), J = int(src.coeffs.cols());
  const double h = src.h;
  const double sphere = n * omega(n);
  std::vector<double> V(nr), face(nr + 1), sc(nr);
  for (int i = 0; i <= nr; ++i) face[i] = std::pow(i * h, n - 1);
  for (int i = 0; i < nr; ++i) {
    V[i] = cell_volume(n, i * h, (i + 1) * h);
    sc[i] = (i + 0.5) * h;
  }
  double total = 0.0, scale = 0.0;
  for (int i = 0; i < nr; ++i) {
    total += V[i] * src.coeffs(i, 0);
    scale += V[i] * std::abs(src.coeffs(i, 0));
  }
  if (std::abs(total) > 1e-8 * std::max(scale, 1e-300) && std::abs(total) > 1e-14)
    fail(ErrorKind::Compatibility, "Neumann source has nonzero mean");
  ScalarField out = src;
  out.coeffs.setZero();
  // l = 0: cumulative flux through each face
  {
    double flux = 0.0, u = 0.0, mean = 0.0;
    std::vector<double> col(nr);
    for (int i = 0; i < nr; ++i) {
      col[i] = u;
      flux -= V[i] * src.coeffs(i, 0);
      if (i + 1 < nr) u += h * flux / face[i + 1];
    }
    for (int i = 0; i < nr; ++i) mean += V[i] * col[i];
    mean /= cell_volume(n, 0.0, nr * h);
    for (int i = 0; i < nr; ++i) out.coeffs(i, 0) = col[i] - mean;
  }
  std::vector<double> lo(nr), di(nr), up(nr), rhs(nr);
  for (int j = 1; j < J; ++j) {
    const double lam = lb_eigenvalue(n, j);
    for (int i = 0; i < nr; ++i) {
      double fl = face[i] / h, fr = (i + 1 < nr) ? face[i + 1] / h : 0.0;
      lo[i] = -fl;
      up[i] = -fr;
      di[i] = fl + fr + lam * V[i] / (sc[i] * sc[i]);
      rhs[i] = V[i] * src.coeffs(i, j);
    }
    // Thomas sweep
    for (int i = 1; i < nr; ++i) {
      double w = lo[i] / di[i - 1];
      di[i] -= w * up[i - 1];
      rhs[i] -= w * rhs[i - 1];
    }
    out.coeffs(nr - 1, j) = rhs[nr - 1] / di[nr - 1];
    for (int i = nr - 2; i >= 0; --i) out.coeffs(i, j) = (rhs[i] - up[i] * out.coeffs(i + 1, j)) / di[i];
  }
  (void)sphere;
  out.mean = 0.0;
  out.enclosed = src.enclosed;
  return out;
}

double ScalarField::value_at(const Vec& x) const {
  const int n = domain.dim;
  if (domain.is_torus()) {
    const int N = grid_n;
    double f[3];
    int i0[3];
    for (int a = 0; a < 3; ++a) {
      if (a >= n) {
        i0[a] = 0;
        f[a] = 0.0;
        continue;
      }
      double u = x[a] * N;
      double fl = std::floor(u);
      f[a] = u - fl;
      i0[a] = int(((long(fl) % N) + N) % N);
    }
    double s = 0.0;
    const int nc = n == 2 ? 4 : 8;
    for (int c = 0; c < nc; ++c) {
      long idx = 0, stride = 1;
      double w = 1.0;
      for (int a = 0; a < n; ++a) {
        int b = (c >> a) & 1;
        idx += stride * ((i0[a] + b) % N);
        stride *= N;
        w *= b ? f[a] : 1.0 - f[a];
      }
      s += w * values[idx];
    }
    return s;
  }
  double r = x.norm();
  if (r > domain.radius) fail(ErrorKind::Domain, "point outside the ball domain");
  double u = r / h - 0.5;
  int i = std::clamp(int(std::floor(u)), 0, nr() - 2);
  double t = std::clamp(u - i, 0.0, 1.0);
  VecX row = (1 - t) * coeffs.row(i).transpose() + t * coeffs.row(i + 1).transpose();
  BasisPoint bp;
  eval_basis(n, degree, r > 0 ? Vec(x / r) : Vec::UnitX(), bp);
  return bp.val.dot(row);
}

double ScalarField::mean_radial_derivative(double s) const {
  if (domain.is_torus() || !enclosed) fail(ErrorKind::Domain, "radial flux needs a ball field with its source mass");
  const int n = domain.dim;
  return -enclosed(s) / (n * omega(n) * std::pow(s, n - 1));
}

double nl_energy(const Domain& d, const DropletShape& s, const FieldResolution& res) {
  ScalarField f = indicator_source(d, s, res);
  const int n = d.dim;
  if (d.is_torus()) {
    const int N = f.grid_n;
    auto spec = forward(n, N, f.values);
    double nl = 0.0;
    for_each_mode(n, N, [&](long idx, int kx, int ky, int kz, double mult) {
      double k2 = double(kx) * kx + double(ky) * ky + double(kz) * kz;
      if (k2 == 0.0) return;
      // undo the cell averaging of the indicator
      double sm = sinc(pi * kx / N) * sinc(pi * ky / N) * sinc(pi * kz / N);
      nl += mult * std::norm(spec[idx]) / (sm * sm * 4.0 * pi * pi * k2);
    });
    return nl;
  }
  ScalarField u = solve_poisson(f);
  // radial mode from the exact flux: int |grad u_0|^2 = int enclosed(s)^2 / (|S| s^{n-1}) ds
  const double sphere = n * omega(n);
  std::vector<double> gx, gw;
  gauss_legendre(4, gx, gw);
  double nl = 0.0;
  for (int i = 0; i < f.nr(); ++i) {
    for (int q = 0; q < 4; ++q) {
      double s = (i + 0.5 + 0.5 * gx[q]) * f.h;
      double e = f.enclosed(s);
      nl += 0.5 * f.h * gw[q] * e * e / (sphere * std::pow(s, n - 1));
    }
    const int J = int(f.coeffs.cols());
    if (J > 1)
      nl += cell_volume(n, i * f.h, (i + 1) * f.h) * u.coeffs.row(i).tail(J - 1).dot(f.coeffs.row(i).tail(J - 1));
  }
  return nl;
}

double gamma_potential(const DropletShape& s, const Vec& x, const QuadratureGrid& grid) {
  const int n = s.dim;
  const double r = s.base_radius;
  Vec q = x - s.center;
  double v = radial_convolution(q.norm(), r, n);
  ShapeSample ss = sample_shape(s, grid);
  std::vector<double> gx, gw;
  gauss_legendre(16, gx, gw);
  for (int k = 0; k < grid.size(); ++k) {
    double rho = ss.rho[k];
    double mid = 0.5 * (rho + r), half = 0.5 * (rho - r);
    double acc = 0.0;
    for (int i = 0; i < 16; ++i) {
      double t = mid + half * gx[i];
      double dd = (q - t * grid.nodes[k]).norm();
      if (dd > 0.0) acc += gw[i] * (n == 2 ? std::log(dd) / (2 * pi) : -1.0 / (4 * pi * dd)) * std::pow(t, n - 1);
    }
    v += grid.weights[k] * half * acc;
  }
  return v;
}

void export_field(const ScalarField& f, const std::string& prefix) {
  nlohmann::json h;
  h["schema_version"] = 1;
  h["domain"] = {{"kind", to_string(f.domain.kind)}, {"dim", f.domain.dim}, {"radius", f.domain.radius}};
  h["dtype"] = "float64";
  h["byte_order"] = "little";
  h["mean"] = f.mean;
  std::ofstream bin(prefix + ".bin", std::ios::binary);
  if (!bin) fail(ErrorKind::Config, "cannot open " + prefix + ".bin");
  if (f.is_torus()) {
    h["layout"] = "grid";
    h["shape"] = std::vector<int>(f.domain.dim, f.grid_n);
    h["spacing"] = f.h;
    h["index_order"] = "x fastest";
    bin.write(reinterpret_cast<const char*>(f.values.data()), std::streamsize(f.values.size() * sizeof(double)));
  } else {
    h["layout"] = "radial_harmonic";
    h["shape"] = {f.nr(), int(f.coeffs.cols())};
    h["radial_spacing"] = f.h;
    h["radial_nodes"] = "cell centers (i+1/2)h";
    h["degree"] = f.degree;
    h["index_order"] = "harmonic fastest";
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rm = f.coeffs;
    bin.write(reinterpret_cast<const char*>(rm.data()), std::streamsize(rm.size() * sizeof(double)));
  }
  std::ofstream js(prefix + ".json");
  if (!js) fail(ErrorKind::Config, "cannot open " + prefix + ".json");
  js << h.dump(2) << "\n";
}

}  // namespace okd
