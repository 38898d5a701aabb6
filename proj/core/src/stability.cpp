#include "okdroplet/stability.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

namespace okd {

namespace {

// x-gradient of R(x, p), fourth-order central differences
Vec grad_R(const GreenEvaluator& g, const Vec& x, const Vec& p, int n, double h) {
  Vec out = Vec::Zero();
  for (int k = 0; k < n; ++k) {
    Vec e = Vec::Zero();
    e[k] = h;
    out[k] = (8.0 * (g.R(x + e, p) - g.R(x - e, p)) - (g.R(x + 2.0 * e, p) - g.R(x - 2.0 * e, p))) / (12.0 * h);
  }
  return out;
}

VecX sym_eigenvalues(const MatX& A) {
  if (A.rows() == 0) return VecX();
  return Eigen::SelfAdjointEigenSolver<MatX>(A, Eigen::EigenvaluesOnly).eigenvalues();
}

std::vector<int> modes_of_degree(int n, int J, int lmin, int lmax) {
  std::vector<int> idx;
  for (int j = 0; j < J; ++j) {
    const int l = basis_degree(n, j);
    if (l >= lmin && l <= lmax) idx.push_back(j);
  }
  return idx;
}

MatX submatrix(const MatX& A, const std::vector<int>& idx) {
  MatX S(idx.size(), idx.size());
  for (size_t a = 0; a < idx.size(); ++a)
    for (size_t b = 0; b < idx.size(); ++b) S(a, b) = A(idx[a], idx[b]);
  return S;
}

void fill_spectrum(StabilitySpectrum& s, const StabilityResolution& res) {
  const int n = s.dim, J = int(s.form.rows());
  s.symmetry_error = (s.form - s.form.transpose()).cwiseAbs().maxCoeff();
  const MatX Q = 0.5 * (s.form + s.form.transpose());

  // zero-average constraint: orthogonal to the constant mode's coefficient vector
  const VecX w0 = VecX::Unit(J, 0);
  const MatX P = MatX::Identity(J, J) - w0 * w0.transpose() / w0.squaredNorm();
  s.projector_error = (P * P - P).cwiseAbs().maxCoeff();
  Eigen::HouseholderQR<MatX> qr(w0);
  const MatX Z = MatX(qr.householderQ()).rightCols(J - 1);
  Eigen::SelfAdjointEigenSolver<MatX> es(Z.transpose() * Q * Z);
  s.eigenvalues = es.eigenvalues();
  s.eigenvectors = Z * es.eigenvectors();
  s.min_eigenvalue = s.eigenvalues.size() ? s.eigenvalues[0] : 0.0;

  s.multiplets.clear();
  for (int i = 0; i < s.eigenvalues.size(); ++i) {
    const double v = s.eigenvalues[i];
    if (!s.multiplets.empty()) {
      Multiplet& last = s.multiplets.back();
      if (std::abs(v - last.value) <= res.group_tol * std::max(1.0, std::abs(last.value))) {
        last.value = (last.value * last.multiplicity + v) / (last.multiplicity + 1);
        ++last.multiplicity;
        continue;
      }
    }
    s.multiplets.push_back({v, 1});
  }

  const std::vector<int> deform = modes_of_degree(n, J, 2, s.basis_degree);
  const VecX ed = sym_eigenvalues(submatrix(Q, deform));
  s.min_nontrivial = ed.size() ? ed[0] : 0.0;
  const std::vector<int> trans = modes_of_degree(n, J, 1, 1);
  const MatX T = submatrix(Q, trans);
  s.translation_block.setZero();
  s.translation_block.topLeftCorner(T.rows(), T.cols()) = T;
  s.translation_values = sym_eigenvalues(T);
}

}  // namespace

double sphere_single_layer(int dim, int l, double r) {
  if (dim == 3) return r / (2.0 * l + 1.0);
  return l == 0 ? -r * std::log(r) : r / (2.0 * l);
}

std::vector<double> perimeter_hessian_diag(double r, int dim, int L) {
  check_dim(dim);
  if (L < 1) fail(ErrorKind::Config, "perimeter_hessian_diag needs L >= 1");
  if (!(r > 0.0)) fail(ErrorKind::Config, "radius must be positive");
  std::vector<double> out;
  for (int i = 0; i <= L; ++i) out.push_back((i * (i + dim - 2.0) - (dim - 1.0)) / (r * r));
  return out;
}

StabilitySpectrum second_variation_matrix(const Domain& d, const ModelParams& p, double r, const Vec& center, int L,
                                          const StabilityResolution& res) {
  const int n = d.dim;
  if (L < 1) fail(ErrorKind::Config, "basis degree must be at least 1");
  if (!(r > 0.0)) fail(ErrorKind::Config, "radius must be positive");
  if (p.gamma < 0.0) fail(ErrorKind::Config, "gamma must be nonnegative");
  if (!inner_region_test(d, center, r)) fail(ErrorKind::Containment, "ball B_r(center) not strictly inside the domain");
  if (d.is_torus() && 2.0 * r > 0.3) fail(ErrorKind::Containment, "ball too large for the torus regular-part expansion");

  const QuadratureGrid grid = sphere_quadrature(n, res.order > 0 ? res.order : 2 * L + 8);
  const auto tab = basis_table(grid, L);
  const int N = grid.size(), J = tab->size();
  const MatX& Y = tab->Y;
  const VecX w = Eigen::Map<const VecX>(grid.weights.data(), N);

  StabilitySpectrum s;
  s.dim = n;
  s.basis_degree = L;
  s.r = r;
  s.gamma = p.gamma;
  s.center = center;
  const double vol = omega(n) * std::pow(r, n);
  s.mass = vol / d.volume;

  // Per'': tangential Dirichlet form minus |A|^2 = (n-1)/r^2, by quadrature
  MatX WD1 = tab->D1, WD2 = tab->D2, WY = Y;
  for (int i = 0; i < N; ++i) {
    WD1.row(i) *= w[i];
    WD2.row(i) *= w[i];
    WY.row(i) *= w[i];
  }
  MatX grad = tab->D1.transpose() * WD1;
  if (n == 3) grad += tab->D2.transpose() * WD2;
  s.perimeter = (grad - (n - 1.0) * Y.transpose() * WY) / (r * r);

  // int int G f f: closed-form single layer of -Gamma plus the smooth R part
  const GreenEvaluator green(d);
  std::vector<Vec> x(N);
  for (int i = 0; i < N; ++i) x[i] = center + r * grid.nodes[i];
  MatX Rm(N, N);
  parallel_for(N, res.threads, [&](int i) {
    for (int k = i; k < N; ++k) Rm(i, k) = green.R(x[i], x[k]);
  });
  for (int i = 0; i < N; ++i)
    for (int k = 0; k < i; ++k) Rm(i, k) = Rm(k, i);
  s.nonlocal = std::pow(r, n - 1) * WY.transpose() * Rm * WY;
  for (int j = 0; j < J; ++j) s.nonlocal(j, j) += sphere_single_layer(n, basis_degree(n, j), r);

  // normal derivative of v = int_B G(., y) dy on dB. R(x, .) + |x - .|^2 / (2n|Omega|)
  // is harmonic, so int_B R(x, y) dy = |B| R(x, p) + const by the mean value property.
  const double h = res.fd_step > 0.0 ? res.fd_step : 1e-3 * (d.is_torus() ? 1.0 : d.radius);
  VecX dv(N);
  parallel_for(N, res.threads, [&](int i) {
    dv[i] = -r / n + vol * grid.nodes[i].dot(grad_R(green, x[i], center, n, h));
  });
  MatX Wdv = Y;
  for (int i = 0; i < N; ++i) Wdv.row(i) *= w[i] * dv[i];
  const MatX third = Y.transpose() * Wdv;
  s.normal_derivative = third.diagonal();

  const MatX nl2 = 2.0 * s.nonlocal;
  s.nonlocal_min_eig = sym_eigenvalues(0.5 * (nl2 + nl2.transpose()).bottomRightCorner(J - 1, J - 1))[0];
  s.form = s.perimeter + p.gamma * (nl2 + 2.0 * third);
  fill_spectrum(s, res);
  return s;
}

StabilityCheck strict_stability_check(const Domain& d, const ModelParams& p, int L, double margin,
                                      const StabilityResolution& res) {
  if (d.is_torus()) fail(ErrorKind::Config, "strict stability check is for the ball domain");
  p.validate(d);
  StabilityCheck c;
  c.spectrum = second_variation_matrix(d, p, p.r_m, Vec::Zero(), L, res);
  c.margin = margin > 0.0 ? margin : 1e-8 / (p.r_m * p.r_m);
  c.c0 = c.spectrum.min_eigenvalue;
  c.stable = c.c0 >= c.margin;
  return c;
}

StabilityThreshold instability_threshold(const Domain& d, double r, int L, double gamma_lo, double gamma_hi,
                                         double rel_tol, const StabilityResolution& res) {
  if (!(gamma_lo >= 0.0 && gamma_hi > gamma_lo)) fail(ErrorKind::Config, "need 0 <= gamma_lo < gamma_hi");
  // the form is affine in gamma: assemble the two pieces once
  ModelParams p1 = ModelParams::with_radius(d, 1.0, r);
  const StabilitySpectrum s1 = second_variation_matrix(d, p1, r, Vec::Zero(), L, res);
  const MatX A = s1.perimeter, B = s1.form - s1.perimeter;
  const std::vector<int> deform = modes_of_degree(d.dim, int(A.rows()), 2, L);
  auto lowest = [&](double g) {
    const MatX Q = A + g * B;
    return sym_eigenvalues(submatrix(0.5 * (Q + Q.transpose()), deform))[0];
  };
  StabilityThreshold t;
  double lo = gamma_lo, hi = gamma_hi;
  if (!(lowest(lo) > 0.0)) fail(ErrorKind::Config, "lower gamma is not stable");
  if (!(lowest(hi) < 0.0)) fail(ErrorKind::Config, "upper gamma is not unstable");
  while (hi - lo > rel_tol * hi && t.iterations < 200) {
    const double mid = 0.5 * (lo + hi);
    (lowest(mid) > 0.0 ? lo : hi) = mid;
    ++t.iterations;
  }
  t.gamma_stable = lo;
  t.gamma_unstable = hi;
  return t;
}

}  // namespace okd
