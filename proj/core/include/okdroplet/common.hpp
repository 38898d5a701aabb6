#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <functional>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace okd {

// Points always carry three components; the last one is zero in 2D.
using Vec = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using VecX = Eigen::VectorXd;
using MatX = Eigen::MatrixXd;

constexpr double pi = std::numbers::pi;

enum class ErrorKind { Config, InvalidShape, Domain, Containment, Singularity, Resolution, Convergence, Compatibility, LineSearch };

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& msg) { throw Error(kind, msg); }

// volume of the unit ball in R^n
inline double omega(int n) {
  switch (n) {
    case 1: return 2.0;
    case 2: return pi;
    case 3: return 4.0 * pi / 3.0;
    default: return std::pow(pi, 0.5 * n) / std::tgamma(0.5 * n + 1.0);
  }
}

inline void check_dim(int n) {
  if (n != 2 && n != 3) fail(ErrorKind::Domain, "unsupported dimension " + std::to_string(n));
}

// Runs f(0..count-1) over up to `threads` workers (0 -> hardware concurrency).
void parallel_for(int count, int threads, const std::function<void(int)>& f);

// Gauss-Legendre nodes/weights on [-1, 1]
void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w);

// rho^q - r^q without cancellation, rho = r + phi
inline double pow_diff(double r, double phi, int q) {
  if (phi == 0.0) return 0.0;
  return std::pow(r, q) * std::expm1(q * std::log1p(phi / r));
}

}  // namespace okd
