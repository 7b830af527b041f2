#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <numbers>
#include <span>

namespace decifuse {

// Gaussian tail Q(x) = P(N(0,1) > x).
inline double qfunc(double x) { return 0.5 * std::erfc(x / std::numbers::sqrt2); }

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

inline double normal_pdf(double x) {
  return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
}

inline double log_normal_pdf(double x, double mean, double var) {
  const double d = x - mean;
  return -0.5 * std::log(2.0 * std::numbers::pi * var) - 0.5 * d * d / var;
}

// Circularly symmetric complex Gaussian, var = E|z - mean|^2.
inline double log_cn_pdf(std::complex<double> z, std::complex<double> mean, double var) {
  return -std::log(std::numbers::pi * var) - std::norm(z - mean) / var;
}

inline double log_sum_exp(double a, double b) {
  if (a == -std::numeric_limits<double>::infinity()) return b;
  if (b == -std::numeric_limits<double>::infinity()) return a;
  const double m = std::max(a, b);
  return m + std::log1p(std::exp(std::min(a, b) - m));
}

double log_sum_exp(std::span<const double> v);

inline double ln_binom(int n, int k) {
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double lin) { return 10.0 * std::log10(lin); }
inline double dbm_to_mw(double dbm) { return std::pow(10.0, dbm / 10.0); }

struct Quadrature {
  Eigen::VectorXd nodes;
  Eigen::VectorXd weights;
};

// Nodes/weights such that sum w_i f(x_i) approximates:
//   gauss_hermite_prob: integral of f(z) phi(z) dz over R (phi standard normal pdf)
//   gauss_legendre:     integral of f(x) dx over [-1, 1]
//   gauss_laguerre:     integral of f(v) e^{-v} dv over [0, inf)
Quadrature gauss_hermite_prob(int n);
Quadrature gauss_legendre(int n);
Quadrature gauss_laguerre(int n);

}  // namespace decifuse
