#pragma once

#include <boost/math/quadrature/exp_sinh.hpp>

#include <cmath>

namespace oracle {

// Rayleigh quotient ∫|U'|^p / (∫U^{p*})^{p/p*} in R^N of the radial profile
// U(r) = (1 + r^s)^(-beta), beta*s = (N-p)/(p-1). s = p/(p-1) is Talenti's profile,
// so radial_rayleigh(p, N, p/(p-1)) is S_p.
inline double radial_rayleigh(double p, int n, double s) {
  const double beta = (n - p) / ((p - 1.0) * s);
  const double pstar = n * p / (n - p);
  // log(1 + r^s) without overflow at large r
  auto log1p_pow = [s](double lr) {
    return lr > 0.0 ? s * lr + std::log1p(std::exp(-s * lr)) : std::log1p(std::exp(s * lr));
  };
  auto grad = [&](double r) {
    if (r <= 0.0) return 0.0;
    const double lr = std::log(r);
    const double log_d = std::log(beta * s) + (s - 1.0) * lr - (beta + 1.0) * log1p_pow(lr);
    return std::exp(p * log_d + (n - 1) * lr);
  };
  auto mass = [&](double r) {
    if (r <= 0.0) return 0.0;
    const double lr = std::log(r);
    return std::exp(-beta * pstar * log1p_pow(lr) + (n - 1) * lr);
  };
  boost::math::quadrature::exp_sinh<double> integrator;
  const double omega = 2.0 * std::pow(M_PI, n / 2.0) / std::tgamma(n / 2.0);
  const double top = omega * integrator.integrate(grad, 1e-15);
  const double bottom = omega * integrator.integrate(mass, 1e-15);
  return top / std::pow(bottom, p / pstar);
}

inline double talenti_threshold(double p, int n) {
  return std::pow(radial_rayleigh(p, n, p / (p - 1.0)), n / p) / n;
}

}  // namespace oracle
