#pragma once
// One-dimensional quadrature helpers and radial kernels.

#include <array>
#include <cmath>
#include <vector>

#include "core.hpp"

namespace latspec::quad {

struct GaussRule {
  std::vector<double> x;  // nodes on [-1, 1]
  std::vector<double> w;
};

// Gauss-Legendre rule by Newton iteration on P_n.
inline GaussRule gauss_legendre(int n) {
  GaussRule r;
  r.x.resize(static_cast<std::size_t>(n));
  r.w.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double z = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double dp = 0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1, p1 = 0;
      for (int k = 1; k <= n; ++k) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * k - 1) * z * p1 - (k - 1.0) * p2) / k;
      }
      dp = n * (z * p0 - p1) / (z * z - 1);
      const double dz = p0 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    // recompute derivative at the converged node
    double p0 = 1, p1 = 0;
    for (int k = 1; k <= n; ++k) {
      const double p2 = p1;
      p1 = p0;
      p0 = ((2.0 * k - 1) * z * p1 - (k - 1.0) * p2) / k;
    }
    dp = n * (z * p0 - p1) / (z * z - 1);
    const double w = 2.0 / ((1 - z * z) * dp * dp);
    r.x[static_cast<std::size_t>(i)] = -z;
    r.x[static_cast<std::size_t>(n - 1 - i)] = z;
    r.w[static_cast<std::size_t>(i)] = w;
    r.w[static_cast<std::size_t>(n - 1 - i)] = w;
  }
  return r;
}

inline const GaussRule& gl20() {
  static const GaussRule r = gauss_legendre(20);
  return r;
}

// Integrates f over [a, b] split at the given sorted breakpoints, 20-point rule per panel.
template <class F>
double panels(F&& f, const std::vector<double>& breaks) {
  const auto& g = gl20();
  double s = 0;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    const double a = breaks[i], b = breaks[i + 1];
    const double h = 0.5 * (b - a), c = 0.5 * (a + b);
    double ps = 0;
    for (std::size_t k = 0; k < g.x.size(); ++k) ps += g.w[k] * f(c + h * g.x[k]);
    s += h * ps;
  }
  return s;
}

// C-infinity step: 1 on [0, a], 0 on [b, inf).
inline double smooth_cutoff(double r, double a, double b) {
  if (r <= a) return 1.0;
  if (r >= b) return 0.0;
  const double t = (b - r) / (b - a);
  auto f = [](double s) { return s <= 0 ? 0.0 : std::exp(-1.0 / s); };
  const double ft = f(t), fo = f(1 - t);
  return ft / (ft + fo);
}

inline double sphere_area(int d) {
  return 2.0 * std::pow(kPi, 0.5 * d) / std::tgamma(0.5 * d);
}

// Angular integral of exp(i k.u) over the unit sphere of R^d, as a function of z = k r.
inline double angular_kernel(int d, double z) {
  if (d == 1) return 2.0 * std::cos(z);
  if (d == 2) return 2.0 * kPi * ::j0(z);  // libm j0 is far faster than std::cyl_bessel_j
  if (d == 3) return z < 1e-6 ? 4.0 * kPi * (1 - z * z / 6) : 4.0 * kPi * std::sin(z) / z;
  const double nu = 0.5 * d - 1;
  if (z < 1e-6) return sphere_area(d) * (1 - z * z / (2.0 * d));
  const double j = d % 2 == 0 ? ::jn(d / 2 - 1, z) : std::cyl_bessel_j(nu, z);
  return std::pow(2 * kPi, 0.5 * d) * std::pow(z, -nu) * j;
}

// Fourier transform over R^d of 2/(2 rho + |u|^2), i.e. (2pi)^-d int e^{iku} 2/(2rho+u^2) du.
// rho = 0 is allowed for d >= 3.
inline double continuum_resolvent(int d, double rho, double k) {
  const double nu = 0.5 * d - 1;
  if (rho <= 0) {
    return 2.0 * std::tgamma(nu) / (4.0 * std::pow(kPi, 0.5 * d)) * std::pow(k, -2.0 * nu);
  }
  const double kap = std::sqrt(2 * rho);
  if (d == 1) return std::exp(-kap * k) / kap;
  if (d == 3) return 2.0 * std::exp(-kap * k) / (4 * kPi * k);
  const double z = kap * k;
  if (z > 700) return 0.0;
  return 2.0 * std::pow(2 * kPi, -0.5 * d) * std::pow(kap / k, nu) * std::cyl_bessel_k(std::abs(nu), z);
}

}  // namespace latspec::quad
