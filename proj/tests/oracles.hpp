#pragma once

// Test-side oracles, independent of the implementation paths they check.

#include <cmath>
#include <numbers>
#include <vector>

#include "sklab/gauss_hermite.hpp"
#include "sklab/mixture.hpp"

namespace sklab::test {

// r = 1 Parisi value by direct 1-D quadrature of (1/z) log E cosh^z(a g):
// no grid, no interpolation, no recursion.
inline double parisi_r1_exact(const MixtureSpec& absorbed, double zeta0, int nodes = 400) {
  const double a = std::sqrt(absorbed.xi_prime(1.0));
  GaussHermite gh = gauss_hermite(nodes);
  double m = -1e300;
  std::vector<double> t(gh.z.size());
  for (std::size_t k = 0; k < gh.z.size(); ++k) {
    double lc = std::abs(a * gh.z[k]) + std::log1p(std::exp(-2.0 * std::abs(a * gh.z[k]))) -
                std::numbers::ln2;
    t[k] = zeta0 * lc;
    m = std::max(m, t[k]);
  }
  double s = 0.0;
  for (std::size_t k = 0; k < gh.z.size(); ++k) s += gh.w[k] * std::exp(t[k] - m);
  double x0 = (m + std::log(s)) / zeta0;
  return std::numbers::ln2 + x0 - 0.5 * zeta0 * absorbed.theta(1.0);
}

// brute-force H for small systems: plain triple loop, no Gray code
inline double brute_force_energy(int N, const std::vector<double>& g2, double norm,
                                 const std::vector<int>& sigma) {
  double s = 0.0;
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j)
      s += g2[static_cast<std::size_t>(i) * static_cast<std::size_t>(N) +
              static_cast<std::size_t>(j)] *
           sigma[static_cast<std::size_t>(i)] * sigma[static_cast<std::size_t>(j)];
  return norm * s;
}

}  // namespace sklab::test
