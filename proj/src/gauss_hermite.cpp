#include "sklab/gauss_hermite.hpp"

#include <cmath>
#include <stdexcept>

#include "sklab/errors.hpp"

namespace sklab {

// Newton iteration on the orthonormal (physicists') Hermite recurrence.
GaussHermite gauss_hermite(int n) {
  if (n < 1) throw std::invalid_argument("gauss_hermite: n must be >= 1");
  const double eps = 1e-14;
  const int max_it = 100;
  std::vector<double> x(static_cast<std::size_t>(n)), w(static_cast<std::size_t>(n));
  const int m = (n + 1) / 2;
  double z = 0.0;
  for (int i = 0; i < m; ++i) {
    if (i == 0) {
      z = std::sqrt(2.0 * n + 1.0) - 1.85575 * std::pow(2.0 * n + 1.0, -0.16667);
    } else if (i == 1) {
      z -= 1.14 * std::pow(static_cast<double>(n), 0.426) / z;
    } else if (i == 2) {
      z = 1.86 * z - 0.86 * x[0];
    } else if (i == 3) {
      z = 1.91 * z - 0.91 * x[1];
    } else {
      z = 2.0 * z - x[static_cast<std::size_t>(i - 2)];
    }
    double pp = 0.0;
    bool ok = false;
    for (int it = 0; it < max_it; ++it) {
      double p1 = 0.7511255444649425;  // pi^{-1/4}
      double p2 = 0.0;
      for (int j = 0; j < n; ++j) {
        double p3 = p2;
        p2 = p1;
        p1 = z * std::sqrt(2.0 / (j + 1.0)) * p2 -
             std::sqrt(static_cast<double>(j) / (j + 1.0)) * p3;
      }
      pp = std::sqrt(2.0 * n) * p2;
      double z1 = z;
      z = z1 - p1 / pp;
      if (std::abs(z - z1) <= eps) {
        ok = true;
        break;
      }
    }
    if (!ok) throw NumericError("gauss_hermite: Newton iteration failed");
    x[static_cast<std::size_t>(i)] = z;
    x[static_cast<std::size_t>(n - 1 - i)] = -z;
    w[static_cast<std::size_t>(i)] = 2.0 / (pp * pp);
    w[static_cast<std::size_t>(n - 1 - i)] = w[static_cast<std::size_t>(i)];
  }
  if (n % 2 == 1) x[static_cast<std::size_t>(m - 1)] = 0.0;

  GaussHermite gh;
  gh.z.resize(static_cast<std::size_t>(n));
  gh.w.resize(static_cast<std::size_t>(n));
  // ascending nodes; convert to N(0,1) convention and normalize weights
  double wsum = 0.0;
  for (int k = 0; k < n; ++k) wsum += w[static_cast<std::size_t>(k)];
  const double rt2 = std::sqrt(2.0);
  for (int k = 0; k < n; ++k) {
    gh.z[static_cast<std::size_t>(k)] = rt2 * x[static_cast<std::size_t>(n - 1 - k)];
    gh.w[static_cast<std::size_t>(k)] = w[static_cast<std::size_t>(n - 1 - k)] / wsum;
  }
  return gh;
}

}  // namespace sklab
