#include "sklab/stats.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "sklab/rng.hpp"

namespace sklab {

MeanSe mean_se(std::span<const double> xs) {
  MeanSe out;
  const std::size_t n = xs.size();
  if (n == 0) return out;
  double s = 0.0;
  for (double x : xs) s += x;
  out.mean = s / static_cast<double>(n);
  if (n == 1) return out;
  double ss = 0.0;
  for (double x : xs) {
    double d = x - out.mean;
    ss += d * d;
  }
  double var = ss / static_cast<double>(n - 1);
  out.se = std::sqrt(var / static_cast<double>(n));
  return out;
}

double bootstrap_sd(std::size_t n, int n_resamples, std::uint64_t seed,
                    const std::function<double(std::span<const std::size_t>)>& stat_of) {
  if (n == 0 || n_resamples < 2) return 0.0;
  std::vector<double> stats(static_cast<std::size_t>(n_resamples));
  std::vector<std::size_t> idx(n);
  for (int b = 0; b < n_resamples; ++b) {
    auto rng = substream(seed, "bootstrap", static_cast<std::uint64_t>(b));
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    for (std::size_t i = 0; i < n; ++i) idx[i] = pick(rng);
    stats[static_cast<std::size_t>(b)] = stat_of(idx);
  }
  double m = 0.0;
  for (double s : stats) m += s;
  m /= static_cast<double>(stats.size());
  double ss = 0.0;
  for (double s : stats) {
    double d = s - m;
    ss += d * d;
  }
  return std::sqrt(ss / static_cast<double>(stats.size() - 1));
}

double ks_discrete(std::span<const double> samples, std::span<const double> atoms,
                   std::span<const double> weights) {
  if (atoms.size() != weights.size())
    throw std::invalid_argument("ks_discrete: atoms/weights size mismatch");
  const double n = static_cast<double>(samples.size());
  if (samples.empty()) return 0.0;
  double ks = 0.0;
  double ref_cdf = 0.0;
  for (std::size_t a = 0; a < atoms.size(); ++a) {
    ref_cdf += weights[a];
    // empirical CDF at atoms[a] (+ half-width tolerance for float-equal atoms)
    double cnt = 0.0;
    for (double s : samples)
      if (s <= atoms[a] + 1e-12) cnt += 1.0;
    ks = std::max(ks, std::abs(cnt / n - ref_cdf));
  }
  return ks;
}

double chi2_critical_1pct(int dof) {
  static const double crit[] = {6.635, 9.210,  11.345, 13.277, 15.086,
                                16.812, 18.475, 20.090, 21.666, 23.209};
  if (dof < 1 || dof > 10)
    throw std::invalid_argument("chi2_critical_1pct: dof outside table range");
  return crit[dof - 1];
}

}  // namespace sklab
