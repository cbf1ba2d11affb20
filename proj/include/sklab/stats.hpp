#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace sklab {

struct MeanSe {
  double mean = 0.0;
  double se = 0.0;
};

MeanSe mean_se(std::span<const double> xs);

// Nonparametric bootstrap standard deviation of a statistic. stat_of receives
// a resampled index list (with repetition) into the original n items.
double bootstrap_sd(std::size_t n, int n_resamples, std::uint64_t seed,
                    const std::function<double(std::span<const std::size_t>)>& stat_of);

// Kolmogorov-Smirnov distance between an empirical sample of atom values and a
// discrete reference CDF given by sorted atoms and their weights.
double ks_discrete(std::span<const double> samples, std::span<const double> atoms,
                   std::span<const double> weights);

// Upper 1% critical value of the chi-square distribution, dof in [1, 10].
double chi2_critical_1pct(int dof);

}  // namespace sklab
